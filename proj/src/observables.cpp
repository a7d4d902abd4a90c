#include "dimer/observables.hpp"

#include <algorithm>
#include <cmath>

#include "dimer/errors.hpp"

namespace dimer {

int bin_index(double theta, int n) {
  const int k = static_cast<int>(std::floor((theta + kPi) / (kTwoPi / n)));
  return std::clamp(k, 0, n - 1);
}

double bin_center(int k, int n) { return -kPi + (k + 0.5) * (kTwoPi / n); }

Histogram2D::Histogram2D(int bins)
    : n(bins), counts(static_cast<std::size_t>(bins) * bins, 0) {
  if (bins < 1) throw ValidationError("histogram needs at least one bin");
}

double Histogram2D::density(int i, int j) const {
  if (total == 0) return 0.0;
  const double w = bin_width();
  return static_cast<double>(at(i, j)) / (static_cast<double>(total) * w * w);
}

void Histogram2D::add(AngleState a) {
  ++at(bin_index(a.theta_l, n), bin_index(a.theta_r, n));
  ++total;
}

void Histogram2D::merge(const Histogram2D& other) {
  if (other.n != n) throw ValidationError("cannot merge histograms of different size");
  for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += other.counts[k];
  total += other.total;
}

Histogram2D Histogram2D::transposed() const {
  Histogram2D t(n);
  t.meta = meta;
  t.total = total;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.at(j, i) = at(i, j);
  return t;
}

Histogram2D bin_angles(const std::vector<AngleState>& samples, int n) {
  Histogram2D h(n);
  for (const auto& a : samples) h.add(a);
  return h;
}

Density2D to_density(const Histogram2D& h) {
  Density2D d;
  d.n = h.n;
  d.density.resize(h.counts.size());
  for (int i = 0; i < h.n; ++i)
    for (int j = 0; j < h.n; ++j)
      d.density[static_cast<std::size_t>(i) * h.n + j] = h.density(i, j);
  return d;
}

namespace {

Marginal1D normalized(std::vector<double> mass) {
  double sum = 0.0;
  for (double m : mass) sum += m;
  if (!(sum > 0.0)) throw ValidationError("cannot normalize an empty distribution");
  Marginal1D out;
  out.n = static_cast<int>(mass.size());
  const double w = out.bin_width();
  for (double& m : mass) m /= sum * w;
  out.density = std::move(mass);
  return out;
}

}  // namespace

Marginal1D marginal(const Histogram2D& h, Site axis) {
  if (h.total == 0) throw ValidationError("marginal of an empty histogram");
  std::vector<double> mass(h.n, 0.0);
  for (int i = 0; i < h.n; ++i)
    for (int j = 0; j < h.n; ++j)
      mass[axis == Site::Left ? i : j] += static_cast<double>(h.at(i, j));
  return normalized(std::move(mass));
}

Marginal1D marginal(const Density2D& d, Site axis) {
  std::vector<double> mass(d.n, 0.0);
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j) mass[axis == Site::Left ? i : j] += d.at(i, j);
  return normalized(std::move(mass));
}

Density2D product_of_marginals(const Density2D& d) {
  const Marginal1D l = marginal(d, Site::Left);
  const Marginal1D r = marginal(d, Site::Right);
  Density2D out;
  out.n = d.n;
  out.density.resize(d.density.size());
  for (int i = 0; i < d.n; ++i)
    for (int j = 0; j < d.n; ++j)
      out.density[static_cast<std::size_t>(i) * d.n + j] = l.density[i] * r.density[j];
  return out;
}

ConditionalCuts conditional_cuts(const Histogram2D& h) {
  if (h.total == 0) throw ValidationError("conditional cuts of an empty histogram");
  const int n = h.n;
  std::vector<double> edge_r(n), edge_l(n), diag(n);
  for (int k = 0; k < n; ++k) {
    edge_r[k] = static_cast<double>(h.at(k, n - 1));
    edge_l[k] = static_cast<double>(h.at(n - 1, k));
    diag[k] = static_cast<double>(h.at(k, k));
  }
  auto cut = [](std::vector<double> v) -> std::optional<Marginal1D> {
    double s = 0.0;
    for (double x : v) s += x;
    if (s <= 0.0) return std::nullopt;
    return normalized(std::move(v));
  };
  return {cut(std::move(edge_r)), cut(std::move(edge_l)), cut(std::move(diag))};
}

double tv_distance(const Density2D& a, const Density2D& b) {
  if (a.n != b.n || a.density.size() != b.density.size()) {
    throw ValidationError("tv_distance: shape mismatch");
  }
  double sa = 0.0, sb = 0.0;
  for (std::size_t k = 0; k < a.density.size(); ++k) {
    sa += a.density[k];
    sb += b.density[k];
  }
  if (!(sa > 0.0) || !(sb > 0.0)) throw ValidationError("tv_distance: empty density");
  double l1 = 0.0;
  for (std::size_t k = 0; k < a.density.size(); ++k) {
    l1 += std::abs(a.density[k] / sa - b.density[k] / sb);
  }
  return std::min(1.0, 0.5 * l1);
}

double tv_distance(const Histogram2D& a, const Histogram2D& b) {
  return tv_distance(to_density(a), to_density(b));
}

double tv_distance(const Marginal1D& a, const Marginal1D& b) {
  if (a.n != b.n) throw ValidationError("tv_distance: shape mismatch");
  double sa = 0.0, sb = 0.0;
  for (int k = 0; k < a.n; ++k) {
    sa += a.density[k];
    sb += b.density[k];
  }
  if (!(sa > 0.0) || !(sb > 0.0)) throw ValidationError("tv_distance: empty density");
  double l1 = 0.0;
  for (int k = 0; k < a.n; ++k) l1 += std::abs(a.density[k] / sa - b.density[k] / sb);
  return std::min(1.0, 0.5 * l1);
}

double occupied_fraction(const Histogram2D& h, const std::vector<std::uint8_t>* mask) {
  if (h.total == 0) throw ValidationError("occupied_fraction of an empty histogram");
  std::size_t considered = 0, occupied = 0;
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    if (mask != nullptr && (*mask)[k] == 0) continue;
    ++considered;
    occupied += h.counts[k] != 0;
  }
  return considered == 0 ? 0.0 : static_cast<double>(occupied) / considered;
}

double occupied_fraction(const Density2D& d, const std::vector<std::uint8_t>* mask) {
  std::size_t considered = 0, occupied = 0;
  for (std::size_t k = 0; k < d.density.size(); ++k) {
    if (mask != nullptr && (*mask)[k] == 0) continue;
    ++considered;
    occupied += d.density[k] > 0.0;
  }
  return considered == 0 ? 0.0 : static_cast<double>(occupied) / considered;
}

int longest_empty_run(const Marginal1D& m) {
  const int n = m.n;
  int best = 0, run = 0;
  // Walk twice around the circle so runs crossing theta = pi are joined.
  for (int k = 0; k < 2 * n; ++k) {
    if (m.density[k % n] == 0.0) {
      run = std::min(run + 1, n);
      best = std::max(best, run);
    } else {
      run = 0;
    }
  }
  return best;
}

std::vector<std::vector<int>> empty_regions(const Histogram2D& h) {
  const int n = h.n;
  std::vector<int> label(h.counts.size(), -1);
  std::vector<std::vector<int>> regions;
  for (int start = 0; start < n * n; ++start) {
    if (h.counts[start] != 0 || label[start] >= 0) continue;
    const int id = static_cast<int>(regions.size());
    regions.emplace_back();
    std::vector<int> stack{start};
    label[start] = id;
    while (!stack.empty()) {
      const int k = stack.back();
      stack.pop_back();
      regions[id].push_back(k);
      const int i = k / n, j = k % n;
      const int nb[4] = {((i + 1) % n) * n + j, ((i + n - 1) % n) * n + j,
                         i * n + (j + 1) % n, i * n + (j + n - 1) % n};
      for (int q : nb) {
        if (h.counts[q] == 0 && label[q] < 0) {
          label[q] = id;
          stack.push_back(q);
        }
      }
    }
    std::sort(regions[id].begin(), regions[id].end());
  }
  return regions;
}

}  // namespace dimer
