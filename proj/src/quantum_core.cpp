#include "dimer/quantum_core.hpp"

#include <algorithm>
#include <cmath>

#include "dimer/errors.hpp"

namespace dimer {

namespace {

constexpr Complex kI{0.0, 1.0};

// Occupation of the left/right qubit in basis state k.
constexpr int left_bit(int k) { return k >> 1; }
constexpr int right_bit(int k) { return k & 1; }

void require_normalized(const PureState4& s) {
  if (std::abs(s.norm_squared() - 1.0) > 1e-9) {
    throw ValidationError("state is not normalized");
  }
}

// Left reduced density matrix: rho[a][a'] = sum_b psi[ab] conj(psi[a'b]).
// For the right site the roles of the bits swap.
std::array<Complex, 4> reduced_rho(const PureState4& s, Site site) {
  std::array<Complex, 4> rho{};
  for (int a = 0; a < 2; ++a) {
    for (int ap = 0; ap < 2; ++ap) {
      Complex acc = 0.0;
      for (int b = 0; b < 2; ++b) {
        const int k = site == Site::Left ? 2 * a + b : 2 * b + a;
        const int kp = site == Site::Left ? 2 * ap + b : 2 * b + ap;
        acc += s[k] * std::conj(s[kp]);
      }
      rho[2 * a + ap] = acc;
    }
  }
  return rho;
}

}  // namespace

double PureState4::norm_squared() const {
  double n = 0.0;
  for (const auto& a : amplitudes) n += std::norm(a);
  return n;
}

PureState4 PureState4::normalized() const {
  const double n = std::sqrt(norm_squared());
  if (!(n > 0.0)) throw NumericError("cannot normalize the zero vector");
  PureState4 out = *this;
  for (auto& a : out.amplitudes) a /= n;
  return out;
}

PureState4 PureState4::basis(int k) {
  PureState4 s;
  s.amplitudes.at(k) = 1.0;
  return s;
}

PureState4 PureState4::product(AngleState angles) {
  const std::array<Complex, 2> l{std::cos(angles.theta_l / 2),
                                 kI * std::sin(angles.theta_l / 2)};
  const std::array<Complex, 2> r{std::cos(angles.theta_r / 2),
                                 kI * std::sin(angles.theta_r / 2)};
  PureState4 s;
  for (int k = 0; k < 4; ++k) s[k] = l[left_bit(k)] * r[right_bit(k)];
  return s;
}

Complex inner(const PureState4& bra, const PureState4& ket) {
  Complex acc = 0.0;
  for (int k = 0; k < 4; ++k) acc += std::conj(bra[k]) * ket[k];
  return acc;
}

Operator4 Operator4::identity() {
  return diagonal({1.0, 1.0, 1.0, 1.0});
}

Operator4 Operator4::zero() { return Operator4{}; }

Operator4 Operator4::diagonal(const std::array<double, 4>& d) {
  Operator4 m;
  for (int k = 0; k < 4; ++k) m(k, k) = d[k];
  return m;
}

Operator4 Operator4::adjoint() const {
  Operator4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(r, c) = std::conj((*this)(c, r));
  return out;
}

bool Operator4::is_diagonal(double tol) const {
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (r != c && std::abs((*this)(r, c)) > tol) return false;
  return true;
}

Operator4 operator*(const Operator4& a, const Operator4& b) {
  Operator4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      Complex acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += a(r, k) * b(k, c);
      out(r, c) = acc;
    }
  return out;
}

Operator4 operator+(const Operator4& a, const Operator4& b) {
  Operator4 out;
  for (int k = 0; k < 16; ++k) out.entries[k] = a.entries[k] + b.entries[k];
  return out;
}

Operator4 operator*(double s, const Operator4& a) {
  Operator4 out;
  for (int k = 0; k < 16; ++k) out.entries[k] = s * a.entries[k];
  return out;
}

PureState4 operator*(const Operator4& a, const PureState4& v) {
  PureState4 out;
  for (int r = 0; r < 4; ++r) {
    Complex acc = 0.0;
    for (int c = 0; c < 4; ++c) acc += a(r, c) * v[c];
    out[r] = acc;
  }
  return out;
}

double max_abs_diff(const Operator4& a, const Operator4& b) {
  double m = 0.0;
  for (int k = 0; k < 16; ++k)
    m = std::max(m, std::abs(a.entries[k] - b.entries[k]));
  return m;
}

double hermiticity_defect(const Operator4& a) {
  return max_abs_diff(a, a.adjoint());
}

Operator4 kron(const std::array<Complex, 4>& left,
               const std::array<Complex, 4>& right) {
  Operator4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      out(r, c) = left[2 * left_bit(r) + left_bit(c)] *
                  right[2 * right_bit(r) + right_bit(c)];
  return out;
}

namespace ops {

namespace {
constexpr std::array<Complex, 4> kId2{1.0, 0.0, 0.0, 1.0};
constexpr std::array<Complex, 4> kSx{0.0, 1.0, 1.0, 0.0};
constexpr std::array<Complex, 4> kN{0.0, 0.0, 0.0, 1.0};
}  // namespace

Operator4 sigma_x_left() { return kron(kSx, kId2); }
Operator4 sigma_x_right() { return kron(kId2, kSx); }
Operator4 n_left() { return kron(kN, kId2); }
Operator4 n_right() { return kron(kId2, kN); }
Operator4 n_both() { return kron(kN, kN); }

Operator4 system_hamiltonian(double omega_s) {
  return omega_s * (sigma_x_left() + sigma_x_right());
}

}  // namespace ops

double KrausSet::completeness_defect() const {
  Operator4 sum;
  for (const auto& op : m) sum = sum + op.adjoint() * op;
  return max_abs_diff(sum, Operator4::identity());
}

KrausSet build_kraus(double gamma1, double gamma2, double dt) {
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) {
    throw ValidationError("measurement rates must be nonnegative");
  }
  if (!(dt > 0.0)) throw ValidationError("dt must be positive");
  const double p1 = gamma1 * dt;
  const double p2 = gamma2 * dt;
  if (2.0 * p1 + p2 > 1.0) {
    throw ValidationError(
        "(2*gamma1 + gamma2)*dt > 1: no-click operator is not positive; "
        "dt too large for the rates");
  }

  KrausSet k;
  k.gamma1 = gamma1;
  k.gamma2 = gamma2;
  k.dt = dt;
  const double s1 = std::sqrt(p1);
  const double s2 = std::sqrt(p2);
  for (int b = 0; b < 4; ++b) {
    const double nl = left_bit(b);
    const double nr = right_bit(b);
    k.diag[1][b] = s1 * nl;
    k.diag[2][b] = s1 * nr;
    k.diag[3][b] = s2 * nl * nr;
    k.diag[0][b] = std::sqrt(1.0 - p1 * nl - p1 * nr - p2 * nl * nr);
  }
  for (int r = 0; r < 4; ++r) k.m[r] = Operator4::diagonal(k.diag[r]);
  return k;
}

std::array<Operator4, 8> detector_kraus(double j1, double j2, double dt) {
  const double c1 = std::cos(j1 * dt), s1 = std::sin(j1 * dt);
  const double c2 = std::cos(j2 * dt), s2 = std::sin(j2 * dt);
  // Single-detector factors: [detector outcome][basis state].
  const std::array<std::array<double, 4>, 2> dl{{{1, 1, c1, c1}, {0, 0, s1, s1}}};
  const std::array<std::array<double, 4>, 2> dr{{{1, c1, 1, c1}, {0, s1, 0, s1}}};
  const std::array<std::array<double, 4>, 2> db{{{1, 1, 1, c2}, {0, 0, 0, s2}}};

  std::array<Operator4, 8> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        out[4 * i + 2 * j + k] = Operator4::diagonal(dl[i]) *
                                 Operator4::diagonal(dr[j]) *
                                 Operator4::diagonal(db[k]);
  return out;
}

Operator4 propagator(double omega_s, double dt) {
  // exp(-i a sigma^x) = cos(a) I - i sin(a) sigma^x on each qubit.
  const double a = omega_s * dt;
  const std::array<Complex, 4> u{std::cos(a), -kI * std::sin(a),
                                 -kI * std::sin(a), std::cos(a)};
  return kron(u, u);
}

std::array<double, 4> born_probabilities(const PureState4& state,
                                         const KrausSet& kraus) {
  require_normalized(state);
  std::array<double, 4> p{};
  for (int r = 0; r < 4; ++r) {
    p[r] = std::clamp((kraus.m[r] * state).norm_squared(), 0.0, 1.0);
  }
  return p;
}

ReducedBloch reduced_bloch(const PureState4& state, Site site) {
  const auto rho = reduced_rho(state, site);
  ReducedBloch b;
  b.x = 2.0 * rho[1].real();
  b.y = -2.0 * rho[1].imag();
  b.z = rho[0].real() - rho[3].real();
  b.purity = 0.5 * (1.0 + b.x * b.x + b.y * b.y + b.z * b.z);
  return b;
}

double bloch_angle(const ReducedBloch& b) {
  if (b.y * b.y + b.z * b.z <= 1e-14) {
    throw UndefinedAngleError(
        "reduced Bloch vector has no y-z component; angle undefined");
  }
  return wrap_angle(std::atan2(b.y, b.z));
}

double entanglement_entropy(const PureState4& state, Site traced_in) {
  const auto b = reduced_bloch(state, traced_in);
  const double r = std::sqrt(b.x * b.x + b.y * b.y + b.z * b.z);
  double s = 0.0;
  for (double lam : {0.5 * (1.0 + r), 0.5 * (1.0 - r)}) {
    if (lam >= -1e-12 && lam <= 0.0) continue;
    lam = std::clamp(lam, 0.0, 1.0);
    if (lam > 0.0) s -= lam * std::log2(lam);
  }
  return std::clamp(s, 0.0, 1.0);
}

double entanglement_entropy(const PureState4& state) {
  return entanglement_entropy(state, Site::Left);
}

}  // namespace dimer
