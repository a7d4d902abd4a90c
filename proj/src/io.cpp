#include "dimer/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "dimer/errors.hpp"

namespace dimer {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

void write_meta(std::ostream& os, const HistogramMeta& meta, int n_bins) {
  const SimParams& p = meta.params;
  os << "# backend=" << meta.backend << '\n'
     << "# omega_s=" << format_double(p.omega_s) << '\n'
     << "# gamma1=" << format_double(p.gamma1) << '\n'
     << "# gamma2=" << format_double(p.gamma2) << '\n'
     << "# dt=" << format_double(p.dt) << '\n'
     << "# t_final=" << format_double(p.t_final) << '\n'
     << "# n_traj=" << p.n_traj << '\n'
     << "# master_seed=" << p.master_seed << '\n'
     << "# n_bins=" << n_bins << '\n';
}

void write_rows(std::ostream& os, int n, const std::vector<std::uint64_t>* counts,
                const std::vector<double>& density) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      os << i << ',' << j << ',' << format_double(bin_center(i, n)) << ','
         << format_double(bin_center(j, n)) << ','
         << (counts != nullptr ? (*counts)[k] : 0) << ','
         << format_double(density[k]) << '\n';
    }
  }
}

double parse_double(std::string_view text, std::size_t line, std::size_t col,
                    const std::string& what) {
  // strtod handles the full range of formatted values including exponents.
  std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw ParseError("invalid number for '" + what + "': '" + buf + "'", line, col);
  }
  return v;
}

std::uint64_t parse_uint(std::string_view text, std::size_t line,
                         std::size_t col, const std::string& what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("invalid integer for '" + what + "': '" + std::string(text) + "'",
                     line, col);
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);  // no "-0"
  return std::string(buf, static_cast<std::size_t>(len));
}

Histogram2D HistogramFile::histogram() const {
  Histogram2D h(n);
  h.meta = meta;
  h.counts = counts;
  h.total = 0;
  for (auto c : counts) h.total += c;
  return h;
}

Density2D HistogramFile::density() const {
  Density2D d;
  d.n = n;
  d.density = densities;
  return d;
}

void write_histogram(std::ostream& os, const Histogram2D& h) {
  write_meta(os, h.meta, h.n);
  const Density2D d = to_density(h);
  write_rows(os, h.n, &h.counts, d.density);
}

void write_histogram(const std::filesystem::path& path, const Histogram2D& h) {
  auto os = open_out(path);
  write_histogram(os, h);
  finish(os, path);
}

void write_pdf_grid(std::ostream& os, const PdfGrid& p, const HistogramMeta& meta) {
  write_meta(os, meta, p.n);
  write_rows(os, p.n, nullptr, to_density(p).density);
}

void write_pdf_grid(const std::filesystem::path& path, const PdfGrid& p,
                    const HistogramMeta& meta) {
  auto os = open_out(path);
  write_pdf_grid(os, p, meta);
  finish(os, path);
}

HistogramFile read_histogram(std::istream& is) {
  static const char* const kKeys[] = {"backend", "omega_s", "gamma1",
                                      "gamma2",  "dt",      "t_final",
                                      "n_traj",  "master_seed", "n_bins"};
  HistogramFile out;
  std::map<std::string, std::pair<std::string, std::size_t>> header;
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected = 0;
  bool in_rows = false;

  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (in_rows) throw ParseError("header line after data rows", line_no, 1);
      std::size_t start = 1;
      while (start < line.size() && line[start] == ' ') ++start;
      const auto eq = line.find('=', start);
      if (eq == std::string::npos) {
        throw ParseError("header line without '=': '" + line + "'", line_no, start + 1);
      }
      const std::string key = line.substr(start, eq - start);
      bool known = false;
      for (const char* k : kKeys) known = known || key == k;
      if (!known) throw ParseError("unknown header key '" + key + "'", line_no, start + 1);
      header[key] = {line.substr(eq + 1), line_no};
      continue;
    }

    if (!in_rows) {
      for (const char* k : kKeys) {
        if (!header.count(k)) {
          throw ParseError(std::string("missing header key '") + k + "'", line_no, 1);
        }
      }
      auto num = [&](const char* k) {
        const auto& [v, ln] = header[k];
        return parse_double(v, ln, std::string(k).size() + 4, k);
      };
      auto uint = [&](const char* k) {
        const auto& [v, ln] = header[k];
        return parse_uint(v, ln, std::string(k).size() + 4, k);
      };
      out.meta.backend = header["backend"].first;
      out.meta.params.omega_s = num("omega_s");
      out.meta.params.gamma1 = num("gamma1");
      out.meta.params.gamma2 = num("gamma2");
      out.meta.params.dt = num("dt");
      out.meta.params.t_final = num("t_final");
      out.meta.params.n_traj = uint("n_traj");
      out.meta.params.master_seed = uint("master_seed");
      const std::uint64_t bins = uint("n_bins");
      if (bins == 0 || bins > 100000) {
        throw ParseError("n_bins out of range", header["n_bins"].second, 10);
      }
      out.n = static_cast<int>(bins);
      out.counts.assign(bins * bins, 0);
      out.densities.assign(bins * bins, 0.0);
      in_rows = true;
    }

    std::vector<std::pair<std::string_view, std::size_t>> fields;
    std::string_view view(line);
    std::size_t pos = 0;
    while (true) {
      const auto comma = view.find(',', pos);
      fields.emplace_back(view.substr(pos, comma - pos), pos + 1);
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (fields.size() != 6) {
      throw ParseError("expected 6 fields, found " + std::to_string(fields.size()),
                       line_no, 1);
    }
    const auto i = parse_uint(fields[0].first, line_no, fields[0].second, "i");
    const auto j = parse_uint(fields[1].first, line_no, fields[1].second, "j");
    const auto n = static_cast<std::uint64_t>(out.n);
    if (i * n + j != expected || i >= n || j >= n) {
      throw ParseError("row out of row-major order", line_no, 1);
    }
    parse_double(fields[2].first, line_no, fields[2].second, "theta_l_center");
    parse_double(fields[3].first, line_no, fields[3].second, "theta_r_center");
    out.counts[expected] = parse_uint(fields[4].first, line_no, fields[4].second, "count");
    out.densities[expected] =
        parse_double(fields[5].first, line_no, fields[5].second, "density");
    ++expected;
  }
  if (!in_rows) throw ParseError("no data rows", line_no + 1, 1);
  if (expected != out.counts.size()) {
    throw ParseError("expected " + std::to_string(out.counts.size()) + " rows, found " +
                         std::to_string(expected),
                     line_no + 1, 1);
  }
  return out;
}

HistogramFile read_histogram(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_histogram(is);
}

void write_fixed_points(std::ostream& os, const std::vector<FixedPoint>& pts,
                        double lambda1, double lambda2) {
  os << "# lambda1=" << format_double(lambda1) << '\n'
     << "# lambda2=" << format_double(lambda2) << '\n'
     << "theta_l,theta_r,eig1_re,eig1_im,eig2_re,eig2_im,class\n";
  for (const auto& p : pts) {
    os << format_double(p.theta.theta_l) << ',' << format_double(p.theta.theta_r)
       << ',' << format_double(p.eig1.real()) << ',' << format_double(p.eig1.imag())
       << ',' << format_double(p.eig2.real()) << ',' << format_double(p.eig2.imag())
       << ',' << to_string(p.cls) << '\n';
  }
}

void write_fixed_points(const std::filesystem::path& path,
                        const std::vector<FixedPoint>& pts, double lambda1,
                        double lambda2) {
  auto os = open_out(path);
  write_fixed_points(os, pts, lambda1, lambda2);
  finish(os, path);
}

void write_phase_grid(std::ostream& os, const std::vector<PhaseCell>& cells) {
  os << "lambda1,lambda2,n_fixed,n_stable,phase\n";
  for (const auto& c : cells) {
    os << format_double(c.lambda1) << ',' << format_double(c.lambda2) << ','
       << c.n_fixed << ',' << c.n_stable << ','
       << (c.boundary ? std::string_view("boundary") : to_string(c.phase)) << '\n';
  }
}

void write_phase_grid(const std::filesystem::path& path,
                      const std::vector<PhaseCell>& cells) {
  auto os = open_out(path);
  write_phase_grid(os, cells);
  finish(os, path);
}

void write_flow_field(std::ostream& os, const FlowGrid& g, double lambda1,
                      double lambda2) {
  os << "# lambda1=" << format_double(lambda1) << '\n'
     << "# lambda2=" << format_double(lambda2) << '\n'
     << "# n=" << g.n << '\n'
     << "theta_l,theta_r,v_l,v_r\n";
  for (std::size_t k = 0; k < g.points.size(); ++k) {
    os << format_double(g.points[k].theta_l) << ',' << format_double(g.points[k].theta_r)
       << ',' << format_double(g.velocity[k].omega_l) << ','
       << format_double(g.velocity[k].omega_r) << '\n';
  }
}

void write_flow_field(const std::filesystem::path& path, const FlowGrid& g,
                      double lambda1, double lambda2) {
  auto os = open_out(path);
  write_flow_field(os, g, lambda1, lambda2);
  finish(os, path);
}

void write_ensemble_summary(std::ostream& os, const EnsembleAverages& avg,
                            const HistogramMeta& meta) {
  write_meta(os, meta, 0);
  os << "n_samples=" << avg.n_samples << '\n'
     << "n_excluded=" << avg.n_excluded << '\n'
     << "mean_fidelity=" << format_double(avg.mean_fidelity) << '\n'
     << "se_fidelity=" << format_double(avg.se_fidelity) << '\n'
     << "mean_entropy=" << format_double(avg.mean_entropy) << '\n'
     << "se_entropy=" << format_double(avg.se_entropy) << '\n';
  for (int r = 0; r < 4; ++r) {
    os << "readout_total_" << r << '=' << avg.readout_totals[r] << '\n';
  }
}

void write_ensemble_summary(const std::filesystem::path& path,
                            const EnsembleAverages& avg,
                            const HistogramMeta& meta) {
  auto os = open_out(path);
  write_ensemble_summary(os, avg, meta);
  finish(os, path);
}

}  // namespace dimer
