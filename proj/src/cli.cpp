#include "dimer/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dimer/errors.hpp"
#include "dimer/fokker_planck.hpp"
#include "dimer/io.hpp"
#include "dimer/noclick_flow.hpp"
#include "dimer/observables.hpp"
#include "dimer/parallel.hpp"
#include "dimer/trajectory.hpp"

namespace dimer {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kDefaultLambda = 0.25;

/// Splices `key = value` entries of a subcommand's --config file in front of
/// the command-line flags, so that explicit flags win under TakeLast.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  if (args.empty()) return args;
  const std::string& sub = args.front();
  std::optional<std::string> file;
  std::vector<std::string> rest;
  for (std::size_t k = 1; k < args.size(); ++k) {
    const std::string& a = args[k];
    if (a == "--config" && k + 1 < args.size()) {
      file = args[++k];
    } else if (a.rfind("--config=", 0) == 0) {
      file = a.substr(9);
    } else {
      rest.push_back(a);
    }
  }
  if (!file) return args;

  std::ifstream is(*file);
  if (!is) throw IoError("cannot open config file " + *file);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(is);
  } catch (const CLI::ParseError& e) {
    throw ValidationError("config file " + *file + ": " + e.what());
  }
  std::vector<std::string> out{sub};
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub)) continue;
    out.push_back("--" + item.name);
    out.insert(out.end(), item.inputs.begin(), item.inputs.end());
  }
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

/// Measurement strengths given either as lambdas or as rates.
struct Strengths {
  std::optional<double> lambda1, lambda2, gamma1, gamma2;
  double omega_s = 1.0;

  void add_to(CLI::App& app) {
    auto* l1 = app.add_option("--lambda1", lambda1,
                              "Local strength gamma1/(4 omega_s), dimensionless [default 0.25]");
    auto* l2 = app.add_option("--lambda2", lambda2,
                              "Correlated strength gamma2/(4 omega_s), dimensionless [default 0.25]");
    auto* g1 = app.add_option("--gamma1", gamma1,
                              "Local monitoring rate, units of omega_s (excludes --lambda*)");
    auto* g2 = app.add_option("--gamma2", gamma2,
                              "Correlated monitoring rate, units of omega_s (excludes --lambda*)");
    for (auto* g : {g1, g2}) {
      g->excludes(l1);
      g->excludes(l2);
    }
    app.add_option("--omega", omega_s, "Rabi frequency omega_s, sets the unit of time")
        ->capture_default_str();
  }

  // Returns (gamma1, gamma2).
  std::pair<double, double> rates() const {
    if (!(omega_s > 0.0)) throw ValidationError("--omega must be > 0");
    if (gamma1 || gamma2) {
      return {gamma1.value_or(4.0 * omega_s * kDefaultLambda),
              gamma2.value_or(4.0 * omega_s * kDefaultLambda)};
    }
    return {4.0 * omega_s * lambda1.value_or(kDefaultLambda),
            4.0 * omega_s * lambda2.value_or(kDefaultLambda)};
  }

  std::pair<double, double> lambdas() const {
    const auto [g1, g2] = rates();
    const double l1 = g1 / (4.0 * omega_s), l2 = g2 / (4.0 * omega_s);
    if (!(l1 >= 0.0) || !(l2 >= 0.0)) {
      throw ValidationError("measurement strengths must be nonnegative");
    }
    return {l1, l2};
  }
};

fs::path output_path(const std::string& given, const char* default_name) {
  if (!given.empty()) return given;
  const char* dir = std::getenv("DIMER_OUT_DIR");
  return (dir != nullptr && *dir != '\0') ? fs::path(dir) / default_name
                                          : fs::path(default_name);
}

AxisRange parse_range(const std::string& text, const char* flag) {
  // lo:hi:count
  AxisRange r;
  std::istringstream is(text);
  char c1 = 0, c2 = 0;
  if (!(is >> r.lo >> c1 >> r.hi >> c2 >> r.count) || c1 != ':' || c2 != ':' ||
      !(is >> std::ws).eof()) {
    throw ValidationError(std::string(flag) + " expects lo:hi:count, got '" + text + "'");
  }
  return r;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

struct SimulateOpts {
  Strengths s;
  std::string backend = "gutzwiller";
  double dt = 1e-3;
  double t_final = 20.0;
  std::uint64_t n_traj = 1000;
  std::uint64_t seed = 0;
  int bins = 72;
  int grid = 0;
  double tol = 1e-9;
  unsigned threads = 0;
  std::string out;
  std::string summary;
};

int simulate(const SimulateOpts& o, std::ostream& out) {
  SimParams p;
  p.omega_s = o.s.omega_s;
  std::tie(p.gamma1, p.gamma2) = o.s.rates();
  p.dt = o.dt;
  p.t_final = o.t_final;
  p.n_traj = o.n_traj;
  p.master_seed = o.seed;
  p.validate();
  if (o.bins < 1) throw ValidationError("--bins must be >= 1");
  if (!(p.t_final > 0.0)) throw ValidationError("--t-final must be > 0");
  const fs::path path = output_path(o.out, "histogram.csv");
  const HistogramMeta meta{o.backend, p};
  const auto t0 = Clock::now();

  if (o.backend == "fokker-planck") {
    const int grid = o.grid == 0 ? o.bins : o.grid;
    if (grid % o.bins != 0) {
      throw ValidationError("--grid must be a multiple of --bins");
    }
    const auto res = fp_stationary(p, grid, p.t_final, o.tol);
    write_pdf_grid(path, coarsen(res.grid, o.bins), meta);
    const double wall = seconds_since(t0);
    out << "simulate backend=fokker-planck grid=" << grid << " steps=" << res.steps
        << " stop=" << res.criterion << " mass_error=" << fmt(res.max_mass_error)
        << " wall_s=" << fmt(wall) << " steps_per_s=" << fmt(res.steps / wall)
        << " out=" << path.string() << '\n';
    return kExitOk;
  }

  if (p.n_traj == 0) throw ValidationError("--n-traj must be >= 1");
  Backend backend;
  if (o.backend == "exact") {
    backend = Backend::Exact;
  } else if (o.backend == "gutzwiller") {
    backend = Backend::Gutzwiller;
  } else {
    backend = Backend::Sse;
  }

  Histogram2D h(o.bins);
  h.meta = meta;
  EnsembleAccumulator acc;
  stream_ensemble(backend, p, o.threads, [&](std::uint64_t, const TrajectorySample& s) {
    acc.add(s);
    if (s.angles_defined) h.add(s.angles);
  });
  write_histogram(path, h);
  const EnsembleAverages avg = acc.result();
  if (!o.summary.empty()) write_ensemble_summary(fs::path(o.summary), avg, meta);
  const double wall = seconds_since(t0);
  out << "simulate backend=" << o.backend << " n_traj=" << p.n_traj
      << " binned=" << h.total << " mean_fidelity=" << fmt(avg.mean_fidelity)
      << " mean_entropy=" << fmt(avg.mean_entropy) << " wall_s=" << fmt(wall)
      << " traj_per_s=" << fmt(p.n_traj / wall) << " out=" << path.string() << '\n';
  return kExitOk;
}

int translate(const std::exception_ptr& e, std::ostream& err) {
  try {
    std::rethrow_exception(e);
  } catch (const ValidationError& x) {
    err << "error: " << x.what() << '\n';
    return kExitValidation;
  } catch (const IoError& x) {
    err << "I/O error: " << x.what() << '\n';
    return kExitIo;
  } catch (const Error& x) {
    err << "numeric error: " << x.what() << '\n';
    return kExitNumeric;
  } catch (const fs::filesystem_error& x) {
    err << "I/O error: " << x.what() << '\n';
    return kExitIo;
  } catch (const std::exception& x) {
    err << "error: " << x.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Monitored two-qubit dimer: trajectories, grid solver and no-click flow",
               "dimer"};
  app.require_subcommand(1);
  app.footer(
      "Times are in units of 1/omega_s. Exit codes: 2 usage, 3 invalid parameters,\n"
      "4 numerical failure, 5 I/O. Outputs without --out go to $DIMER_OUT_DIR\n"
      "(or the working directory).");

  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  // Consumed by expand_config before parsing; registered for --help only.
  std::string config_sink;
  auto add_config = [&config_sink](CLI::App* sub) {
    sub->add_option("--config", config_sink,
                    "TOML file with option values (keys are long option names); flags override it");
  };

  SimulateOpts sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a trajectory ensemble or the grid solver");
  add_config(sim_cmd);
  sim_cmd->add_option("--backend", sim.backend, "Solver")
      ->check(CLI::IsMember({"exact", "gutzwiller", "sse", "fokker-planck"}))
      ->capture_default_str();
  sim.s.add_to(*sim_cmd);
  sim_cmd->add_option("--dt", sim.dt, "Time step, units of 1/omega_s (dt*omega_s <= 1e-2)")
      ->capture_default_str();
  sim_cmd->add_option("--t-final", sim.t_final, "Final time, units of 1/omega_s")
      ->capture_default_str();
  sim_cmd->add_option("--n-traj", sim.n_traj, "Number of trajectories")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--bins", sim.bins, "Histogram bins per angle")->capture_default_str();
  sim_cmd->add_option("--grid", sim.grid,
                      "fokker-planck cells per angle, a multiple of --bins [default = bins]");
  sim_cmd->add_option("--tol", sim.tol,
                      "fokker-planck stop when max |dP/dt| < tol, units of omega_s")
      ->capture_default_str();
  sim_cmd->add_option("--threads", sim.threads, "Worker threads, 0 = all cores")
      ->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Histogram CSV [default histogram.csv]");
  sim_cmd->add_option("--summary", sim.summary,
                      "Ensemble summary file (fidelity, entropy, readouts)");

  Strengths flow_s;
  int flow_grid = 72;
  std::string flow_out;
  auto* flow_cmd = app.add_subcommand("flow", "Sample the no-click velocity field -Omega");
  add_config(flow_cmd);
  flow_s.add_to(*flow_cmd);
  flow_cmd->add_option("--grid", flow_grid, "Nodes per angle (>= 8)")->capture_default_str();
  flow_cmd->add_option("--out", flow_out, "CSV output [default flow.csv]");

  Strengths fp_s;
  FixedPointOptions fp_opts;
  std::string fp_out;
  auto* fp_cmd = app.add_subcommand("fixed-points", "Locate and classify no-click fixed points");
  add_config(fp_cmd);
  fp_s.add_to(*fp_cmd);
  fp_cmd->add_option("--scan", fp_opts.scan_n, "Seed scan nodes per angle")
      ->capture_default_str();
  fp_cmd->add_option("--out", fp_out, "CSV output [default fixed_points.csv]");

  std::string pd_l1 = "0:2:101", pd_l2 = "0:2:101", pd_out;
  unsigned pd_threads = 0;
  auto* pd_cmd = app.add_subcommand("phase-diagram", "Classify a (lambda1, lambda2) grid");
  add_config(pd_cmd);
  pd_cmd->add_option("--l1", pd_l1, "lambda1 nodes lo:hi:count")->capture_default_str();
  pd_cmd->add_option("--l2", pd_l2, "lambda2 nodes lo:hi:count")->capture_default_str();
  pd_cmd->add_option("--threads", pd_threads, "Worker threads, 0 = all cores")
      ->capture_default_str();
  pd_cmd->add_option("--out", pd_out, "CSV output [default phase_diagram.csv]");

  std::vector<std::string> expanded;
  try {
    expanded = expand_config(args);
  } catch (...) {
    return translate(std::current_exception(), err);
  }

  try {
    std::vector<std::string> rev(expanded.rbegin(), expanded.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // A --help on a subcommand surfaces as CallForHelp from the subcommand.
    err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    const auto t0 = Clock::now();
    if (*sim_cmd) return simulate(sim, out);
    if (*flow_cmd) {
      const auto [l1, l2] = flow_s.lambdas();
      if (flow_grid < 8) throw ValidationError("--grid must be >= 8");
      const fs::path path = output_path(flow_out, "flow.csv");
      write_flow_field(path, flow_field(flow_grid, l1, l2, flow_s.omega_s), l1, l2);
      out << "flow grid=" << flow_grid << " wall_s=" << fmt(seconds_since(t0))
          << " out=" << path.string() << '\n';
      return kExitOk;
    }
    if (*fp_cmd) {
      const auto [l1, l2] = fp_s.lambdas();
      if (fp_opts.scan_n < 8) throw ValidationError("--scan must be >= 8");
      const fs::path path = output_path(fp_out, "fixed_points.csv");
      const auto pts = find_fixed_points(l1, l2, fp_opts);
      write_fixed_points(path, pts, l1, l2);
      std::map<std::string_view, int> by_class;
      for (const auto& q : pts) ++by_class[to_string(q.cls)];
      out << "fixed-points n=" << pts.size();
      for (const auto& [k, v] : by_class) out << ' ' << k << '=' << v;
      out << " wall_s=" << fmt(seconds_since(t0)) << " out=" << path.string() << '\n';
      return kExitOk;
    }
    const AxisRange r1 = parse_range(pd_l1, "--l1"), r2 = parse_range(pd_l2, "--l2");
    const fs::path path = output_path(pd_out, "phase_diagram.csv");
    const auto cells = phase_diagram(r1, r2, pd_threads);
    write_phase_grid(path, cells);
    const double wall = seconds_since(t0);
    out << "phase-diagram cells=" << cells.size() << " wall_s=" << fmt(wall)
        << " cells_per_s=" << fmt(cells.size() / wall) << " out=" << path.string() << '\n';
    return kExitOk;
  } catch (...) {
    return translate(std::current_exception(), err);
  }
}

}  // namespace dimer
