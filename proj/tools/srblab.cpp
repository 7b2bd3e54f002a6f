// Command-line driver: one subcommand per experiment stage.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "srblab/config.hpp"
#include "srblab/errors.hpp"
#include "srblab/log.hpp"
#include "srblab/observables.hpp"
#include "srblab/ode.hpp"
#include "srblab/stability.hpp"

using namespace srb;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kItemFailures = 2;

struct Context {
  ExperimentConfig cfg;
  std::filesystem::path out;
};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os.precision(17);
  return os;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto os = open_output(path);
  os << doc.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_density(const Context& ctx) {
  const auto& ns = ctx.cfg.numerics;
  const UlamDensity d = invariant_density(ctx.cfg.base.map, ns.n, ns.density);
  auto os = open_output(ctx.out / "density.csv");
  write_density_csv(os, d);
  write_json(ctx.out / "density.json", {{"n", d.n},
                                        {"iterations", d.iterations},
                                        {"residual", d.residual},
                                        {"integral", d.integral()},
                                        {"sup", d.sup()},
                                        {"map", to_json(ctx.cfg.base)["map"]}});
  std::cout << "density: n=" << d.n << " sup=" << d.sup() << " iterations=" << d.iterations
            << '\n';
  return kOk;
}

int cmd_lift(const Context& ctx) {
  const ModelParams& m = ctx.cfg.base;
  const auto& ns = ctx.cfg.numerics;
  const UlamDensity d = invariant_density(m.map, ns.n, ns.density);
  auto csv = open_output(ctx.out / "lift.csv");
  csv << "observable,m,lower,upper,quad_error\n";
  json entries = json::array();
  int failures = 0;
  for (const auto& e : select_dictionary(ctx.cfg.observables)) {
    const LiftResult r = lift_integral(e.section, m.map, m.skew, d, ns.section_lift);
    for (const auto& h : r.history) {
      csv << '"' << e.name << "\"," << h.m << ',' << h.lower << ',' << h.upper << ','
          << h.quad_error << '\n';
    }
    if (!r.converged) ++failures;
    entries.push_back({{"observable", e.name},
                       {"bracket", to_json(r.bracket)},
                       {"quad_error", r.quad_error},
                       {"converged", r.converged},
                       {"disc_hits", r.disc_hits}});
    std::cout << e.name << ": [" << r.bracket.lower << ", " << r.bracket.upper << "] m="
              << r.bracket.m << (r.converged ? "" : " (not converged)") << '\n';
  }
  write_json(ctx.out / "lift.json", {{"n", ns.n}, {"results", entries}});
  return failures ? kItemFailures : kOk;
}

int cmd_roof(const Context& ctx) {
  const ModelParams& m = ctx.cfg.base;
  const auto& ns = ctx.cfg.numerics;
  const UlamDensity d = invariant_density(m.map, ns.n, ns.density);
  std::vector<double> levels{5.0, 10.0, 20.0, 40.0};
  if (std::find(levels.begin(), levels.end(), ns.flow.truncation) == levels.end()) {
    levels.push_back(ns.flow.truncation);
    std::sort(levels.begin(), levels.end());
  }
  auto csv = open_output(ctx.out / "roof.csv");
  csv << "N,value,upper,tail_bound,epsilon\n";
  json rows = json::array();
  for (double N : levels) {
    const MeanReturnTime r = mean_return_time(d, m.roof, N);
    csv << N << ',' << r.value << ',' << r.upper() << ',' << r.tail_bound << ',' << r.epsilon
        << '\n';
    rows.push_back({{"N", N},
                    {"value", r.value},
                    {"upper", r.upper()},
                    {"tail_bound", r.tail_bound},
                    {"epsilon", r.epsilon},
                    {"density_bound", r.density_bound}});
  }
  write_json(ctx.out / "roof.json",
             {{"retime_constant", retime_constant(m.roof)}, {"levels", rows}});
  return kOk;
}

int cmd_flow_avg(const Context& ctx) {
  const ModelParams& m = ctx.cfg.base;
  const auto& ns = ctx.cfg.numerics;
  const UlamDensity d = invariant_density(m.map, ns.n, ns.density);
  auto csv = open_output(ctx.out / "flow.csv");
  csv << "observable,value,error,lower,upper,converged\n";
  json entries = json::array();
  int failures = 0;
  for (const auto& e : select_dictionary(ctx.cfg.observables)) {
    const FlowIntegral f = flow_integral(e.ambient, m, d, ns.flow);
    if (!f.converged) ++failures;
    csv << '"' << e.name << "\"," << f.value << ',' << f.error << ',' << f.lower << ','
        << f.upper << ',' << f.converged << '\n';
    entries.push_back({{"observable", e.name},
                       {"value", f.value},
                       {"error", f.error},
                       {"lower", f.lower},
                       {"upper", f.upper},
                       {"numerator", to_json(f.numerator.bracket)},
                       {"denominator", f.denominator},
                       {"denominator_quad_error", f.denominator_quad_error},
                       {"truncation_error", f.truncation_error},
                       {"converged", f.converged}});
    std::cout << e.name << ": " << f.value << " ± " << f.error << '\n';
  }
  write_json(ctx.out / "flow.json", {{"n", ns.n}, {"truncation", ns.flow.truncation},
                                     {"results", entries}});
  // A short embedded path for plotting.
  auto path = open_output(ctx.out / "suspension_path.csv");
  ode::write_trajectory_csv(path, sample_suspension({0.2, 0.1}, 20.0, 0.005, m));
  return failures ? kItemFailures : kOk;
}

int cmd_birkhoff(const Context& ctx) {
  const ModelParams& m = ctx.cfg.base;
  const BirkhoffSettings& bs = ctx.cfg.birkhoff;
  std::mt19937_64 rng(ctx.cfg.seed);
  std::uniform_real_distribution<double> u(kIntervalLo, kIntervalHi);
  std::vector<SectionPoint> starts;
  for (std::size_t s = 0; s < bs.starts; ++s) {
    const double x = u(rng);
    const double y = u(rng);
    starts.push_back({x, y});
  }
  auto csv = open_output(ctx.out / "birkhoff.csv");
  csv << "observable,start,x0,y0,average,std_error,total_time,returns\n";
  json entries = json::array();
  for (const auto& e : select_dictionary(bs.observables)) {
    for (std::size_t s = 0; s < starts.size(); ++s) {
      const SuspensionAverage a =
          birkhoff_average_suspension(e.ambient, starts[s], bs.T, m, bs.quad_tol);
      csv << '"' << e.name << "\"," << s << ',' << starts[s].x << ',' << starts[s].y << ','
          << a.average << ',' << a.std_error << ',' << a.total_time << ',' << a.returns << '\n';
      entries.push_back({{"observable", e.name},
                         {"start", {starts[s].x, starts[s].y}},
                         {"average", a.average},
                         {"std_error", a.std_error},
                         {"total_time", a.total_time},
                         {"returns", a.returns},
                         {"disc_hits", a.disc_hits}});
      std::cout << e.name << " start " << s << ": " << a.average << " ± " << a.std_error << '\n';
    }
  }
  write_json(ctx.out / "birkhoff.json", {{"T", bs.T}, {"seed", ctx.cfg.seed}, {"runs", entries}});
  return kOk;
}

int cmd_diagnostics(const Context& ctx) {
  const DiagnosticsSettings& ds = ctx.cfg.diagnostics;
  const auto rows =
      convergence_diagnostics(ctx.cfg.base, dictionary_entry(ds.observable).section, ds.m_max,
                              ds.n_list, ds.bad_set_N, ctx.cfg.numerics);
  auto csv = open_output(ctx.out / "diagnostics.csv");
  write_diagnostics_csv(csv, rows);
  return kOk;
}

int cmd_sweep(const Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  const StabilityReport report = run_experiment(ctx.cfg);
  write_json(ctx.out / "report.json", to_json(report));
  auto csv = open_output(ctx.out / "report.csv");
  write_report_csv(csv, report);
  json rows = json::array();
  for (const auto& r : report.rows) rows.push_back({{"delta", r.delta}, {"seconds", r.runtime_seconds}});
  write_json(ctx.out / "timings.json", {{"total_seconds", seconds_since(t0)}, {"rows", rows}});
  std::cout << "sweep: " << report.rows.size() << " rows, " << report.failures
            << " failed; trends l1=" << report.l1_trend << " section=" << report.section_trend
            << " flow=" << report.flow_trend << '\n';
  return report.failures ? kItemFailures : kOk;
}

int cmd_ode(const Context& ctx) {
  const OdeRunSettings& rs = ctx.cfg.ode_run;
  const ode::OdeParams& p = ctx.cfg.ode;
  const ode::Trajectory traj = ode::integrate_timed(rs.start, p, rs.T, rs.h);
  auto csv = open_output(ctx.out / "trajectory.csv");
  ode::write_trajectory_csv(csv, traj);
  const ode::Eigenvalues e = ode::origin_eigenvalues(p);
  const double z_avg = ode::birkhoff_average_ode([](const ode::State3& s) { return s.z; },
                                                 rs.start, p, rs.T, rs.h,
                                                 rs.burn_in_fraction * rs.T);
  write_json(ctx.out / "ode.json", {{"eigenvalues", {e.l1, e.l2, e.l3}},
                                    {"divergence", ode::divergence(p)},
                                    {"z_average", z_avg},
                                    {"samples", traj.t.size()}});
  std::cout << "ode: eigenvalues " << e.l1 << ' ' << e.l2 << ' ' << e.l3 << ", <z> = " << z_avg
            << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric Lorenz SRB laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::string level = "warn";

  struct Entry {
    const char* name;
    const char* help;
    int (*fn)(const Context&);
  };
  const std::vector<Entry> commands{
      {"density", "invariant density of the interval map", cmd_density},
      {"lift", "sandwich brackets of the dictionary on the section", cmd_lift},
      {"roof", "mean return time with tail bounds", cmd_roof},
      {"flow-avg", "flow SRB integrals of the dictionary", cmd_flow_avg},
      {"birkhoff", "time averages along the suspension flow", cmd_birkhoff},
      {"diagnostics", "sandwich convergence and bad-set tables", cmd_diagnostics},
      {"sweep", "statistical stability sweep", cmd_sweep},
      {"ode", "Lorenz ODE trajectory and facts", cmd_ode},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (defaults to output.dir)");
    sub->add_option("--log-level", level, "debug, info, warn or error");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (level == "debug") log::set_level(log::Level::Debug);
  else if (level == "info") log::set_level(log::Level::Info);
  else if (level == "error") log::set_level(log::Level::Error);

  Context ctx;
  try {
    ctx.cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  ctx.out = out_dir.empty() ? ctx.cfg.output_dir : std::filesystem::path(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(ctx.out, ec);
  if (ec) {
    std::cerr << "cannot create " << ctx.out << ": " << ec.message() << '\n';
    return kConfigError;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    try {
      return commands[i].fn(ctx);
    } catch (const ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return kConfigError;
    } catch (const std::exception& e) {
      std::cerr << commands[i].name << " failed: " << e.what() << '\n';
      return kItemFailures;
    }
  }
  return kConfigError;
}
