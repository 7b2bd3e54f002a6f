#include "srblab/config.hpp"

#include <fstream>
#include <set>

#include "srblab/errors.hpp"
#include "srblab/observables.hpp"

namespace srb {

using nlohmann::json;

namespace {

const std::pair<Axis, const char*> kAxisNames[] = {
    {Axis::Gamma, "gamma"}, {Axis::AmpRatio, "amp_ratio"}, {Axis::Disc, "disc"},
    {Axis::Rho, "rho"},     {Axis::Off, "off"},            {Axis::Tau0, "tau0"},
    {Axis::Lambda1, "lambda1"}};

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

std::string to_string(Axis axis) {
  for (const auto& [a, name] : kAxisNames)
    if (a == axis) return name;
  return "?";
}

Axis parse_axis(const std::string& name) {
  for (const auto& [a, n] : kAxisNames)
    if (name == n) return a;
  throw ConfigError("unknown perturbation axis '" + name + "'");
}

ModelParams perturb(const ModelParams& base, Axis axis, double delta) {
  ModelParams m = base;
  switch (axis) {
    case Axis::Gamma: {
      // Perturb gamma at fixed amp_ratio so the branch family stays comparable.
      const double ratio = base.map.amp_ratio();
      m.map = MapParams::from_ratio(base.map.gamma + delta, ratio, base.map.disc);
      break;
    }
    case Axis::AmpRatio:
      m.map = MapParams::from_ratio(base.map.gamma, base.map.amp_ratio() + delta, base.map.disc);
      break;
    case Axis::Disc:
      m.map.disc += delta;
      m.roof.disc = m.map.disc;
      break;
    case Axis::Rho: m.skew.rho += delta; break;
    case Axis::Off: m.skew.off += delta; break;
    case Axis::Tau0: m.roof.tau0 += delta; break;
    case Axis::Lambda1: m.roof.lambda1 += delta; break;
  }
  return m;
}

ExperimentConfig parse_config(const json& doc) {
  reject_unknown(doc,
                 {"model", "ode", "perturbation", "numerics", "observables", "seed", "birkhoff",
                  "diagnostics", "ode_run", "output"},
                 "config");
  ExperimentConfig cfg;

  const json ode_j = doc.value("ode", json::object());
  reject_unknown(ode_j, {"a", "b", "c"}, "ode");
  cfg.ode.a = get_or(ode_j, "a", cfg.ode.a);
  cfg.ode.b = get_or(ode_j, "b", cfg.ode.b);
  cfg.ode.c = get_or(ode_j, "c", cfg.ode.c);
  try {
    cfg.base.eigen = ode::origin_eigenvalues(cfg.ode);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }

  const json model = doc.value("model", json::object());
  reject_unknown(model, {"map", "skew", "roof"}, "model");
  const json map_j = model.value("map", json::object());
  reject_unknown(map_j, {"gamma", "amp_ratio", "disc"}, "model.map");
  cfg.base.map = MapParams::from_ratio(get_or(map_j, "gamma", 0.6), get_or(map_j, "amp_ratio", 1.0),
                                       get_or(map_j, "disc", 0.0));
  const json skew_j = model.value("skew", json::object());
  reject_unknown(skew_j, {"rho", "off"}, "model.skew");
  cfg.base.skew.rho = get_or(skew_j, "rho", 0.25);
  cfg.base.skew.off = get_or(skew_j, "off", 0.25);
  const json roof_j = model.value("roof", json::object());
  reject_unknown(roof_j, {"lambda1", "tau0"}, "model.roof");
  cfg.base.roof.lambda1 = get_or(roof_j, "lambda1", 11.83);
  cfg.base.roof.tau0 = get_or(roof_j, "tau0", 0.5);
  cfg.base.roof.disc = cfg.base.map.disc;

  const json pert = doc.value("perturbation", json::object());
  reject_unknown(pert, {"axis", "deltas"}, "perturbation");
  cfg.axis = parse_axis(get_or<std::string>(pert, "axis", "gamma"));
  cfg.deltas = get_or(pert, "deltas", cfg.deltas);

  const json num = doc.value("numerics", json::object());
  reject_unknown(num, {"n", "density_tol", "max_iterations", "section", "flow"}, "numerics");
  NumericalSettings& ns = cfg.numerics;
  ns.n = get_or(num, "n", ns.n);
  ns.density.tol = get_or(num, "density_tol", ns.density.tol);
  ns.density.max_iterations = get_or(num, "max_iterations", ns.density.max_iterations);
  const std::set<std::string> lift_keys{"tol", "fiber_samples", "quad_points", "max_depth"};
  auto read_lift = [&](const json& j, LiftOptions& lo) {
    lo.tol = get_or(j, "tol", lo.tol);
    lo.fiber_samples = get_or(j, "fiber_samples", lo.fiber_samples);
    lo.quad_points = get_or(j, "quad_points", lo.quad_points);
    lo.max_depth = get_or(j, "max_depth", lo.max_depth);
  };
  const json sec = num.value("section", json::object());
  reject_unknown(sec, lift_keys, "numerics.section");
  read_lift(sec, ns.section_lift);
  const json flow = num.value("flow", json::object());
  std::set<std::string> flow_keys = lift_keys;
  flow_keys.insert({"truncation", "quad_tol"});
  reject_unknown(flow, flow_keys, "numerics.flow");
  read_lift(flow, ns.flow.lift);
  ns.flow.truncation = get_or(flow, "truncation", ns.flow.truncation);
  ns.flow.quad_tol = get_or(flow, "quad_tol", ns.flow.quad_tol);

  cfg.observables = get_or(doc, "observables", cfg.observables);
  cfg.seed = get_or(doc, "seed", cfg.seed);

  const json bk = doc.value("birkhoff", json::object());
  reject_unknown(bk, {"starts", "T", "quad_tol", "observables"}, "birkhoff");
  cfg.birkhoff.starts = get_or(bk, "starts", cfg.birkhoff.starts);
  cfg.birkhoff.T = get_or(bk, "T", cfg.birkhoff.T);
  cfg.birkhoff.quad_tol = get_or(bk, "quad_tol", cfg.birkhoff.quad_tol);
  cfg.birkhoff.observables = get_or(bk, "observables", cfg.birkhoff.observables);

  const json dg = doc.value("diagnostics", json::object());
  reject_unknown(dg, {"observable", "m_max", "n_list", "bad_set_N"}, "diagnostics");
  cfg.diagnostics.observable = get_or(dg, "observable", cfg.diagnostics.observable);
  cfg.diagnostics.m_max = get_or(dg, "m_max", cfg.diagnostics.m_max);
  cfg.diagnostics.n_list = get_or(dg, "n_list", cfg.diagnostics.n_list);
  cfg.diagnostics.bad_set_N = get_or(dg, "bad_set_N", cfg.diagnostics.bad_set_N);

  const json orun = doc.value("ode_run", json::object());
  reject_unknown(orun, {"start", "T", "h", "burn_in_fraction"}, "ode_run");
  if (orun.contains("start")) {
    const auto s = get_or<std::vector<double>>(orun, "start", {});
    if (s.size() != 3) throw ConfigError("ode_run.start needs three coordinates");
    cfg.ode_run.start = {s[0], s[1], s[2]};
  }
  cfg.ode_run.T = get_or(orun, "T", cfg.ode_run.T);
  cfg.ode_run.h = get_or(orun, "h", cfg.ode_run.h);
  cfg.ode_run.burn_in_fraction = get_or(orun, "burn_in_fraction", cfg.ode_run.burn_in_fraction);

  const json out = doc.value("output", json::object());
  reject_unknown(out, {"dir"}, "output");
  cfg.output_dir = get_or<std::string>(out, "dir", cfg.output_dir.string());

  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.deltas.empty()) throw ConfigError("perturbation.deltas must not be empty");
  for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
    if (!(cfg.deltas[i] > 0.0)) throw ConfigError("deltas must be positive");
    if (i > 0 && !(cfg.deltas[i] < cfg.deltas[i - 1])) {
      throw ConfigError("deltas must be strictly decreasing toward 0");
    }
  }
  if (cfg.numerics.n < 4 || cfg.numerics.n % 2 != 0) {
    throw ConfigError("numerics.n must be an even number >= 4");
  }
  if (!(cfg.numerics.density.tol > 0.0) || !(cfg.numerics.section_lift.tol > 0.0) ||
      !(cfg.numerics.flow.lift.tol > 0.0) || !(cfg.numerics.flow.quad_tol > 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
  if (cfg.numerics.section_lift.fiber_samples < 2 || cfg.numerics.flow.lift.fiber_samples < 2) {
    throw ConfigError("fiber_samples must be at least 2");
  }
  if (cfg.numerics.section_lift.quad_points < 1 || cfg.numerics.flow.lift.quad_points < 1) {
    throw ConfigError("quad_points must be at least 1");
  }
  if (!(cfg.numerics.flow.truncation > 0.0)) throw ConfigError("flow.truncation must be positive");
  if (cfg.observables.empty()) throw ConfigError("observable dictionary must not be empty");
  for (const auto& name : cfg.observables) dictionary_entry(name);
  for (const auto& name : cfg.birkhoff.observables) dictionary_entry(name);
  dictionary_entry(cfg.diagnostics.observable);
  if (cfg.diagnostics.m_max < 2) throw ConfigError("diagnostics.m_max must be >= 2");

  std::vector<double> all = cfg.deltas;
  all.push_back(0.0);
  for (double d : all) {
    const ModelParams m = perturb(cfg.base, cfg.axis, d);
    try {
      validate(m);
    } catch (const ParameterError& e) {
      throw ConfigError("model at delta=" + std::to_string(d) + " is inadmissible: " + e.what());
    }
    if (!is_expanding(m.map)) {
      throw ConfigError("model at delta=" + std::to_string(d) +
                        " is not expanding (min slope " + std::to_string(m.map.min_slope()) + ")");
    }
  }
}

json to_json(const ModelParams& model) {
  return {{"map", {{"gamma", model.map.gamma}, {"amp_ratio", model.map.amp_ratio()},
                   {"disc", model.map.disc}}},
          {"skew", {{"rho", model.skew.rho}, {"off", model.skew.off}}},
          {"roof", {{"lambda1", model.roof.lambda1}, {"tau0", model.roof.tau0}}}};
}

json to_json(const ExperimentConfig& cfg) {
  const NumericalSettings& ns = cfg.numerics;
  auto lift_json = [](const LiftOptions& lo) {
    return json{{"tol", lo.tol},
                {"fiber_samples", lo.fiber_samples},
                {"quad_points", lo.quad_points},
                {"max_depth", lo.max_depth}};
  };
  json flow = lift_json(ns.flow.lift);
  flow["truncation"] = ns.flow.truncation;
  flow["quad_tol"] = ns.flow.quad_tol;
  return {
      {"model", to_json(cfg.base)},
      {"ode", {{"a", cfg.ode.a}, {"b", cfg.ode.b}, {"c", cfg.ode.c}}},
      {"perturbation", {{"axis", to_string(cfg.axis)}, {"deltas", cfg.deltas}}},
      {"numerics",
       {{"n", ns.n},
        {"density_tol", ns.density.tol},
        {"max_iterations", ns.density.max_iterations},
        {"section", lift_json(ns.section_lift)},
        {"flow", flow}}},
      {"observables", cfg.observables},
      {"seed", cfg.seed},
      {"birkhoff",
       {{"starts", cfg.birkhoff.starts},
        {"T", cfg.birkhoff.T},
        {"quad_tol", cfg.birkhoff.quad_tol},
        {"observables", cfg.birkhoff.observables}}},
      {"diagnostics",
       {{"observable", cfg.diagnostics.observable},
        {"m_max", cfg.diagnostics.m_max},
        {"n_list", cfg.diagnostics.n_list},
        {"bad_set_N", cfg.diagnostics.bad_set_N}}},
      {"ode_run",
       {{"start", {cfg.ode_run.start.x, cfg.ode_run.start.y, cfg.ode_run.start.z}},
        {"T", cfg.ode_run.T},
        {"h", cfg.ode_run.h},
        {"burn_in_fraction", cfg.ode_run.burn_in_fraction}}},
      {"output", {{"dir", cfg.output_dir.string()}}},
  };
}

}  // namespace srb
