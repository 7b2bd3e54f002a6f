#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "srblab/interval_map.hpp"
#include "srblab/ode.hpp"
#include "srblab/section_map.hpp"
#include "srblab/suspension.hpp"

namespace srb {

/// Resolution and tolerance knobs shared by every experiment stage.
struct NumericalSettings {
  std::size_t n = 4096;
  DensityOptions density;
  LiftOptions section_lift{1e-6, 64, 4, 60, 0};
  FlowOptions flow;
};

struct BirkhoffSettings {
  std::size_t starts = 5;
  double T = 1e5;
  double quad_tol = 1e-8;
  std::vector<std::string> observables{"z"};
};

struct DiagnosticsSettings {
  std::string observable = "y";
  int m_max = 12;
  std::vector<std::size_t> n_list{512, 1024, 2048, 4096};
  double bad_set_N = 2.0;
};

struct OdeRunSettings {
  ode::State3 start{1.0, 1.0, 20.0};
  double T = 100.0;
  double h = 0.005;
  double burn_in_fraction = 0.05;
};

/// Axes along which the base model can be perturbed.
enum class Axis { Gamma, AmpRatio, Disc, Rho, Off, Tau0, Lambda1 };

std::string to_string(Axis axis);
Axis parse_axis(const std::string& name);

struct ExperimentConfig {
  ModelParams base;
  ode::OdeParams ode;
  Axis axis = Axis::Gamma;
  std::vector<double> deltas{0.02, 0.01, 0.005, 0.0025, 0.00125};
  NumericalSettings numerics;
  std::vector<std::string> observables{"1", "x", "y", "z", "sin(pi x)", "cos(pi x)", "x^2", "x*y", "exp(-z)"};
  std::uint64_t seed = 20240101;
  BirkhoffSettings birkhoff;
  DiagnosticsSettings diagnostics;
  OdeRunSettings ode_run;
  std::filesystem::path output_dir = "out";
};

/// Base model moved by `delta` along `axis` (disc moves map and roof together).
ModelParams perturb(const ModelParams& base, Axis axis, double delta);

/// Parses a config document; missing keys take the defaults above. Throws
/// ConfigError on malformed input or inadmissible parameters.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks deltas (strictly decreasing, positive), observable names, and that
/// every perturbed model satisfies the module invariants including expansion.
void validate(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const ModelParams& model);

}  // namespace srb
