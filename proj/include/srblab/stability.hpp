#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "srblab/config.hpp"
#include "srblab/observables.hpp"

namespace srb {

enum class Level { Section, Flow };

/// SRB integral of one observable with its numerical error bar.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct ObservableDiscrepancy {
  std::string name;
  Estimate first;
  Estimate second;
  double difference = 0.0;  // |first - second|
  double error = 0.0;       // first.error + second.error
};

struct Discrepancy {
  double value = 0.0;  // max over the dictionary
  double error = 0.0;  // enclosure half-width of that max
  std::string argmax;
  std::vector<ObservableDiscrepancy> entries;
};

/// Integral of every dictionary entry at one level for one model.
std::vector<Estimate> srb_integrals(const ModelParams& model, const UlamDensity& density,
                                    const std::vector<DictionaryEntry>& dictionary, Level level,
                                    const NumericalSettings& settings);

Discrepancy combine(const std::vector<DictionaryEntry>& dictionary,
                    const std::vector<Estimate>& first, const std::vector<Estimate>& second);

/// max over the dictionary of |∫phi dμ_1 - ∫phi dμ_2| at the requested level.
Discrepancy weak_star_discrepancy(const ModelParams& first, const ModelParams& second,
                                  const std::vector<DictionaryEntry>& dictionary, Level level,
                                  const NumericalSettings& settings);

struct DiagnosticRow {
  std::size_t n = 0;
  int m = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> cauchy_increment;  // |U(m+1) - U(m)|
  double bad_set_bound = 0.0;              // C1 Σ_{i<m} (2/c)^i e^{-N/C}
  double bad_set_empirical = 0.0;          // Lebesgue measure of ∪_{i<m} {τ∘P^i > N}
};

/// C1 Σ_{i<m} (2/c)^i e^{-N/C} with C1 = 2 (vertical leaves of unit length).
double bad_set_bound(int m, double c, double C, double N);

std::vector<DiagnosticRow> convergence_diagnostics(const ModelParams& model,
                                                   const SectionObservable& phi, int m_max,
                                                   const std::vector<std::size_t>& n_list,
                                                   double bad_set_N,
                                                   const NumericalSettings& settings);

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticRow>& rows);

struct StabilityRow {
  double delta = 0.0;
  double parameter = 0.0;  // perturbed value along the axis
  std::string status = "ok";
  std::string message;
  Estimate l1;  // L1 density distance, error = |d_n - d_{n/2}| + 2 tol
  Discrepancy section;
  Discrepancy flow;
  double section_refinement = 0.0;  // |D_n - D_{n/2}|, already added to section.error
  double flow_refinement = 0.0;
  double density_sup = 0.0;
  std::vector<LiftBracket> section_brackets;  // perturbed model, per observable
  std::vector<Estimate> flow_values;
  bool transitivity_assumed = false;
  double runtime_seconds = 0.0;  // wall clock; kept out of the report JSON
};

struct StabilityReport {
  nlohmann::json config;
  std::vector<StabilityRow> rows;  // deltas in config order, then delta = 0
  double density_bound = 0.0;      // max sup-density across all rows
  bool l1_trend = false;
  bool section_trend = false;
  bool flow_trend = false;
  std::size_t failures = 0;
};

/// Every delta row is evaluated independently; failures are recorded in the
/// row and never abort the sweep.
StabilityReport run_experiment(const ExperimentConfig& cfg);

/// values[k+1] <= values[k] + errors[k] + errors[k+1] for consecutive entries.
bool nonincreasing_within_error(const std::vector<double>& values,
                                const std::vector<double>& errors);

nlohmann::json to_json(const LiftBracket& b);
nlohmann::json to_json(const StabilityReport& report);
void write_report_csv(std::ostream& os, const StabilityReport& report);

}  // namespace srb
