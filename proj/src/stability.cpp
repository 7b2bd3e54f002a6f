#include "srblab/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "srblab/errors.hpp"
#include "srblab/log.hpp"
#include "srblab/parallel.hpp"

namespace srb {

using nlohmann::json;

namespace {

struct LevelResult {
  std::vector<Estimate> estimates;
  std::vector<LiftBracket> brackets;  // section level only
};

LevelResult evaluate_level(const ModelParams& model, const UlamDensity& density,
                           const std::vector<DictionaryEntry>& dictionary, Level level,
                           const NumericalSettings& settings) {
  const std::size_t count = dictionary.size();
  LevelResult out;
  out.estimates.resize(count);
  if (level == Level::Section) out.brackets.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const DictionaryEntry& e = dictionary[i];
    if (level == Level::Section) {
      const LiftResult r =
          lift_integral(e.section, model.map, model.skew, density, settings.section_lift);
      if (!r.converged) {
        throw ConvergenceError("section bracket for '" + e.name + "' did not converge",
                               r.bracket.gap());
      }
      out.estimates[i] = {r.bracket.center(), 0.5 * r.bracket.gap() + r.quad_error};
      out.brackets[i] = r.bracket;
    } else {
      const FlowIntegral r = flow_integral(e.ambient, model, density, settings.flow);
      if (!r.converged) {
        throw ConvergenceError("flow bracket for '" + e.name + "' did not converge", r.error);
      }
      out.estimates[i] = {r.value, r.error};
    }
  }
  return out;
}

// Preimage of [a, b] under the branch of f on the given side of disc.
std::optional<std::pair<double, double>> branch_preimage(double a, double b, const MapParams& mp,
                                                         bool right) {
  const double lo_img = right ? kIntervalLo : eval_f(kIntervalLo, mp);
  const double hi_img = right ? eval_f(kIntervalHi, mp) : kIntervalHi;
  a = std::max(a, lo_img);
  b = std::min(b, hi_img);
  if (!(a < b)) return std::nullopt;
  auto inv = [&](double y) {
    return right ? mp.disc + std::pow((y + 0.5) / mp.amp, 1.0 / mp.gamma)
                 : mp.disc - std::pow((0.5 - y) / mp.amp, 1.0 / mp.gamma);
  };
  return std::make_pair(inv(a), inv(b));
}

// Lebesgue measure of the union over i < m of f^{-i}((disc - eps, disc + eps)).
double union_preimage_measure(const MapParams& mp, double eps, int m) {
  if (m <= 0 || !(eps > 0.0)) return 0.0;
  std::vector<std::pair<double, double>> all;
  std::vector<std::pair<double, double>> layer{
      {std::max(kIntervalLo, mp.disc - eps), std::min(kIntervalHi, mp.disc + eps)}};
  for (int i = 0; i < m; ++i) {
    all.insert(all.end(), layer.begin(), layer.end());
    if (i + 1 == m) break;
    std::vector<std::pair<double, double>> next;
    for (const auto& [a, b] : layer) {
      for (bool right : {false, true}) {
        if (auto p = branch_preimage(a, b, mp, right)) next.push_back(*p);
      }
    }
    layer = std::move(next);
  }
  std::sort(all.begin(), all.end());
  double total = 0.0;
  double cur_lo = all.front().first, cur_hi = all.front().second;
  for (const auto& [a, b] : all) {
    if (a > cur_hi) {
      total += cur_hi - cur_lo;
      cur_lo = a;
      cur_hi = b;
    } else {
      cur_hi = std::max(cur_hi, b);
    }
  }
  return total + (cur_hi - cur_lo);
}

double axis_value(const ModelParams& m, Axis axis) {
  switch (axis) {
    case Axis::Gamma: return m.map.gamma;
    case Axis::AmpRatio: return m.map.amp_ratio();
    case Axis::Disc: return m.map.disc;
    case Axis::Rho: return m.skew.rho;
    case Axis::Off: return m.skew.off;
    case Axis::Tau0: return m.roof.tau0;
    case Axis::Lambda1: return m.roof.lambda1;
  }
  return 0.0;
}

// Everything a row needs from one model at resolutions n and n/2.
struct ModelEvaluation {
  UlamDensity fine;
  UlamDensity coarse;
  LevelResult section_fine, section_coarse;
  LevelResult flow_fine, flow_coarse;
};

ModelEvaluation evaluate_model(const ModelParams& model,
                               const std::vector<DictionaryEntry>& dictionary,
                               const NumericalSettings& settings) {
  ModelEvaluation ev;
  ev.fine = invariant_density(model.map, settings.n, settings.density);
  ev.coarse = invariant_density(model.map, settings.n / 2, settings.density);
  ev.section_fine = evaluate_level(model, ev.fine, dictionary, Level::Section, settings);
  ev.section_coarse = evaluate_level(model, ev.coarse, dictionary, Level::Section, settings);
  ev.flow_fine = evaluate_level(model, ev.fine, dictionary, Level::Flow, settings);
  ev.flow_coarse = evaluate_level(model, ev.coarse, dictionary, Level::Flow, settings);
  return ev;
}

Discrepancy refined(const std::vector<DictionaryEntry>& dictionary, const LevelResult& base_fine,
                    const LevelResult& base_coarse, const LevelResult& pert_fine,
                    const LevelResult& pert_coarse, double& refinement) {
  Discrepancy fine = combine(dictionary, base_fine.estimates, pert_fine.estimates);
  const Discrepancy coarse = combine(dictionary, base_coarse.estimates, pert_coarse.estimates);
  refinement = std::abs(fine.value - coarse.value);
  fine.error += refinement;
  return fine;
}

json estimate_json(const Estimate& e) { return {{"value", e.value}, {"error", e.error}}; }

json discrepancy_json(const Discrepancy& d) {
  json entries = json::array();
  for (const auto& e : d.entries) {
    entries.push_back({{"name", e.name},
                       {"first", estimate_json(e.first)},
                       {"second", estimate_json(e.second)},
                       {"difference", e.difference},
                       {"error", e.error}});
  }
  return {{"value", d.value}, {"error", d.error}, {"argmax", d.argmax}, {"entries", entries}};
}

}  // namespace

std::vector<Estimate> srb_integrals(const ModelParams& model, const UlamDensity& density,
                                    const std::vector<DictionaryEntry>& dictionary, Level level,
                                    const NumericalSettings& settings) {
  return evaluate_level(model, density, dictionary, level, settings).estimates;
}

Discrepancy combine(const std::vector<DictionaryEntry>& dictionary,
                    const std::vector<Estimate>& first, const std::vector<Estimate>& second) {
  if (dictionary.empty()) throw ParameterError("observable dictionary is empty");
  if (first.size() != dictionary.size() || second.size() != dictionary.size()) {
    throw ParameterError("estimate count does not match the dictionary");
  }
  Discrepancy d;
  double lo_max = -std::numeric_limits<double>::infinity();
  double hi_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dictionary.size(); ++i) {
    ObservableDiscrepancy e;
    e.name = dictionary[i].name;
    e.first = first[i];
    e.second = second[i];
    e.difference = std::abs(first[i].value - second[i].value);
    e.error = first[i].error + second[i].error;
    if (i == 0 || e.difference > d.value) {
      d.value = e.difference;
      d.argmax = e.name;
    }
    lo_max = std::max(lo_max, std::max(0.0, e.difference - e.error));
    hi_max = std::max(hi_max, e.difference + e.error);
    d.entries.push_back(std::move(e));
  }
  // The true max lies in [lo_max, hi_max]; report the half-width around value.
  d.error = std::max(hi_max - d.value, d.value - lo_max);
  return d;
}

Discrepancy weak_star_discrepancy(const ModelParams& first, const ModelParams& second,
                                  const std::vector<DictionaryEntry>& dictionary, Level level,
                                  const NumericalSettings& settings) {
  const UlamDensity d1 = invariant_density(first.map, settings.n, settings.density);
  const UlamDensity d2 = invariant_density(second.map, settings.n, settings.density);
  return combine(dictionary, srb_integrals(first, d1, dictionary, level, settings),
                 srb_integrals(second, d2, dictionary, level, settings));
}

double bad_set_bound(int m, double c, double C, double N) {
  if (!(c > 0.0) || !(C > 0.0)) throw ParameterError("bad-set bound needs c > 0 and C > 0");
  constexpr double kC1 = 2.0;
  double sum = 0.0;
  for (int i = 0; i < m; ++i) sum += std::pow(2.0 / c, i);
  return kC1 * sum * std::exp(-N / C);
}

std::vector<DiagnosticRow> convergence_diagnostics(const ModelParams& model,
                                                   const SectionObservable& phi, int m_max,
                                                   const std::vector<std::size_t>& n_list,
                                                   double bad_set_N,
                                                   const NumericalSettings& settings) {
  if (m_max < 2) throw ParameterError("m_max must be at least 2");
  validate(model);
  const double c = model.map.min_slope();
  const double C = retime_constant(model.roof);
  // τ > N exactly when |x - disc| < exp(-(N - tau0) lambda1).
  const double eps = bad_set_N > model.roof.tau0
                         ? std::exp(-(bad_set_N - model.roof.tau0) * model.roof.lambda1)
                         : 1.0;

  LiftOptions opts = settings.section_lift;
  opts.tol = std::numeric_limits<double>::min();
  opts.max_depth = m_max;
  opts.min_depth = m_max;

  std::vector<DiagnosticRow> rows;
  for (std::size_t n : n_list) {
    const UlamDensity density = invariant_density(model.map, n, settings.density);
    const LiftResult r = lift_integral(phi, model.map, model.skew, density, opts);
    const auto& h = r.history;
    for (std::size_t k = 0; k < h.size(); ++k) {
      DiagnosticRow row;
      row.n = n;
      row.m = h[k].m;
      row.lower = h[k].lower;
      row.upper = h[k].upper;
      if (k + 1 < h.size()) row.cauchy_increment = std::abs(h[k + 1].upper - h[k].upper);
      row.bad_set_bound = bad_set_bound(row.m, c, C, bad_set_N);
      row.bad_set_empirical = union_preimage_measure(model.map, eps, row.m);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticRow>& rows) {
  os.precision(17);
  os << "n,m,lower,upper,gap,cauchy_increment,bad_set_bound,bad_set_empirical\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.m << ',' << r.lower << ',' << r.upper << ',' << (r.upper - r.lower)
       << ',';
    if (r.cauchy_increment) os << *r.cauchy_increment;
    os << ',' << r.bad_set_bound << ',' << r.bad_set_empirical << '\n';
  }
}

bool nonincreasing_within_error(const std::vector<double>& values,
                                const std::vector<double>& errors) {
  if (values.size() != errors.size()) throw ParameterError("values and errors differ in length");
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    if (values[k + 1] > values[k] + errors[k] + errors[k + 1]) return false;
  }
  return true;
}

StabilityReport run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const std::vector<DictionaryEntry> dictionary = select_dictionary(cfg.observables);
  const NumericalSettings& ns = cfg.numerics;

  StabilityReport report;
  report.config = to_json(cfg);

  log::info("evaluating base model");
  std::optional<ModelEvaluation> base;
  std::string base_error;
  try {
    base = evaluate_model(cfg.base, dictionary, ns);
  } catch (const Error& e) {
    base_error = std::string("base model: ") + e.what();
    log::error(base_error);
  }
  const double l1_floor = 2.0 * ns.density.tol;

  std::vector<double> deltas = cfg.deltas;
  deltas.push_back(0.0);
  report.rows.resize(deltas.size());

  // One slot per delta; the slots are merged in config order below.
  parallel_for(deltas.size(), [&](std::size_t k) {
    const auto t0 = std::chrono::steady_clock::now();
    StabilityRow& row = report.rows[k];
    row.delta = deltas[k];
    const ModelParams model = perturb(cfg.base, cfg.axis, row.delta);
    row.parameter = axis_value(model, cfg.axis);
    row.transitivity_assumed = model.map.amp_ratio() < 1.0;
    try {
      if (!base) throw Error(base_error);
      const ModelEvaluation pert =
          row.delta == 0.0 ? *base : evaluate_model(model, dictionary, ns);
      row.density_sup = pert.fine.sup();
      const double l1_fine = l1_distance(base->fine, pert.fine);
      const double l1_coarse = l1_distance(base->coarse, pert.coarse);
      row.l1 = {l1_fine, std::abs(l1_fine - l1_coarse) + l1_floor};
      row.section = refined(dictionary, base->section_fine, base->section_coarse,
                            pert.section_fine, pert.section_coarse, row.section_refinement);
      row.flow = refined(dictionary, base->flow_fine, base->flow_coarse, pert.flow_fine,
                         pert.flow_coarse, row.flow_refinement);
      row.section_brackets = pert.section_fine.brackets;
      row.flow_values = pert.flow_fine.estimates;
    } catch (const Error& e) {
      row.status = "failed";
      row.message = e.what();
      log::error("delta=" + std::to_string(row.delta) + ": " + e.what());
    }
    row.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }, 1);

  report.density_bound = base ? base->fine.sup() : 0.0;
  std::vector<double> l1v, l1e, sv, se, fv, fe;
  for (const auto& row : report.rows) {
    if (row.status != "ok") {
      ++report.failures;
      continue;
    }
    report.density_bound = std::max(report.density_bound, row.density_sup);
    l1v.push_back(row.l1.value);
    l1e.push_back(row.l1.error);
    sv.push_back(row.section.value);
    se.push_back(row.section.error);
    fv.push_back(row.flow.value);
    fe.push_back(row.flow.error);
  }
  report.l1_trend = report.failures == 0 && nonincreasing_within_error(l1v, l1e);
  report.section_trend = report.failures == 0 && nonincreasing_within_error(sv, se);
  report.flow_trend = report.failures == 0 && nonincreasing_within_error(fv, fe);
  return report;
}

json to_json(const LiftBracket& b) {
  json j{{"m", b.m}, {"lower", b.lower}, {"upper", b.upper}, {"gap_bound", nullptr}};
  if (b.gap_bound) j["gap_bound"] = *b.gap_bound;
  return j;
}

json to_json(const StabilityReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json brackets = json::array();
    for (const auto& b : r.section_brackets) brackets.push_back(to_json(b));
    json flows = json::array();
    for (const auto& e : r.flow_values) flows.push_back(estimate_json(e));
    rows.push_back({{"delta", r.delta},
                    {"parameter", r.parameter},
                    {"status", r.status},
                    {"message", r.message},
                    {"l1", estimate_json(r.l1)},
                    {"section", discrepancy_json(r.section)},
                    {"flow", discrepancy_json(r.flow)},
                    {"section_refinement", r.section_refinement},
                    {"flow_refinement", r.flow_refinement},
                    {"density_sup", r.density_sup},
                    {"section_brackets", brackets},
                    {"flow_values", flows},
                    {"transitivity_assumed", r.transitivity_assumed}});
  }
  return {{"config", report.config},
          {"rows", rows},
          {"density_bound", report.density_bound},
          {"trends",
           {{"l1", report.l1_trend},
            {"section", report.section_trend},
            {"flow", report.flow_trend}}},
          {"failures", report.failures}};
}

void write_report_csv(std::ostream& os, const StabilityReport& report) {
  os.precision(17);
  os << "delta,parameter,status,l1,l1_error,section,section_error,section_argmax,flow,flow_error,"
        "flow_argmax,density_sup\n";
  for (const auto& r : report.rows) {
    os << r.delta << ',' << r.parameter << ',' << r.status << ',' << r.l1.value << ','
       << r.l1.error << ',' << r.section.value << ',' << r.section.error << ",\""
       << r.section.argmax << "\"," << r.flow.value << ',' << r.flow.error << ",\""
       << r.flow.argmax << "\"," << r.density_sup << '\n';
  }
}

}  // namespace srb
