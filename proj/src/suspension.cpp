#include "srblab/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "srblab/errors.hpp"
#include "srblab/log.hpp"
#include "srblab/quadrature.hpp"

namespace srb {

void validate(const RoofParams& rp) {
  if (!(rp.lambda1 > 0.0)) throw ParameterError("lambda1 must be positive");
  if (!(rp.tau0 >= 0.0)) throw ParameterError("tau0 must be nonnegative");
  if (!(rp.disc > kIntervalLo && rp.disc < kIntervalHi)) {
    throw ParameterError("roof discontinuity must lie inside I");
  }
}

double retime_constant(const RoofParams& rp) {
  // -log|x - disc| >= -log(1/2 + |disc|) > 0 on Σ, which absorbs tau0.
  return 1.0 / rp.lambda1 + rp.tau0 / -std::log(0.5 + std::abs(rp.disc));
}

double linear_time(double x, const RoofParams& rp) {
  if (x == rp.disc) throw DomainError("return time is infinite on the discontinuity line");
  return -std::log(std::abs(x - rp.disc)) / rp.lambda1;
}

double return_time(const SectionPoint& xi, const RoofParams& rp) {
  return linear_time(xi.x, rp) + rp.tau0;
}

double truncated_return_time(const SectionPoint& xi, double N, const RoofParams& rp) {
  if (!(N > 0.0)) throw ParameterError("truncation level must be positive");
  if (xi.x == rp.disc) return N;
  return std::min(return_time(xi, rp), N);
}

double log_tail_integral(double eps, double C) {
  if (eps <= 0.0) return 0.0;
  return C * eps * (1.0 - std::log(eps));
}

namespace {

// ∫_{u1}^{u2} min(-log(u)/lambda1 + tau0, N) du for 0 <= u1 <= u2, with
// cut = exp(-(N - tau0) * lambda1) the level where the minimum switches.
double truncated_roof_integral(double u1, double u2, double cut, const RoofParams& rp, double N) {
  if (!(u2 > u1)) return 0.0;
  auto antideriv = [](double u) { return u > 0.0 ? u - u * std::log(u) : 0.0; };
  double total = 0.0;
  const double flat_hi = std::min(u2, cut);
  if (flat_hi > u1) total += N * (flat_hi - u1);
  const double log_lo = std::max(u1, cut);
  if (u2 > log_lo) {
    total += rp.tau0 * (u2 - log_lo) + (antideriv(u2) - antideriv(log_lo)) / rp.lambda1;
  }
  return total;
}

}  // namespace

MeanReturnTime mean_return_time(const UlamDensity& density, const RoofParams& rp, double N) {
  validate(rp);
  if (!(N > 0.0)) throw ParameterError("truncation level must be positive");
  const double cut = std::exp(-(N - rp.tau0) * rp.lambda1);
  double value = 0.0;
  for (std::size_t i = 0; i < density.n; ++i) {
    const double l = density.cell_left(i);
    const double r = density.cell_left(i + 1);
    double cell = 0.0;
    if (r <= rp.disc) {
      cell = truncated_roof_integral(rp.disc - r, rp.disc - l, cut, rp, N);
    } else if (l >= rp.disc) {
      cell = truncated_roof_integral(l - rp.disc, r - rp.disc, cut, rp, N);
    } else {
      cell = truncated_roof_integral(0.0, rp.disc - l, cut, rp, N) +
             truncated_roof_integral(0.0, r - rp.disc, cut, rp, N);
    }
    value += density.weights[i] * cell;
  }
  MeanReturnTime out;
  out.value = value;
  out.N = N;
  out.density_bound = density.sup();
  const double C = retime_constant(rp);
  out.epsilon = std::exp(-N / C);
  // The set {-C log|x - disc| > N} is two-sided around disc.
  out.tail_bound = 2.0 * out.density_bound * log_tail_integral(out.epsilon, C);
  return out;
}

void validate(const ModelParams& model) {
  validate(model.map);
  validate(model.skew);
  validate(model.roof);
  if (model.roof.disc != model.map.disc) {
    throw ParameterError("roof and map must share the discontinuity point");
  }
  if (!(model.eigen.l2 < 0.0 && model.eigen.l3 < 0.0)) {
    throw ParameterError("embedding needs contracting eigenvalues l2, l3 < 0");
  }
}

namespace {

double hermite(double u) { return u * u * (3.0 - 2.0 * u); }

struct Passage {
  double t_lin = 0.0;
  ode::State3 exit;
  ode::State3 entry;
};

Passage passage(const SectionPoint& xi, const ModelParams& model) {
  const RoofParams& rp = model.roof;
  Passage p;
  p.t_lin = linear_time(xi.x, rp);
  const double side = xi.x > rp.disc ? 1.0 : -1.0;
  p.exit = {side, xi.y * std::exp(model.eigen.l2 * p.t_lin), std::exp(model.eigen.l3 * p.t_lin)};
  const SectionPoint next = eval_P(xi, model.map, model.skew);
  p.entry = {next.x - rp.disc, next.y, 1.0};
  return p;
}

ode::State3 linear_point(const SectionPoint& xi, double s, const ModelParams& model) {
  return {(xi.x - model.roof.disc) * std::exp(model.roof.lambda1 * s),
          xi.y * std::exp(model.eigen.l2 * s), std::exp(model.eigen.l3 * s)};
}

ode::State3 reinjection_point(const Passage& p, double s, double tau0) {
  const double u = std::clamp((s - p.t_lin) / tau0, 0.0, 1.0);
  const double h = hermite(u);
  const double g = 1.0 - h;
  return {p.exit.x * g + p.entry.x * h, p.exit.y * g + p.entry.y * h,
          p.exit.z * g + p.entry.z * h};
}

}  // namespace

ode::State3 embed(const SuspensionState& state, const ModelParams& model) {
  const double t_lin = linear_time(state.xi.x, model.roof);
  if (state.s <= t_lin) return linear_point(state.xi, state.s, model);
  const Passage p = passage(state.xi, model);
  if (model.roof.tau0 <= 0.0) return p.entry;
  return reinjection_point(p, state.s, model.roof.tau0);
}

double fiber_time_integral(const AmbientObservable& phi, const SectionPoint& xi,
                           const ModelParams& model, double horizon, double quad_tol) {
  const double t_lin = linear_time(xi.x, model.roof);
  const double tau = t_lin + model.roof.tau0;
  const double end = std::min(tau, horizon);
  const double lin_end = std::min(t_lin, end);
  double total = adaptive_simpson(
      [&](double s) { return phi(linear_point(xi, s, model)); }, 0.0, lin_end, 0.5 * quad_tol);
  if (end > t_lin && model.roof.tau0 > 0.0) {
    const Passage p = passage(xi, model);
    total += adaptive_simpson(
        [&](double s) { return phi(reinjection_point(p, s, model.roof.tau0)); }, t_lin, end,
        0.5 * quad_tol);
  }
  return total;
}

FlowIntegral flow_integral(const AmbientObservable& phi, const ModelParams& model,
                           const UlamDensity& density, const FlowOptions& opts) {
  validate(model);
  const double N = opts.truncation;
  const RoofParams& rp = model.roof;

  SectionObservable h;
  h.name = "h_N[" + phi.name + "]";
  h.fn = [&phi, &model, N, tol = opts.quad_tol](double x, double y) {
    if (x == model.map.disc) return 0.0;
    return fiber_time_integral(phi, {x, y}, model, N, tol);
  };
  if (phi.fiber_lipschitz) {
    // y enters the path with weight e^{λ2 t} <= 1 in the linear phase and
    // at most max(e^{λ2 τ_lin}, rho) <= 1 during reinjection.
    h.fiber_lipschitz = *phi.fiber_lipschitz * (1.0 / std::abs(model.eigen.l2) + rp.tau0);
  }

  FlowIntegral out;
  out.numerator = lift_integral(h, model.map, model.skew, density, opts.lift);
  out.converged = out.numerator.converged;

  // Denominator on the same nodes as the numerator so that phi = 1 is exact.
  const DensityNodes nodes = density_nodes(density, opts.lift.quad_points);
  double denom = 0.0;
  for (std::size_t k = 0; k < nodes.x.size(); ++k) {
    denom += nodes.w[k] * truncated_return_time({nodes.x[k], 0.0}, N, rp);
  }
  out.denominator = denom;
  out.roof = mean_return_time(density, rp, N);
  out.denominator_quad_error = std::abs(denom - out.roof.value);
  out.truncation_error = phi.sup_norm * out.roof.tail_bound;

  const LiftBracket& br = out.numerator.bracket;
  const double num_center = br.center();
  out.value = num_center / denom;

  const double qa = out.numerator.quad_error + out.truncation_error;
  const double a_lo = br.lower - qa;
  const double a_hi = br.upper + qa;
  const double b_lo = denom - out.denominator_quad_error;
  const double b_hi = denom + out.denominator_quad_error + out.roof.tail_bound;
  if (b_lo > 0.0) {
    const double c[4] = {a_lo / b_lo, a_lo / b_hi, a_hi / b_lo, a_hi / b_hi};
    out.lower = *std::min_element(c, c + 4);
    out.upper = *std::max_element(c, c + 4);
  } else {
    out.lower = -std::numeric_limits<double>::infinity();
    out.upper = std::numeric_limits<double>::infinity();
  }
  out.error = std::max(out.upper - out.value, out.value - out.lower);
  return out;
}

SuspensionAverage birkhoff_average_suspension(const AmbientObservable& phi,
                                              const SectionPoint& xi0, double T,
                                              const ModelParams& model, double quad_tol,
                                              std::size_t batches) {
  validate(model);
  if (!(T > 0.0)) throw ParameterError("averaging time must be positive");
  std::vector<double> hs;
  std::vector<double> taus;
  SuspensionAverage out;
  SectionPoint xi = xi0;
  double total = 0.0;
  while (total < T) {
    if (xi.x == model.map.disc) {
      xi.x = std::nextafter(xi.x, std::numeric_limits<double>::infinity());
      ++out.disc_hits;
      log::warn("suspension orbit hit the discontinuity; nudged by one ulp");
    }
    const double tau = return_time(xi, model.roof);
    hs.push_back(fiber_time_integral(phi, xi, model, std::numeric_limits<double>::infinity(),
                                     quad_tol));
    taus.push_back(tau);
    total += tau;
    xi = eval_P(xi, model.map, model.skew);
  }
  double num = 0.0;
  for (double v : hs) num += v;
  out.total_time = total;
  out.returns = hs.size();
  out.average = num / total;

  // Batch means of the ratio estimator.
  const std::size_t b = std::min(batches, hs.size());
  if (b >= 2) {
    std::vector<double> ratios;
    const std::size_t per = hs.size() / b;
    for (std::size_t k = 0; k < b; ++k) {
      double bn = 0.0, bd = 0.0;
      const std::size_t lo = k * per;
      const std::size_t hi = (k + 1 == b) ? hs.size() : lo + per;
      for (std::size_t i = lo; i < hi; ++i) {
        bn += hs[i];
        bd += taus[i];
      }
      ratios.push_back(bn / bd);
    }
    double mean = 0.0;
    for (double r : ratios) mean += r;
    mean /= static_cast<double>(b);
    double var = 0.0;
    for (double r : ratios) var += (r - mean) * (r - mean);
    var /= static_cast<double>(b - 1);
    out.std_error = std::sqrt(var / static_cast<double>(b));
  }
  return out;
}

ode::Trajectory sample_suspension(const SectionPoint& xi0, double T, double dt,
                                  const ModelParams& model) {
  validate(model);
  if (!(dt > 0.0)) throw ParameterError("sampling step must be positive");
  ode::Trajectory traj;
  SectionPoint xi = xi0;
  double start = 0.0;  // flow time at which xi was entered
  std::size_t step = 0;
  double t = 0.0;
  while (t <= T) {
    if (xi.x == model.map.disc) {
      xi.x = std::nextafter(xi.x, std::numeric_limits<double>::infinity());
    }
    const double tau = return_time(xi, model.roof);
    while (t <= T && t < start + tau) {
      traj.t.push_back(t);
      traj.states.push_back(embed({xi, t - start}, model));
      t = static_cast<double>(++step) * dt;
    }
    start += tau;
    xi = eval_P(xi, model.map, model.skew);
  }
  return traj;
}

}  // namespace srb
