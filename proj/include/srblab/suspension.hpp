#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "srblab/interval_map.hpp"
#include "srblab/ode.hpp"
#include "srblab/section_map.hpp"

namespace srb {

/// Return time τ(ξ) = -(1/lambda1) log|x - disc| + tau0: the exact linear
/// passage near the singularity plus a constant reinjection time.
struct RoofParams {
  double lambda1 = 11.83;
  double tau0 = 0.5;
  double disc = 0.0;

  friend bool operator==(const RoofParams&, const RoofParams&) = default;
};

void validate(const RoofParams& rp);

/// Constant C with τ(ξ) <= -C log|x - disc| on all of Σ \ Γ.
double retime_constant(const RoofParams& rp);

/// Time spent in the linear neighbourhood before reaching |x| = 1.
double linear_time(double x, const RoofParams& rp);
double return_time(const SectionPoint& xi, const RoofParams& rp);
/// min(τ, N); equals N on the discontinuity line.
double truncated_return_time(const SectionPoint& xi, double N, const RoofParams& rp);

/// ∫_0^eps -C log(x) dx = C * eps * (1 - log eps).
double log_tail_integral(double eps, double C);

struct MeanReturnTime {
  double value = 0.0;       // ∫ τ_N dμ̄, integrated exactly cell by cell
  double tail_bound = 0.0;  // ∫ (τ - τ_N) dμ̄ <= tail_bound
  double epsilon = 0.0;     // half-width of the set where -C log|x - disc| > N
  double density_bound = 0.0;
  double N = 0.0;

  double upper() const { return value + tail_bound; }
};

MeanReturnTime mean_return_time(const UlamDensity& density, const RoofParams& rp, double N);

/// Complete parameter set of one geometric Lorenz system. `eigen.l1` is not
/// used by the embedding (the roof carries lambda1); l2 and l3 set the
/// contraction of y and z in the linear neighbourhood.
struct ModelParams {
  MapParams map;
  SkewParams skew;
  RoofParams roof;
  ode::Eigenvalues eigen{11.827723451163457, -22.827723451163457, -8.0 / 3.0};

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Validates every component and the shared discontinuity.
void validate(const ModelParams& model);

/// Point (ξ, s) of the suspension, 0 <= s < τ(ξ).
struct SuspensionState {
  SectionPoint xi;
  double s = 0.0;
};

/// R^3 realization of the suspension. Linear phase (s <= τ_lin):
///   ((x - disc) e^{λ1 s}, y e^{λ2 s}, e^{λ3 s});
/// reinjection phase: cubic Hermite with zero end velocities from the exit
/// point on |x| = 1 to (P(ξ).x - disc, P(ξ).y, 1). Times beyond τ clamp to the
/// re-entry point.
ode::State3 embed(const SuspensionState& state, const ModelParams& model);

/// Observable on R^3 with the two bounds the error analysis needs, both taken
/// over the embedded region [-1,1] × [-1/2,1/2] × [0,1].
struct AmbientObservable {
  std::string name;
  std::function<double(const ode::State3&)> fn;
  double sup_norm = 0.0;
  /// Bound on |dphi/dy|; absent for merely continuous observables.
  std::optional<double> fiber_lipschitz;

  double operator()(const ode::State3& p) const { return fn(p); }
};

/// ∫_0^{min(τ(ξ), horizon)} phi(embed(ξ, t)) dt, split at the phase boundary.
double fiber_time_integral(const AmbientObservable& phi, const SectionPoint& xi,
                           const ModelParams& model, double horizon, double quad_tol);

struct FlowOptions {
  double truncation = 20.0;  // N
  double quad_tol = 1e-8;    // inner time quadrature, per fiber
  LiftOptions lift{1e-6, 4, 4, 60, 0};
};

struct FlowIntegral {
  double value = 0.0;
  double error = 0.0;  // half-width of the propagated enclosure
  double lower = 0.0;
  double upper = 0.0;
  LiftResult numerator;                  // ∫ h_N dμ̃
  double denominator = 0.0;              // ∫ τ_N dμ̃ on the same nodes
  double denominator_quad_error = 0.0;   // |nodes - exact cellwise|
  MeanReturnTime roof;
  double truncation_error = 0.0;         // ||phi||_∞ * tail_bound
  bool converged = false;
};

/// ∫ phi dμ = (1/μ̃(τ)) ∫∫_0^{τ(ξ)} phi(X(ξ,t)) dt dμ̃(ξ), with τ truncated at N
/// and the truncation, bracket and quadrature errors propagated into
/// [lower, upper].
FlowIntegral flow_integral(const AmbientObservable& phi, const ModelParams& model,
                           const UlamDensity& density, const FlowOptions& opts = {});

struct SuspensionAverage {
  double average = 0.0;
  double std_error = 0.0;  // batch-means estimate
  double total_time = 0.0;
  std::size_t returns = 0;
  std::size_t disc_hits = 0;
};

/// Time average of phi along the suspension flow started at (xi0, 0), run
/// until the accumulated roof time reaches T.
SuspensionAverage birkhoff_average_suspension(const AmbientObservable& phi,
                                              const SectionPoint& xi0, double T,
                                              const ModelParams& model, double quad_tol = 1e-8,
                                              std::size_t batches = 32);

/// Embedded flow sampled every dt up to time T, for plotting.
ode::Trajectory sample_suspension(const SectionPoint& xi0, double T, double dt,
                                  const ModelParams& model);

}  // namespace srb
