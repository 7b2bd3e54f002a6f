#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srblab/interval_map.hpp"

namespace srb {

/// Fiber map g(x, y) = rho * y + off * sign(x - disc).
struct SkewParams {
  double rho = 0.25;
  double off = 0.25;

  friend bool operator==(const SkewParams&, const SkewParams&) = default;
};

/// Throws ParameterError unless 0 < rho < 1, off >= 0 and rho/2 + off <= 1/2.
void validate(const SkewParams& sp);

struct SectionPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Poincaré map P(x, y) = (f(x), g(x, y)). Throws DomainError on x == disc.
SectionPoint eval_P(const SectionPoint& xi, const MapParams& mp, const SkewParams& sp);

/// Observable on the section. `fiber_lipschitz` bounds |dphi/dy|; when it is
/// absent the observable is treated as merely continuous and brackets built
/// from it are not certified.
struct SectionObservable {
  std::string name;
  std::function<double(double x, double y)> fn;
  std::optional<double> fiber_lipschitz;

  double operator()(double x, double y) const { return fn(x, y); }
};

struct FiberRange {
  double lower = 0.0;
  double upper = 0.0;
};

/// Enclosure of [inf, sup] of phi∘P^m over the fiber through x, from k
/// equispaced samples of the image segment and the Lipschitz envelope between
/// neighbouring samples. Throws DiscontinuityHit naming the iterate j < m at
/// which f^j(x) == disc.
FiberRange phi_extremes(const SectionObservable& phi, double x, int m, const MapParams& mp,
                        const SkewParams& sp, std::size_t k = 64);

struct LiftBracket {
  int m = 0;
  double lower = 0.0;
  double upper = 0.0;
  /// Lip * rho^m * diam(I); absent for uncertified (continuous-only) observables.
  std::optional<double> gap_bound;

  double center() const { return 0.5 * (lower + upper); }
  double gap() const { return upper - lower; }
};

/// Sandwich values at one depth.
struct SandwichLevel {
  int m = 0;
  double lower = 0.0;
  double upper = 0.0;
  double quad_error = 0.0;
};

struct LiftOptions {
  double tol = 1e-6;
  std::size_t fiber_samples = 64;
  /// Midpoint nodes per Ulam cell.
  std::size_t quad_points = 4;
  int max_depth = 60;
  /// Evaluate every depth up to at least this one (diagnostics).
  int min_depth = 0;
};

struct LiftResult {
  LiftBracket bracket;
  bool converged = false;
  /// Estimated quadrature error of the final bracket (interleaved node split).
  double quad_error = 0.0;
  std::vector<SandwichLevel> history;
  /// Orbits nudged off the discontinuity by one ulp.
  std::size_t disc_hits = 0;
};

/// Weighted midpoint nodes for integrating against an Ulam density.
struct DensityNodes {
  std::vector<double> x;
  std::vector<double> w;  // sums to the density integral (1)
};

DensityNodes density_nodes(const UlamDensity& density, std::size_t quad_points);

/// Computes L(m) = ∫(phi∘P^m)^- dμ̄ and U(m) = ∫(phi∘P^m)^+ dμ̄ for
/// m = 0, 1, ... until U - L < tol (or max_depth). Orbits of quadrature nodes
/// that land exactly on disc are nudged by one ulp and counted.
LiftResult lift_integral(const SectionObservable& phi, const MapParams& mp, const SkewParams& sp,
                         const UlamDensity& density, const LiftOptions& opts = {});

/// Same, computing the density at resolution n first.
LiftResult lift_integral(const SectionObservable& phi, const MapParams& mp, const SkewParams& sp,
                         std::size_t n, const LiftOptions& opts = {});

/// phi∘P as a section observable (fiber Lipschitz constant scales by rho).
SectionObservable compose_with_P(const SectionObservable& phi, const MapParams& mp,
                                 const SkewParams& sp);

}  // namespace srb
