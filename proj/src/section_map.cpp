#include "srblab/section_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "srblab/errors.hpp"
#include "srblab/log.hpp"
#include "srblab/parallel.hpp"

namespace srb {

void validate(const SkewParams& sp) {
  if (!(sp.rho > 0.0 && sp.rho < 1.0)) throw ParameterError("rho must lie in (0, 1)");
  if (!(sp.off >= 0.0)) throw ParameterError("off must be nonnegative");
  if (sp.rho / 2.0 + sp.off > 0.5 + 1e-15) {
    throw ParameterError("fiber images leave I: rho/2 + off = " +
                         std::to_string(sp.rho / 2.0 + sp.off));
  }
}

namespace {

double branch_sign(double x, double disc) { return x > disc ? 1.0 : -1.0; }

// Lipschitz envelope of equispaced samples with spacing s: certified
// enclosure of inf/sup between neighbouring samples.
FiberRange envelope(const std::vector<double>& vals, double spacing, std::optional<double> lip) {
  double smin = vals.front();
  double smax = vals.front();
  for (double v : vals) {
    smin = std::min(smin, v);
    smax = std::max(smax, v);
  }
  if (!lip || vals.size() < 2) return {smin, smax};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
    const double mid = 0.5 * (vals[i] + vals[i + 1]);
    const double slack = 0.5 * *lip * spacing;
    lo = std::min(lo, mid - slack);
    hi = std::max(hi, mid + slack);
  }
  // A declared constant that is too small must not shrink below the samples.
  return {std::min(lo, smin), std::max(hi, smax)};
}

// Range of phi over the vertical segment {x} × [base - len/2, base + len/2].
FiberRange segment_range(const SectionObservable& phi, double x, double base, double len,
                         std::size_t k, std::vector<double>& scratch) {
  if (phi.fiber_lipschitz && *phi.fiber_lipschitz == 0.0) {
    const double v = phi(x, base);
    return {v, v};
  }
  scratch.resize(k);
  const double spacing = len / static_cast<double>(k - 1);
  for (std::size_t i = 0; i < k; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(k - 1) - 0.5;
    scratch[i] = phi(x, base + len * t);
  }
  return envelope(scratch, spacing, phi.fiber_lipschitz);
}

}  // namespace

SectionPoint eval_P(const SectionPoint& xi, const MapParams& mp, const SkewParams& sp) {
  if (xi.x == mp.disc) throw DomainError("P is undefined on the discontinuity line");
  return {eval_f(xi.x, mp), sp.rho * xi.y + sp.off * branch_sign(xi.x, mp.disc)};
}

FiberRange phi_extremes(const SectionObservable& phi, double x, int m, const MapParams& mp,
                        const SkewParams& sp, std::size_t k) {
  if (k < 2) throw ParameterError("phi_extremes needs at least 2 fiber samples");
  if (m < 0) throw ParameterError("depth must be nonnegative");
  // P^m maps the fiber through x onto {f^m(x)} × [base ± rho^m/2].
  double xm = x;
  double base = 0.0;
  for (int j = 0; j < m; ++j) {
    if (xm == mp.disc) {
      throw DiscontinuityHit("orbit hits the discontinuity at iterate " + std::to_string(j),
                             static_cast<std::size_t>(j));
    }
    base = sp.rho * base + sp.off * branch_sign(xm, mp.disc);
    xm = eval_f(xm, mp);
  }
  std::vector<double> scratch;
  return segment_range(phi, xm, base, std::pow(sp.rho, m), k, scratch);
}

DensityNodes density_nodes(const UlamDensity& density, std::size_t quad_points) {
  if (quad_points < 1) throw ParameterError("need at least one quadrature node per cell");
  DensityNodes nodes;
  const std::size_t total = density.n * quad_points;
  nodes.x.resize(total);
  nodes.w.resize(total);
  const double nt = static_cast<double>(total);
  for (std::size_t i = 0; i < density.n; ++i) {
    const double w = density.weights[i] / nt;
    for (std::size_t r = 0; r < quad_points; ++r) {
      const std::size_t k = i * quad_points + r;
      nodes.x[k] = (static_cast<double>(k) + 0.5) / nt - 0.5;
      nodes.w[k] = w;
    }
  }
  return nodes;
}

constexpr double kQuadSafety = 3.0;

LiftResult lift_integral(const SectionObservable& phi, const MapParams& mp, const SkewParams& sp,
                         const UlamDensity& density, const LiftOptions& opts) {
  if (!(opts.tol > 0.0)) throw ParameterError("lift tolerance must be positive");
  if (opts.fiber_samples < 2) throw ParameterError("need at least 2 fiber samples");
  const DensityNodes nodes = density_nodes(density, opts.quad_points);
  const std::size_t count = nodes.x.size();

  std::vector<double> xm = nodes.x;
  std::vector<double> base(count, 0.0);
  std::vector<double> lower(count), upper(count);
  std::vector<unsigned char> hit(count, 0);

  // Two interleaved sub-rules: node classes {0,3} and {1,2} mod 4. Each is
  // reflection symmetric, so symmetric integrands do not show a spurious split.
  auto in_outer = [](std::size_t k) { return k % 4 == 0 || k % 4 == 3; };
  double w_outer = 0.0, w_inner = 0.0;
  for (std::size_t k = 0; k < count; ++k) (in_outer(k) ? w_outer : w_inner) += nodes.w[k];

  LiftResult result;
  const std::optional<double> lip = phi.fiber_lipschitz;
  for (int m = 0; m <= opts.max_depth; ++m) {
    const double len = std::pow(sp.rho, m);
    if (m > 0) {
      // Advance every node orbit by one step of P.
      parallel_for(count, [&](std::size_t k) {
        double x = xm[k];
        if (x == mp.disc) {
          x = std::nextafter(x, std::numeric_limits<double>::infinity());
          hit[k] = 1;
        }
        base[k] = sp.rho * base[k] + sp.off * branch_sign(x, mp.disc);
        xm[k] = eval_f(x, mp);
      });
    }
    parallel_for(count, [&](std::size_t k) {
      thread_local std::vector<double> scratch;
      const FiberRange r = segment_range(phi, xm[k], base[k], len, opts.fiber_samples, scratch);
      lower[k] = r.lower;
      upper[k] = r.upper;
    });
    double lo = 0.0, hi = 0.0, outer = 0.0, inner = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
      lo += nodes.w[k] * lower[k];
      hi += nodes.w[k] * upper[k];
      (in_outer(k) ? outer : inner) += nodes.w[k] * 0.5 * (lower[k] + upper[k]);
    }
    double quad = 0.0;
    // Half the split is about one standard deviation of the full rule's error
    // when node errors are uncorrelated; report three.
    if (w_outer > 0.0 && w_inner > 0.0) {
      quad = kQuadSafety * 0.5 * std::abs(outer / w_outer - inner / w_inner);
    }
    result.history.push_back({m, lo, hi, quad});
    result.bracket = {m, lo, hi, std::nullopt};
    if (lip) result.bracket.gap_bound = *lip * len;
    result.quad_error = quad;
    if (hi - lo < opts.tol && m >= opts.min_depth) {
      result.converged = true;
      break;
    }
  }
  for (unsigned char h : hit) result.disc_hits += h;
  if (result.disc_hits > 0) {
    log::warn("lift_integral(" + phi.name + "): " + std::to_string(result.disc_hits) +
              " node orbit(s) hit the discontinuity and were nudged by one ulp");
  }
  return result;
}

LiftResult lift_integral(const SectionObservable& phi, const MapParams& mp, const SkewParams& sp,
                         std::size_t n, const LiftOptions& opts) {
  return lift_integral(phi, mp, sp, invariant_density(mp, n), opts);
}

SectionObservable compose_with_P(const SectionObservable& phi, const MapParams& mp,
                                 const SkewParams& sp) {
  SectionObservable out;
  out.name = phi.name + "∘P";
  out.fn = [phi, mp, sp](double x, double y) {
    const SectionPoint p = eval_P({x, y}, mp, sp);
    return phi(p.x, p.y);
  };
  if (phi.fiber_lipschitz) out.fiber_lipschitz = *phi.fiber_lipschitz * sp.rho;
  return out;
}

}  // namespace srb
