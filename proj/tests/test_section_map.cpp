#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "srblab/errors.hpp"
#include "srblab/observables.hpp"
#include "srblab/section_map.hpp"

using namespace srb;

namespace {

const MapParams kMap{};
const SkewParams kSkew{};

SectionObservable fiber_y() { return dictionary_entry("y").section; }

}  // namespace

TEST_CASE("skew parameters") {
  CHECK_NOTHROW(validate(kSkew));
  CHECK_THROWS_AS(validate(SkewParams{1.0, 0.0}), ParameterError);
  CHECK_THROWS_AS(validate(SkewParams{0.5, 0.3}), ParameterError);
}

TEST_CASE("P contracts fibers by exactly rho") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng), y1 = u(rng), y2 = u(rng);
    const SectionPoint a = eval_P({x, y1}, kMap, kSkew), b = eval_P({x, y2}, kMap, kSkew);
    CHECK(a.x == b.x);
    CHECK(std::abs(a.y - b.y) == doctest::Approx(0.25 * std::abs(y1 - y2)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(eval_P({0.0, 0.1}, kMap, kSkew), DomainError);
}

TEST_CASE("branch images of fibers are disjoint") {
  for (double x : {-0.4, -0.1, 0.1, 0.4}) {
    const double lo = eval_P({x, -0.5}, kMap, kSkew).y, hi = eval_P({x, 0.5}, kMap, kSkew).y;
    CHECK(hi - lo == doctest::Approx(0.25));
    if (x > 0) {
      CHECK(lo == doctest::Approx(0.125));
      CHECK(hi == doctest::Approx(0.375));
    } else {
      CHECK(lo == doctest::Approx(-0.375));
      CHECK(hi == doctest::Approx(-0.125));
    }
  }
}

TEST_CASE("iterated contraction along same-fiber points") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    SectionPoint a{u(rng), u(rng)}, b{a.x, u(rng)};
    const double d0 = std::abs(a.y - b.y);
    for (int n = 1; n <= 10; ++n) {
      a = eval_P(a, kMap, kSkew);
      b = eval_P(b, kMap, kSkew);
      CHECK(std::hypot(a.x - b.x, a.y - b.y) <= std::pow(0.25, n) * d0 + 1e-15);
    }
  }
}

TEST_CASE("phi_extremes on simple observables") {
  const SectionObservable three{"3", [](double, double) { return 3.0; }, 0.0};
  const FiberRange c = phi_extremes(three, 0.3, 5, kMap, kSkew);
  CHECK(c.lower == 3.0);
  CHECK(c.upper == 3.0);

  const SectionObservable psi{"sin", [](double x, double) { return std::sin(3 * x); }, 0.0};
  double fx = 0.3;
  for (int j = 0; j < 4; ++j) fx = eval_f(fx, kMap);
  const FiberRange r = phi_extremes(psi, 0.3, 4, kMap, kSkew);
  CHECK(r.lower == doctest::Approx(std::sin(3 * fx)).epsilon(1e-14));
  CHECK(r.upper == doctest::Approx(std::sin(3 * fx)).epsilon(1e-14));
}

TEST_CASE("phi_extremes encloses the fiber range within Lip rho^m") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.49, 0.49), freq(1.0, 8.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double w = freq(rng);
    const SectionObservable phi{"wave", [w](double x, double y) { return std::sin(w * y) + x * x; },
                                w};
    const double x = u(rng);
    for (int m = 0; m <= 12; ++m) {
      const FiberRange r = phi_extremes(phi, x, m, kMap, kSkew, 16);
      CHECK(r.lower <= r.upper);
      CHECK(r.upper - r.lower <= w * std::pow(0.25, m) * (1 + 1e-12));
      // Dense sampling of the true fiber never escapes the enclosure.
      for (int i = 0; i <= 200; ++i) {
        SectionPoint p{x, -0.5 + i / 200.0};
        for (int j = 0; j < m; ++j) p = eval_P(p, kMap, kSkew);
        const double v = phi(p.x, p.y);
        CHECK(v >= r.lower - 1e-14);
        CHECK(v <= r.upper + 1e-14);
      }
    }
  }
}

TEST_CASE("phi_extremes reports the iterate that hits the discontinuity") {
  try {
    phi_extremes(fiber_y(), 0.0, 3, kMap, kSkew);
    FAIL("expected DiscontinuityHit");
  } catch (const DiscontinuityHit& e) {
    CHECK(e.iterate() == 0);
  }
  // f(1/2) = 1/2 is fixed, so only the start matters; -1/2 likewise.
  CHECK_NOTHROW(phi_extremes(fiber_y(), 0.5, 6, kMap, kSkew));
}

TEST_CASE("lift of constants and x-only observables") {
  const UlamDensity d = invariant_density(kMap, 1024);
  const SectionObservable one{"1", [](double, double) { return 1.0; }, 0.0};
  const LiftResult r1 = lift_integral(one, kMap, kSkew, d);
  CHECK(r1.converged);
  CHECK(r1.bracket.m == 0);
  CHECK(r1.bracket.lower == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r1.bracket.upper == doctest::Approx(1.0).epsilon(1e-14));

  // ∫ψ dμ̄ straight from the density, cell by cell.
  auto psi = [](double x) { return std::cos(3 * x) + x; };
  double direct = 0.0;
  const DensityNodes nodes = density_nodes(d, 4);
  for (std::size_t k = 0; k < nodes.x.size(); ++k) direct += nodes.w[k] * psi(nodes.x[k]);
  const SectionObservable phi{"psi", [&](double x, double) { return psi(x); }, 0.0};
  LiftOptions opts;
  opts.min_depth = 3;
  const LiftResult r = lift_integral(phi, kMap, kSkew, d, opts);
  for (const auto& level : r.history) {
    CHECK(level.lower == doctest::Approx(level.upper).epsilon(1e-14));
    CHECK(std::abs(level.lower - direct) < 5e-3);
  }
}

TEST_CASE("lift of y vanishes for symmetric parameters") {
  const UlamDensity d = invariant_density(kMap, 2048);
  const LiftResult r = lift_integral(fiber_y(), kMap, kSkew, d);
  CHECK(r.converged);
  CHECK(r.bracket.lower <= 1e-6);
  CHECK(r.bracket.upper >= -1e-6);
  CHECK(std::abs(r.bracket.center()) < 1e-6);
  REQUIRE(r.bracket.gap_bound.has_value());
  CHECK(r.bracket.gap() <= *r.bracket.gap_bound + 2 * r.quad_error);
}

TEST_CASE("lift of y against a long orbit average, asymmetric parameters") {
  const MapParams mp = MapParams::from_ratio(0.6, 0.97, 0.01);
  const UlamDensity d = invariant_density(mp, 4096);
  LiftOptions opts;
  opts.quad_points = 16;
  const LiftResult r = lift_integral(fiber_y(), mp, kSkew, d, opts);
  REQUIRE(r.converged);

  SectionPoint p{0.123456789, 0.0};
  double sum = 0.0;
  const int burn = 1000, steps = 2000000;
  for (int i = 0; i < burn + steps; ++i) {
    if (i >= burn) sum += p.y;
    p = eval_P(p, mp, kSkew);
  }
  CHECK(std::abs(sum / steps - r.bracket.center()) < 3e-3);
}

TEST_CASE("sandwich is monotone and the gap decays like rho^m") {
  const UlamDensity d = invariant_density(kMap, 1024);
  LiftOptions opts;
  opts.tol = 1e-300;
  opts.max_depth = 10;
  const SectionObservable phi{"y+x^2", [](double x, double y) { return y + x * x; }, 1.0};
  const LiftResult r = lift_integral(phi, kMap, kSkew, d, opts);
  REQUIRE(r.history.size() == 11);
  for (std::size_t m = 0; m + 1 < r.history.size(); ++m) {
    const auto& a = r.history[m];
    const auto& b = r.history[m + 1];
    CHECK(a.lower <= a.upper);
    CHECK(b.lower >= a.lower - 2 * (a.quad_error + b.quad_error) - 1e-12);
    CHECK(b.upper <= a.upper + 2 * (a.quad_error + b.quad_error) + 1e-12);
  }
  // Least-squares slope of log gap over m = 2..10.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int m = 2; m <= 10; ++m) {
    const double y = std::log(r.history[m].upper - r.history[m].lower);
    sx += m;
    sy += y;
    sxx += m * m;
    sxy += m * y;
    ++count;
  }
  const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  CHECK(std::abs(slope / std::log(0.25) - 1.0) < 0.1);
}

TEST_CASE("lift is P-invariant") {
  const MapParams mp = MapParams::from_ratio(0.65, 0.95, -0.02);
  const UlamDensity d = invariant_density(mp, 4096);
  const SectionObservable phi{"xy", [](double x, double y) { return std::sin(x + 2 * y); }, 2.0};
  LiftOptions opts;
  opts.quad_points = 16;
  const LiftResult a = lift_integral(phi, mp, kSkew, d, opts);
  const LiftResult b = lift_integral(compose_with_P(phi, mp, kSkew), mp, kSkew, d, opts);
  CHECK(std::abs(a.bracket.center() - b.bracket.center()) <=
        2 * opts.tol + a.quad_error + b.quad_error);
}

TEST_CASE("continuous-only observables are not certified") {
  const UlamDensity d = invariant_density(kMap, 256);
  const SectionObservable phi{"abs", [](double, double y) { return std::abs(y); }, std::nullopt};
  LiftOptions opts;
  opts.max_depth = 5;
  const LiftResult r = lift_integral(phi, kMap, kSkew, d, opts);
  CHECK(!r.bracket.gap_bound.has_value());
}

TEST_CASE("density nodes carry the density mass") {
  const UlamDensity d = invariant_density(kMap, 64);
  const DensityNodes nodes = density_nodes(d, 3);
  CHECK(nodes.x.size() == 192);
  double total = 0.0;
  for (double w : nodes.w) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
