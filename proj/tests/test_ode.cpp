#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "srblab/errors.hpp"
#include "srblab/ode.hpp"

using namespace srb;
using namespace srb::ode;

TEST_CASE("vector field at the origin and at (1,1,1)") {
  const OdeParams p;
  CHECK(vector_field({0, 0, 0}, p) == State3{0, 0, 0});
  const State3 v = vector_field({1, 1, 1}, p);
  CHECK(v.x == 0.0);
  CHECK(v.y == 26.0);
  CHECK(v.z == doctest::Approx(-5.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("jacobian trace is the constant divergence") {
  const OdeParams p;
  CHECK(divergence(p) == doctest::Approx(-41.0 / 3.0).epsilon(1e-15));
  const Matrix3 j = jacobian({7, -3, 12}, p);
  CHECK(std::abs(j[0][0] + j[1][1] + j[2][2] + 41.0 / 3.0) < 1e-12);

  // z is decoupled at the origin.
  const Matrix3 j0 = jacobian({0, 0, 0}, p);
  CHECK(j0[2][0] == 0.0);
  CHECK(j0[2][1] == 0.0);
  CHECK(j0[0][2] == 0.0);
  CHECK(j0[1][2] == 0.0);
  CHECK(j0[2][2] == -p.c);
}

TEST_CASE("jacobian matches central differences") {
  const OdeParams p;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const State3 s{u(rng), u(rng), u(rng) + 20.0};
    const Matrix3 j = jacobian(s, p);
    for (int col = 0; col < 3; ++col) {
      State3 sp = s, sm = s;
      double* cp = col == 0 ? &sp.x : col == 1 ? &sp.y : &sp.z;
      double* cm = col == 0 ? &sm.x : col == 1 ? &sm.y : &sm.z;
      *cp += h;
      *cm -= h;
      const State3 fp = vector_field(sp, p), fm = vector_field(sm, p);
      const double fd[3] = {(fp.x - fm.x) / (2 * h), (fp.y - fm.y) / (2 * h),
                            (fp.z - fm.z) / (2 * h)};
      for (int row = 0; row < 3; ++row) CHECK(std::abs(fd[row] - j[row][col]) < 1e-6);
    }
  }
}

TEST_CASE("origin eigenvalues") {
  const Eigenvalues e = origin_eigenvalues(OdeParams{});
  CHECK(e.l1 == doctest::Approx((-11.0 + std::sqrt(1201.0)) / 2.0).epsilon(1e-14));
  CHECK(e.l2 == doctest::Approx((-11.0 - std::sqrt(1201.0)) / 2.0).epsilon(1e-14));
  CHECK(e.l3 == doctest::Approx(-8.0 / 3.0).epsilon(1e-14));
  CHECK(0.0 < -e.l3);
  CHECK(-e.l3 < e.l1);
  CHECK(e.l1 < -e.l2);

  const Eigenvalues u = origin_eigenvalues(OdeParams{1, 1, 1});
  CHECK(std::abs(u.l1) < 1e-15);
  CHECK(u.l2 == doctest::Approx(-2.0));
  CHECK(u.l3 == doctest::Approx(-1.0));

  CHECK_THROWS_AS(origin_eigenvalues(OdeParams{1, -10, 1}), ParameterError);
}

TEST_CASE("integrate: fixed point, length, determinism") {
  const OdeParams p;
  const auto still = integrate({0, 0, 0}, p, 1.0, 0.01);
  CHECK(still.size() == 101);
  for (const auto& s : still) CHECK(s == State3{0, 0, 0});

  const auto a = integrate({1, 1, 20}, p, 2.0, 0.003);
  const auto b = integrate({1, 1, 20}, p, 2.0, 0.003);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

  const auto timed = integrate_timed({1, 1, 20}, p, 1.0, 0.03);
  CHECK(timed.t.back() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("RK4 error drops by about 16 when the step halves") {
  const OdeParams p;
  const State3 s0{1, 1, 20};
  auto final_state = [&](double h) { return integrate(s0, p, 1.0, h).back(); };
  auto dist = [](const State3& a, const State3& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                     (a.z - b.z) * (a.z - b.z));
  };
  const State3 f1 = final_state(0.002), f2 = final_state(0.001), f3 = final_state(0.0005);
  const double ratio = dist(f1, f2) / dist(f2, f3);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("variational volume follows Liouville") {
  const OdeParams p;
  const VariationalResult r = integrate_variational({1, 1, 20}, p, 1.0, 0.001);
  const double expected = std::exp(-41.0 / 3.0);
  CHECK(std::abs(determinant(r.tangent) / expected - 1.0) < 0.01);
}

TEST_CASE("escaping trajectories raise") {
  CHECK_THROWS_AS(integrate({1e3, 1e3, 1e3}, OdeParams{}, 1.0, 0.01), DivergenceError);
}

TEST_CASE("birkhoff averages on the Lorenz attractor") {
  const OdeParams p;
  CHECK(birkhoff_average_ode([](const State3&) { return 1.0; }, {1, 1, 20}, p, 50.0, 0.005) ==
        1.0);
  const double bounded = birkhoff_average_ode(
      [](const State3& s) { return 0.5 + 0.5 * std::tanh(s.x); }, {1, 1, 20}, p, 50.0, 0.005);
  CHECK(bounded >= 0.0);
  CHECK(bounded <= 1.0);

  auto z = [](const State3& s) { return s.z; };
  const double za = birkhoff_average_ode(z, {1, 1, 20}, p, 1e4, 0.005);
  const double zb = birkhoff_average_ode(z, {-3, 4, 15}, p, 1e4, 0.005);
  CHECK(std::abs(za - zb) < 0.2);
}

TEST_CASE("trajectory csv has a header and full precision") {
  Trajectory t{{0.0, 0.1}, {{1, 2, 3}, {0.1, 0.2, 0.30000000000000004}}};
  std::ostringstream os;
  write_trajectory_csv(os, t);
  const std::string s = os.str();
  CHECK(s.rfind("t,x,y,z\n", 0) == 0);
  CHECK(s.find("0.30000000000000004") != std::string::npos);
}
