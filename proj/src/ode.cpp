#include "srblab/ode.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "srblab/errors.hpp"

namespace srb::ode {

namespace {

State3 axpy(const State3& s, double h, const State3& k) {
  return {s.x + h * k.x, s.y + h * k.y, s.z + h * k.z};
}

State3 rk4_step(const State3& s, const OdeParams& p, double h) {
  const State3 k1 = vector_field(s, p);
  const State3 k2 = vector_field(axpy(s, 0.5 * h, k1), p);
  const State3 k3 = vector_field(axpy(s, 0.5 * h, k2), p);
  const State3 k4 = vector_field(axpy(s, h, k3), p);
  return {s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
          s.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z)};
}

void check_state(const State3& s, const IntegrateOptions& opts, double t) {
  if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z)) {
    throw DivergenceError("non-finite state at t=" + std::to_string(t));
  }
  if (opts.trap_radius > 0.0 &&
      std::sqrt(s.x * s.x + s.y * s.y + s.z * s.z) > opts.trap_radius) {
    throw DivergenceError("trajectory left the trapping ball at t=" + std::to_string(t));
  }
}

void check_step(double T, double h) {
  if (!(h > 0.0)) throw ParameterError("integration step must be positive");
  if (!(T >= 0.0)) throw ParameterError("integration time must be nonnegative");
}

// Number of steps and their sizes; the final step absorbs the remainder.
struct StepPlan {
  long long count = 0;
  double h = 0.0;
  double last = 0.0;
};

StepPlan plan_steps(double T, double h) {
  StepPlan plan;
  plan.h = h;
  if (T == 0.0) return plan;
  const double ratio = T / h;
  plan.count = static_cast<long long>(std::ceil(ratio - 1e-9));
  if (plan.count < 1) plan.count = 1;
  plan.last = T - static_cast<double>(plan.count - 1) * h;
  return plan;
}

}  // namespace

State3 vector_field(const State3& s, const OdeParams& p) {
  return {p.a * (s.y - s.x), p.b * s.x - s.y - s.x * s.z, s.x * s.y - p.c * s.z};
}

Matrix3 jacobian(const State3& s, const OdeParams& p) {
  return Matrix3{{{-p.a, p.a, 0.0}, {p.b - s.z, -1.0, -s.x}, {s.y, s.x, -p.c}}};
}

double divergence(const OdeParams& p) { return -(p.a + 1.0 + p.c); }

Eigenvalues origin_eigenvalues(const OdeParams& p) {
  // The x-y block [[-a, a], [b, -1]] decouples from z at the origin.
  const double disc = (p.a + 1.0) * (p.a + 1.0) + 4.0 * p.a * (p.b - 1.0);
  if (disc < 0.0) {
    throw ParameterError("origin eigenvalues form a complex pair (discriminant " +
                         std::to_string(disc) + ")");
  }
  const double root = std::sqrt(disc);
  return {0.5 * (-(p.a + 1.0) + root), 0.5 * (-(p.a + 1.0) - root), -p.c};
}

std::vector<State3> integrate(const State3& s0, const OdeParams& p, double T, double h,
                              const IntegrateOptions& opts) {
  return integrate_timed(s0, p, T, h, opts).states;
}

Trajectory integrate_timed(const State3& s0, const OdeParams& p, double T, double h,
                           const IntegrateOptions& opts) {
  check_step(T, h);
  const StepPlan plan = plan_steps(T, h);
  Trajectory traj;
  traj.t.reserve(static_cast<std::size_t>(plan.count) + 1);
  traj.states.reserve(static_cast<std::size_t>(plan.count) + 1);
  check_state(s0, opts, 0.0);
  traj.t.push_back(0.0);
  traj.states.push_back(s0);
  State3 s = s0;
  for (long long i = 0; i < plan.count; ++i) {
    const double step = (i + 1 == plan.count) ? plan.last : plan.h;
    s = rk4_step(s, p, step);
    const double t = (i + 1 == plan.count) ? T : static_cast<double>(i + 1) * plan.h;
    check_state(s, opts, t);
    traj.t.push_back(t);
    traj.states.push_back(s);
  }
  return traj;
}

namespace {

struct Augmented {
  State3 s;
  Matrix3 m;
};

Augmented augmented_rhs(const Augmented& u, const OdeParams& p) {
  Augmented out;
  out.s = vector_field(u.s, p);
  const Matrix3 j = jacobian(u.s, p);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += j[r][k] * u.m[k][c];
      out.m[r][c] = acc;
    }
  }
  return out;
}

Augmented aug_axpy(const Augmented& u, double h, const Augmented& k) {
  Augmented out{axpy(u.s, h, k.s), {}};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out.m[r][c] = u.m[r][c] + h * k.m[r][c];
  return out;
}

}  // namespace

VariationalResult integrate_variational(const State3& s0, const OdeParams& p, double T, double h) {
  check_step(T, h);
  const StepPlan plan = plan_steps(T, h);
  Augmented u{s0, Matrix3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}};
  for (long long i = 0; i < plan.count; ++i) {
    const double step = (i + 1 == plan.count) ? plan.last : plan.h;
    const Augmented k1 = augmented_rhs(u, p);
    const Augmented k2 = augmented_rhs(aug_axpy(u, 0.5 * step, k1), p);
    const Augmented k3 = augmented_rhs(aug_axpy(u, 0.5 * step, k2), p);
    const Augmented k4 = augmented_rhs(aug_axpy(u, step, k3), p);
    Augmented next = u;
    next.s = {u.s.x + step / 6.0 * (k1.s.x + 2 * k2.s.x + 2 * k3.s.x + k4.s.x),
              u.s.y + step / 6.0 * (k1.s.y + 2 * k2.s.y + 2 * k3.s.y + k4.s.y),
              u.s.z + step / 6.0 * (k1.s.z + 2 * k2.s.z + 2 * k3.s.z + k4.s.z)};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c)
        next.m[r][c] = u.m[r][c] + step / 6.0 *
                                       (k1.m[r][c] + 2 * k2.m[r][c] + 2 * k3.m[r][c] + k4.m[r][c]);
    u = next;
    check_state(u.s, {}, static_cast<double>(i + 1) * plan.h);
  }
  return {u.s, u.m};
}

double determinant(const Matrix3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double birkhoff_average_ode(const AmbientFn& phi, const State3& s0, const OdeParams& p, double T,
                            double h, double burn_in) {
  if (!(T > burn_in) || burn_in < 0.0) {
    throw ParameterError("birkhoff average needs T > burn_in >= 0");
  }
  const Trajectory traj = integrate_timed(s0, p, T, h);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i + 1 < traj.t.size(); ++i) {
    if (traj.t[i] < burn_in) continue;
    const double w = 0.5 * (traj.t[i + 1] - traj.t[i]);
    num += w * (phi(traj.states[i]) + phi(traj.states[i + 1]));
    den += 2.0 * w;
  }
  if (den <= 0.0) throw ParameterError("no samples after burn-in");
  return num / den;
}

double birkhoff_average_ode(const AmbientFn& phi, const State3& s0, const OdeParams& p, double T,
                            double h) {
  return birkhoff_average_ode(phi, s0, p, T, h, 0.05 * T);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,y,z\n" << std::setprecision(17);
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const State3& s = traj.states[i];
    os << traj.t[i] << ',' << s.x << ',' << s.y << ',' << s.z << '\n';
  }
}

}  // namespace srb::ode
