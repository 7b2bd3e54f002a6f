#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

namespace srb::ode {

/// Coefficients of the classical Lorenz system.
struct OdeParams {
  double a = 10.0;
  double b = 28.0;
  double c = 8.0 / 3.0;
};

struct State3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const State3&, const State3&) = default;
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Eigenvalues of the linearization at the origin, labeled so that
/// l1 is the expanding one, l2 the strong contracting one and l3 = -c.
struct Eigenvalues {
  double l1 = 0.0;
  double l2 = 0.0;
  double l3 = 0.0;

  friend bool operator==(const Eigenvalues&, const Eigenvalues&) = default;
};

State3 vector_field(const State3& s, const OdeParams& p);

Matrix3 jacobian(const State3& s, const OdeParams& p);

/// Divergence of the field; independent of the point.
double divergence(const OdeParams& p);

/// Throws ParameterError when the discriminant (a+1)^2 + 4a(b-1) is negative.
Eigenvalues origin_eigenvalues(const OdeParams& p);

struct IntegrateOptions {
  /// Abort with DivergenceError once |s| exceeds this radius; <= 0 disables the check.
  double trap_radius = 200.0;
};

/// Fixed-step classical RK4. Returns round(T/h) + 1 states including s0; the
/// last step is shortened when T is not a multiple of h.
std::vector<State3> integrate(const State3& s0, const OdeParams& p, double T, double h,
                              const IntegrateOptions& opts = {});

struct Trajectory {
  std::vector<double> t;
  std::vector<State3> states;
};

Trajectory integrate_timed(const State3& s0, const OdeParams& p, double T, double h,
                           const IntegrateOptions& opts = {});

/// State and tangent map after time T (RK4 on the joint variational system).
struct VariationalResult {
  State3 state;
  Matrix3 tangent;
};

VariationalResult integrate_variational(const State3& s0, const OdeParams& p, double T, double h);

double determinant(const Matrix3& m);

using AmbientFn = std::function<double(const State3&)>;

/// Time average of phi along the trajectory after discarding `burn_in` time
/// units. Trapezoid weights; the normalization uses the same weights, so a
/// constant observable is reproduced exactly.
double birkhoff_average_ode(const AmbientFn& phi, const State3& s0, const OdeParams& p, double T,
                            double h, double burn_in);

/// Convenience: burn-in of 5% of T.
double birkhoff_average_ode(const AmbientFn& phi, const State3& s0, const OdeParams& p, double T,
                            double h);

/// Writes `t,x,y,z` rows with full double precision.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace srb::ode
