#include "srblab/quadrature.hpp"

#include <cmath>

namespace srb {

namespace {

double simpson_step(const std::function<double(double)>& fn, double a, double fa, double b,
                    double fb, double m, double fm, double whole, double tol, int depth,
                    int forced) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = fn(lm);
  const double frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || (forced <= 0 && std::abs(delta) <= 15.0 * tol)) {
    return left + right + delta / 15.0;
  }
  return simpson_step(fn, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, forced - 1) +
         simpson_step(fn, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, forced - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double tol,
                        int max_depth, int min_depth) {
  if (!(b > a)) return 0.0;
  const double fa = fn(a);
  const double fb = fn(b);
  const double m = 0.5 * (a + b);
  const double fm = fn(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(fn, a, fa, b, fb, m, fm, whole, tol, max_depth, min_depth);
}

}  // namespace srb
