#pragma once

#include <functional>

namespace srb {

/// Adaptive Simpson quadrature of fn over [a, b] to absolute tolerance `tol`.
/// The first `min_depth` bisection levels are always taken so that a lucky
/// agreement on a coarse panel cannot hide a narrow feature; recursion stops
/// at `max_depth`.
double adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double tol,
                        int max_depth = 40, int min_depth = 3);

}  // namespace srb
