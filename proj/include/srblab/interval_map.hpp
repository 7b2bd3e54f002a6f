#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace srb {

/// Lower end of the interval I = [-1/2, 1/2].
inline constexpr double kIntervalLo = -0.5;
inline constexpr double kIntervalHi = 0.5;

/// Power-law Lorenz map on I with one discontinuity:
///   f(x) =  amp * (x - disc)^gamma - 1/2   for x > disc
///   f(x) = -amp * (disc - x)^gamma + 1/2   for x < disc
struct MapParams {
  double gamma = 0.6;
  double amp = 1.5157165665103982;  // 2^0.6
  double disc = 0.0;

  /// amp expressed relative to the full-branch amplitude 2^gamma.
  static MapParams from_ratio(double gamma, double amp_ratio, double disc = 0.0);
  double amp_ratio() const;

  /// Infimum of f' over I \ {disc}, attained at the endpoint farthest from disc.
  double min_slope() const;

  friend bool operator==(const MapParams&, const MapParams&) = default;
};

/// Throws ParameterError if f does not map I into I or gamma/disc are out of range.
/// Expansion (min_slope > 1) is checked separately by `is_expanding`.
void validate(const MapParams& mp);
bool is_expanding(const MapParams& mp);

double eval_f(double x, const MapParams& mp);
double deriv_f(double x, const MapParams& mp);

/// One-sided limits at the discontinuity: f(disc+) = -1/2, f(disc-) = +1/2.
double f_right_limit(const MapParams& mp);
double f_left_limit(const MapParams& mp);

/// Row-stochastic Ulam discretization of the transfer operator on a uniform
/// partition of I. Rows are stored sparsely: each row touches two contiguous
/// column ranges at most (one per branch).
class UlamMatrix {
 public:
  struct Entry {
    std::size_t col;
    double value;
  };

  UlamMatrix() = default;
  UlamMatrix(std::size_t n, std::vector<std::vector<Entry>> rows);

  std::size_t size() const { return n_; }
  const std::vector<Entry>& row(std::size_t i) const { return rows_[i]; }
  std::size_t nonzeros() const;

  /// out = v^T * M
  void left_multiply(std::span<const double> v, std::span<double> out) const;

  /// Dense copy; intended for small n.
  std::vector<std::vector<double>> dense() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<Entry>> rows_;
};

/// Entry (i,j) = |f(C_i) ∩ C_j| / |C_i| via exact inversion of each branch.
/// The cell containing disc is split into its two branch pieces.
UlamMatrix ulam_matrix(const MapParams& mp, std::size_t n);

/// Piecewise-constant density on n uniform cells of I.
struct UlamDensity {
  std::size_t n = 0;
  std::vector<double> weights;  // cell-averaged density values
  std::size_t iterations = 0;
  double residual = 0.0;  // last L1 change of the power iteration

  double cell_width() const { return 1.0 / static_cast<double>(n); }
  double cell_left(std::size_t i) const {
    return static_cast<double>(i) / static_cast<double>(n) + kIntervalLo;
  }
  double integral() const;
  double sup() const;
  /// Density value at x (right-continuous at cell boundaries).
  double at(double x) const;
};

struct DensityOptions {
  double tol = 1e-12;
  std::size_t max_iterations = 100000;
};

/// Left fixed vector of the Ulam matrix by power iteration from the uniform
/// density. Throws ConvergenceError (carrying the residual) at the cap.
UlamDensity invariant_density(const MapParams& mp, std::size_t n, const DensityOptions& opts = {});
UlamDensity invariant_density(const UlamMatrix& matrix, const DensityOptions& opts = {});

/// L1 distance between two densities on the same partition.
double l1_distance(const UlamDensity& a, const UlamDensity& b);

/// Averages pairs of cells; n must be even.
UlamDensity coarsen(const UlamDensity& d);

double l1_density_distance(const MapParams& mp1, const MapParams& mp2, std::size_t n,
                           const DensityOptions& opts = {});

/// Writes `cell_left,cell_right,weight` rows.
void write_density_csv(std::ostream& os, const UlamDensity& d);

}  // namespace srb
