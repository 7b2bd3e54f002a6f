#include "srblab/interval_map.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "srblab/errors.hpp"

namespace srb {

MapParams MapParams::from_ratio(double gamma, double amp_ratio, double disc) {
  return {gamma, amp_ratio * std::pow(2.0, gamma), disc};
}

double MapParams::amp_ratio() const { return amp / std::pow(2.0, gamma); }

double MapParams::min_slope() const {
  const double far = 0.5 + std::abs(disc);
  return amp * gamma * std::pow(far, gamma - 1.0);
}

void validate(const MapParams& mp) {
  if (!(mp.gamma > 0.5 && mp.gamma <= 1.0)) {
    throw ParameterError("gamma must lie in (1/2, 1], got " + std::to_string(mp.gamma));
  }
  if (!(mp.disc > kIntervalLo && mp.disc < kIntervalHi)) {
    throw ParameterError("disc must lie inside (-1/2, 1/2), got " + std::to_string(mp.disc));
  }
  if (!(mp.amp > 0.0)) throw ParameterError("amp must be positive");
  // Branch tops: amp * (1/2 -+ disc)^gamma must not exceed 1.
  const double top = mp.amp * std::pow(0.5 + std::abs(mp.disc), mp.gamma);
  if (top > 1.0 + 1e-15) {
    throw ParameterError("f does not map I into I (branch height " + std::to_string(top) + ")");
  }
}

bool is_expanding(const MapParams& mp) { return mp.min_slope() > 1.0; }

double eval_f(double x, const MapParams& mp) {
  if (x == mp.disc) throw DomainError("f is undefined at the discontinuity");
  if (x > mp.disc) return mp.amp * std::pow(x - mp.disc, mp.gamma) - 0.5;
  return -mp.amp * std::pow(mp.disc - x, mp.gamma) + 0.5;
}

double deriv_f(double x, const MapParams& mp) {
  if (x == mp.disc) throw DomainError("f' is undefined at the discontinuity");
  return mp.amp * mp.gamma * std::pow(std::abs(x - mp.disc), mp.gamma - 1.0);
}

double f_right_limit(const MapParams&) { return -0.5; }
double f_left_limit(const MapParams&) { return 0.5; }

// ---------------------------------------------------------------------------

UlamMatrix::UlamMatrix(std::size_t n, std::vector<std::vector<Entry>> rows)
    : n_(n), rows_(std::move(rows)) {}

std::size_t UlamMatrix::nonzeros() const {
  std::size_t nnz = 0;
  for (const auto& r : rows_) nnz += r.size();
  return nnz;
}

void UlamMatrix::left_multiply(std::span<const double> v, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    for (const Entry& e : rows_[i]) out[e.col] += vi * e.value;
  }
}

std::vector<std::vector<double>> UlamMatrix::dense() const {
  std::vector<std::vector<double>> m(n_, std::vector<double>(n_, 0.0));
  for (std::size_t i = 0; i < n_; ++i)
    for (const Entry& e : rows_[i]) m[i][e.col] += e.value;
  return m;
}

namespace {

double grid_point(std::size_t j, std::size_t n) {
  return static_cast<double>(j) / static_cast<double>(n) - 0.5;
}

// Inverse of the right branch on [-1/2, 1/2].
double inv_right(double y, const MapParams& mp) {
  return mp.disc + std::pow(std::max(y + 0.5, 0.0) / mp.amp, 1.0 / mp.gamma);
}

double inv_left(double y, const MapParams& mp) {
  return mp.disc - std::pow(std::max(0.5 - y, 0.0) / mp.amp, 1.0 / mp.gamma);
}

// Adds |piece ∩ f^{-1}(C_j)| * n to the row for one monotone piece [u, v].
void add_piece(double u, double v, bool right, const MapParams& mp, std::size_t n,
               std::vector<UlamMatrix::Entry>& row) {
  if (!(v > u)) return;
  const double fu = right ? (u == mp.disc ? -0.5 : eval_f(u, mp)) : eval_f(u, mp);
  const double fv = right ? eval_f(v, mp) : (v == mp.disc ? 0.5 : eval_f(v, mp));
  const double nd = static_cast<double>(n);
  auto clamp_index = [n](double t) {
    if (t < 0.0) return std::size_t{0};
    const auto k = static_cast<std::size_t>(t);
    return std::min(k, n - 1);
  };
  const std::size_t j0 = clamp_index(std::floor((fu + 0.5) * nd));
  const std::size_t j1 = clamp_index(std::ceil((fv + 0.5) * nd) - 1.0);
  for (std::size_t j = j0; j <= j1; ++j) {
    const double a = grid_point(j, n);
    const double b = grid_point(j + 1, n);
    const double lo = std::max(fu, a);
    const double hi = std::min(fv, b);
    if (!(hi > lo)) continue;
    const double x_lo = (lo == fu) ? u : (right ? inv_right(lo, mp) : inv_left(lo, mp));
    const double x_hi = (hi == fv) ? v : (right ? inv_right(hi, mp) : inv_left(hi, mp));
    const double len = x_hi - x_lo;
    if (len <= 0.0) continue;
    if (!row.empty() && row.back().col == j) {
      row.back().value += len * nd;
    } else {
      row.push_back({j, len * nd});
    }
  }
}

}  // namespace

UlamMatrix ulam_matrix(const MapParams& mp, std::size_t n) {
  if (n < 2) throw ParameterError("Ulam partition needs at least 2 cells");
  validate(mp);
  std::vector<std::vector<UlamMatrix::Entry>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double l = grid_point(i, n);
    const double r = grid_point(i + 1, n);
    auto& row = rows[i];
    if (r <= mp.disc) {
      add_piece(l, r, false, mp, n, row);
    } else if (l >= mp.disc) {
      add_piece(l, r, true, mp, n, row);
    } else {
      add_piece(l, mp.disc, false, mp, n, row);
      add_piece(mp.disc, r, true, mp, n, row);
    }
    // Left and right pieces can land in overlapping column ranges.
    std::sort(row.begin(), row.end(),
              [](const auto& x, const auto& y) { return x.col < y.col; });
    std::vector<UlamMatrix::Entry> merged;
    merged.reserve(row.size());
    for (const auto& e : row) {
      if (!merged.empty() && merged.back().col == e.col) {
        merged.back().value += e.value;
      } else {
        merged.push_back(e);
      }
    }
    row = std::move(merged);
  }
  return UlamMatrix(n, std::move(rows));
}

// ---------------------------------------------------------------------------

double UlamDensity::integral() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s / static_cast<double>(n);
}

double UlamDensity::sup() const {
  return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end());
}

double UlamDensity::at(double x) const {
  const double t = (x - kIntervalLo) * static_cast<double>(n);
  auto i = static_cast<long long>(std::floor(t));
  i = std::clamp<long long>(i, 0, static_cast<long long>(n) - 1);
  return weights[static_cast<std::size_t>(i)];
}

UlamDensity invariant_density(const MapParams& mp, std::size_t n, const DensityOptions& opts) {
  return invariant_density(ulam_matrix(mp, n), opts);
}

UlamDensity invariant_density(const UlamMatrix& matrix, const DensityOptions& opts) {
  if (!(opts.tol > 0.0)) throw ParameterError("density tolerance must be positive");
  const std::size_t n = matrix.size();
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  double change = 0.0;
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    matrix.left_multiply(v, next);
    double total = 0.0;
    for (double x : next) total += x;
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= total;
      change += std::abs(next[i] - v[i]);
    }
    v.swap(next);
    if (change < opts.tol) break;
  }
  if (!(change < opts.tol)) {
    throw ConvergenceError("power iteration did not converge (L1 change " +
                               std::to_string(change) + ")",
                           change);
  }
  UlamDensity d;
  d.n = n;
  d.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.weights[i] = v[i] * static_cast<double>(n);
  d.iterations = it + 1;
  d.residual = change;
  return d;
}

double l1_distance(const UlamDensity& a, const UlamDensity& b) {
  if (a.n != b.n) throw ParameterError("densities live on different partitions");
  double s = 0.0;
  for (std::size_t i = 0; i < a.n; ++i) s += std::abs(a.weights[i] - b.weights[i]);
  return s / static_cast<double>(a.n);
}

UlamDensity coarsen(const UlamDensity& d) {
  if (d.n % 2 != 0) throw ParameterError("coarsening needs an even cell count");
  UlamDensity c;
  c.n = d.n / 2;
  c.weights.resize(c.n);
  for (std::size_t i = 0; i < c.n; ++i) c.weights[i] = 0.5 * (d.weights[2 * i] + d.weights[2 * i + 1]);
  c.iterations = d.iterations;
  c.residual = d.residual;
  return c;
}

double l1_density_distance(const MapParams& mp1, const MapParams& mp2, std::size_t n,
                           const DensityOptions& opts) {
  return l1_distance(invariant_density(mp1, n, opts), invariant_density(mp2, n, opts));
}

void write_density_csv(std::ostream& os, const UlamDensity& d) {
  os << "cell_left,cell_right,weight\n" << std::setprecision(17);
  for (std::size_t i = 0; i < d.n; ++i) {
    os << d.cell_left(i) << ',' << d.cell_left(i + 1) << ',' << d.weights[i] << '\n';
  }
}

}  // namespace srb
