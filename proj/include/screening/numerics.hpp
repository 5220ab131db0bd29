#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace screening::num {

/// Thrown when a root-finder cannot bracket a sign change.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gauss-Legendre nodes and weights on [-1, 1]. Cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

/// \int_a^b f dx with a single Gauss-Legendre rule.
double integrate(const std::function<double(double)>& f, double a, double b, int order);

/// Composite integral over [pts.front(), pts.back()] with one rule per cell.
/// `pts` must be sorted; duplicates are skipped.
double integrate_cells(const std::function<double(double)>& f, std::span<const double> pts,
                       int order);

/// Root of a continuous, strictly increasing f on [lo, hi] with f(lo) <= 0 <= f(hi).
/// Bisection with Newton-style secant acceleration; absolute tolerance in x.
/// Throws BracketError when the bracket does not straddle a sign change.
double find_root_increasing(const std::function<double(double)>& f, double lo, double hi,
                            double tol);

/// Smallest sign-change root of f on [lo, hi], located by a scan over
/// `scan_points` cells followed by bisection. Returns `hi` when f never
/// crosses zero (caller interprets), `lo` when f(lo) is already past zero.
/// `sign`: +1 looks for a - to + crossing, -1 for + to -.
double first_crossing(const std::function<double(double)>& f, double lo, double hi, int sign,
                      int scan_points, double tol);

/// L2 projection onto the non-increasing cone (pool adjacent violators).
void project_nonincreasing(std::span<double> values);

/// Sorted union of points, dropping near-duplicates (within `snap`).
std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b,
                                      double snap = 1e-12);

std::vector<double> linspace(double lo, double hi, int n);

/// Monotone piecewise-cubic interpolant (Fritsch-Carlson slopes).
/// Preserves monotonicity of the data; derivative is continuous.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;
  const std::vector<double>& knots() const { return x_; }

 private:
  std::size_t cell(double x) const;
  std::vector<double> x_, y_, m_;  // knots, values, knot slopes
};

}  // namespace screening::num
