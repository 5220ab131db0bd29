#include "screening/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace screening::num {

namespace {

GaussRule compute_rule(int order) {
  // Newton iteration on Legendre polynomials, exploiting node symmetry.
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int m = (order + 1) / 2;
  const double n = static_cast<double>(order);
  for (int i = 1; i <= m; ++i) {
    double z = std::cos(M_PI * (i - 0.25) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    rule.nodes[i - 1] = -z;
    rule.nodes[order - i] = z;
    rule.weights[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[order - i] = rule.weights[i - 1];
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int order) {
  if (a == b) return 0.0;
  const auto& rule = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < order; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

double integrate_cells(const std::function<double(double)>& f, std::span<const double> pts,
                       int order) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1] - pts[i] < 1e-15) continue;
    sum += integrate(f, pts[i], pts[i + 1], order);
  }
  return sum;
}

double find_root_increasing(const std::function<double(double)>& f, double lo, double hi,
                            double tol) {
  double flo = f(lo), fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) {
    throw BracketError("root not bracketed: f(" + std::to_string(lo) + ")=" + std::to_string(flo) +
                       ", f(" + std::to_string(hi) + ")=" + std::to_string(fhi));
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  // Bisection with a secant candidate each step; the secant point is used
  // only when it falls safely inside the current bracket. Returns the best
  // evaluated point, which for near-linear residuals is far inside the
  // final bracket width.
  double best_x = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double best_f = std::min(std::abs(flo), std::abs(fhi));
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double x = 0.5 * (lo + hi);
    if (fhi > flo) {
      const double s = lo - flo * (hi - lo) / (fhi - flo);
      if (s > lo + 1e-3 * (hi - lo) && s < hi - 1e-3 * (hi - lo)) x = s;
    }
    const double fx = f(x);
    if (std::abs(fx) < best_f) {
      best_f = std::abs(fx);
      best_x = x;
    }
    if (fx == 0.0) return x;
    if (fx < 0.0) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  const double mid = 0.5 * (lo + hi);
  const double fmid = f(mid);
  return std::abs(fmid) < best_f ? mid : best_x;
}

double first_crossing(const std::function<double(double)>& f, double lo, double hi, int sign,
                      int scan_points, double tol) {
  const double s = static_cast<double>(sign);
  double prev_x = lo;
  double prev_f = s * f(lo);
  if (prev_f >= 0.0) return lo;
  for (int i = 1; i <= scan_points; ++i) {
    const double x = lo + (hi - lo) * i / scan_points;
    const double fx = s * f(x);
    if (fx >= 0.0) {
      return find_root_increasing([&](double t) { return s * f(t); }, prev_x, x, tol);
    }
    prev_x = x;
    prev_f = fx;
  }
  return hi;
}

void project_nonincreasing(std::span<double> v) {
  // PAV on the reversed order: non-increasing v <=> non-decreasing reverse.
  const std::size_t n = v.size();
  if (n < 2) return;
  std::vector<double> level(n);
  std::vector<std::size_t> count(n);
  std::size_t blocks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    level[blocks] = v[i];
    count[blocks] = 1;
    ++blocks;
    while (blocks > 1 && level[blocks - 2] < level[blocks - 1]) {
      const double merged = (level[blocks - 2] * count[blocks - 2] + level[blocks - 1] * count[blocks - 1]) /
                            (count[blocks - 2] + count[blocks - 1]);
      count[blocks - 2] += count[blocks - 1];
      level[blocks - 2] = merged;
      --blocks;
    }
  }
  std::size_t idx = 0;
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t k = 0; k < count[b]; ++k) v[idx++] = level[b];
}

std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b,
                                      double snap) {
  std::vector<double> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double x : out) {
    if (uniq.empty() || x - uniq.back() > snap) uniq.push_back(x);
  }
  return uniq;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 knots");
  std::vector<double> d(n - 1);  // secant slopes
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = x_[i + 1] - x_[i];
    if (h <= 0.0) throw std::invalid_argument("MonotoneCubic: knots must be strictly increasing");
    d[i] = (y_[i + 1] - y_[i]) / h;
  }
  m_.assign(n, 0.0);
  m_[0] = d[0];
  m_[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      m_[i] = 0.0;
    } else {
      // Harmonic mean of the adjacent secants (Fritsch-Carlson region).
      const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
      const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
      m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (d[i] == 0.0) {
      m_[i] = m_[i + 1] = 0.0;
      continue;
    }
    const double a = m_[i] / d[i];
    const double b = m_[i + 1] / d[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double t = 3.0 / std::sqrt(s);
      m_[i] = t * a * d[i];
      m_[i + 1] = t * b * d[i];
    }
  }
}

std::size_t MonotoneCubic::cell(double x) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(x_.begin(), it));
  if (i == 0) return 0;
  if (i >= x_.size()) return x_.size() - 2;
  return i - 1;
}

double MonotoneCubic::operator()(double x) const {
  const std::size_t i = cell(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
  const std::size_t i = cell(x);
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double d00 = (6 * t2 - 6 * t) / h, d10 = 3 * t2 - 4 * t + 1;
  const double d01 = (-6 * t2 + 6 * t) / h, d11 = 3 * t2 - 2 * t;
  return d00 * y_[i] + d10 * m_[i] + d01 * y_[i + 1] + d11 * m_[i + 1];
}

}  // namespace screening::num
