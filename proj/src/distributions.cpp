#include "screening/distributions.hpp"

#include <cmath>
#include <sstream>

namespace screening {

double TypeDistribution::quantile(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

PolynomialDistribution::PolynomialDistribution(double exponent) : a_(exponent) {
  if (!(exponent > 0.0)) throw InvalidInputError("polynomial distribution: exponent must be > 0");
}

double PolynomialDistribution::cdf(double theta) const {
  if (theta <= 0.0) return 0.0;
  if (theta >= 1.0) return 1.0;
  return std::pow(theta, a_);
}

double PolynomialDistribution::pdf(double theta) const {
  return a_ * std::pow(theta, a_ - 1.0);
}

double PolynomialDistribution::quantile(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return std::pow(u, 1.0 / a_);
}

std::string PolynomialDistribution::describe() const {
  std::ostringstream os;
  os << "polynomial(a=" << a_ << ")";
  return os.str();
}

TabulatedDistribution::TabulatedDistribution(std::vector<double> knots,
                                             std::vector<double> cdf_values) {
  if (knots.size() < 2 || knots.size() != cdf_values.size())
    throw InvalidInputError("tabulated distribution: knots/cdf size mismatch");
  if (knots.front() != 0.0 || knots.back() != 1.0)
    throw InvalidInputError("tabulated distribution: knots must span [0, 1]");
  if (cdf_values.front() != 0.0 || cdf_values.back() != 1.0)
    throw InvalidInputError("tabulated distribution: cdf must run from 0 to 1");
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i + 1] <= knots[i])
      throw InvalidInputError("tabulated distribution: knots must be strictly increasing");
    if (cdf_values[i + 1] <= cdf_values[i])
      throw InvalidInputError("tabulated distribution: cdf values must be strictly increasing");
  }
  spline_ = num::MonotoneCubic(std::move(knots), std::move(cdf_values));
}

double TabulatedDistribution::cdf(double theta) const {
  if (theta <= 0.0) return 0.0;
  if (theta >= 1.0) return 1.0;
  return spline_(theta);
}

double TabulatedDistribution::pdf(double theta) const { return spline_.derivative(theta); }

double TabulatedDistribution::reverse_hazard_ratio(double theta) const {
  if (theta <= 0.0) return 0.0;
  const double f = pdf(theta);
  if (f <= 0.0) throw InvalidInputError("tabulated distribution: pdf not positive at interior point");
  return cdf(theta) / f;
}

std::vector<double> TabulatedDistribution::breakpoints() const { return spline_.knots(); }

std::string TabulatedDistribution::describe() const {
  std::ostringstream os;
  os << "tabulated(" << spline_.knots().size() << " knots)";
  return os.str();
}

std::string to_string(OrderingRegime r) {
  switch (r) {
    case OrderingRegime::MLRP: return "MLRP";
    case OrderingRegime::ReverseMLRP: return "ReverseMLRP";
    default: return "Neither";
  }
}

DistributionCheck validate_distribution(const TypeDistribution& d, const GridSpec& grid) {
  DistributionCheck out;
  const auto thetas = grid.make();
  if (std::abs(d.cdf(0.0)) > 1e-12 || std::abs(d.cdf(1.0) - 1.0) > 1e-12) {
    out.ok = false;
    out.message = "cdf endpoints differ from {0, 1}";
    return out;
  }
  double prev = d.cdf(thetas.front());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double t = thetas[i];
    const double F = d.cdf(t);
    if (F < prev - 1e-12) {
      out.ok = false;
      out.at = t;
      out.message = "cdf decreasing on grid";
      return out;
    }
    prev = F;
    const double f = d.pdf(t);
    if (!(f > 0.0)) {
      out.ok = false;
      out.at = t;
      out.message = "pdf not positive on (0, 1]";
      return out;
    }
    // Interior consistency of the first-class ratio against F = rho * f.
    if (i > 0 && i + 1 < thetas.size()) {
      const double viol = std::abs(d.reverse_hazard_ratio(t) * f - F);
      if (viol > out.worst) {
        out.worst = viol;
        out.at = t;
      }
    }
  }
  if (out.worst > d.consistency_tolerance()) {
    out.ok = false;
    out.message = "rho*f vs F consistency violated";
  }
  return out;
}

namespace {

enum Direction { NonDecreasing, NonIncreasing };

bool monotone_on_grid(const std::function<double(double)>& g, std::span<const double> thetas,
                      Direction dir, double tol) {
  double prev = g(thetas.front());
  for (std::size_t i = 1; i < thetas.size(); ++i) {
    const double cur = g(thetas[i]);
    const double d = cur - prev;
    if (dir == NonDecreasing ? d < -tol : d > tol) return false;
    prev = cur;
  }
  return true;
}

}  // namespace

OrderingRegime classify_ordering(const TypeDistribution& trait, const TypeDistribution& nontrait,
                                 const GridSpec& grid, double tol) {
  for (const auto* d : {&trait, &nontrait}) {
    const auto check = validate_distribution(*d, grid);
    if (!check.ok) throw InvalidInputError("invalid distribution: " + check.message);
  }
  const auto thetas = grid.make();
  const auto ratio = [&](double t) { return trait.pdf(t) / nontrait.pdf(t); };
  if (monotone_on_grid(ratio, thetas, NonDecreasing, tol)) return OrderingRegime::MLRP;
  if (monotone_on_grid(ratio, thetas, NonIncreasing, tol)) return OrderingRegime::ReverseMLRP;
  return OrderingRegime::Neither;
}

bool reverse_mlrp_holds(const TypeDistribution& trait, const TypeDistribution& nontrait,
                        const GridSpec& grid, double tol) {
  const auto thetas = grid.make();
  const auto ratio = [&](double t) { return trait.pdf(t) / nontrait.pdf(t); };
  return monotone_on_grid(ratio, thetas, NonIncreasing, tol);
}

bool check_monotone_reverse_hazard(const TypeDistribution& d, const GridSpec& grid, double tol) {
  const auto thetas = grid.make();
  return monotone_on_grid([&](double t) { return d.reverse_hazard_ratio(t); }, thetas,
                          NonDecreasing, tol);
}

bool check_rent_single_crossing(const TypeDistribution& trait, const TypeDistribution& nontrait,
                                const GridSpec& grid, double tol) {
  const auto thetas = grid.make();
  const auto gap = [&](double t) {
    return trait.reverse_hazard_ratio(t) - nontrait.reverse_hazard_ratio(t);
  };
  return monotone_on_grid(gap, thetas, NonDecreasing, tol);
}

MixtureMeasures::MixtureMeasures(DistributionPtr trait, DistributionPtr nontrait,
                                 double trait_share, double tau)
    : trait_(std::move(trait)), nontrait_(std::move(nontrait)), pi_(trait_share), tau_(tau) {}

double MixtureMeasures::fhat(double theta) const {
  return pi_ * trait_->pdf(theta) + (1.0 - pi_) * nontrait_->pdf(theta);
}

double MixtureMeasures::ftilde(double theta) const {
  return (1.0 - tau_) * pi_ * trait_->pdf(theta) + (1.0 - pi_) * nontrait_->pdf(theta);
}

double MixtureMeasures::Fhat(double theta) const {
  return pi_ * trait_->cdf(theta) + (1.0 - pi_) * nontrait_->cdf(theta);
}

double MixtureMeasures::Ftilde(double theta) const {
  return (1.0 - tau_) * pi_ * trait_->cdf(theta) + (1.0 - pi_) * nontrait_->cdf(theta);
}

MixtureMeasures mixture(DistributionPtr trait, DistributionPtr nontrait, double trait_share,
                        double tau) {
  if (!trait || !nontrait) throw InvalidInputError("mixture: null distribution");
  if (!(trait_share > 0.0 && trait_share < 1.0))
    throw InvalidInputError("mixture: trait_share must lie in (0, 1)");
  if (!(tau >= 0.0 && tau < 1.0)) throw InvalidInputError("mixture: tax credit must lie in [0, 1)");
  return MixtureMeasures(std::move(trait), std::move(nontrait), trait_share, tau);
}

}  // namespace screening
