#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "screening/numerics.hpp"

namespace screening {

/// Rejected input (invariant violation, bad parameter range).
class InvalidInputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A cost-type law on [0,1]. The reverse-hazard ratio rho = F/f is first-class
/// because the pdf may be singular at 0 (polynomial families with exponent < 1);
/// every consumer of information rents reads rho, never F/f by division.
class TypeDistribution {
 public:
  virtual ~TypeDistribution() = default;

  virtual double cdf(double theta) const = 0;
  virtual double pdf(double theta) const = 0;
  /// rho(theta) = F(theta)/f(theta), extended by continuity at theta = 0.
  virtual double reverse_hazard_ratio(double theta) const = 0;

  /// Inverse cdf. Default: bisection on the cdf.
  virtual double quantile(double u) const;

  /// Points where the law loses smoothness (always includes 0 and 1).
  virtual std::vector<double> breakpoints() const { return {0.0, 1.0}; }

  /// rho*f vs F consistency tolerance on interior grid points.
  virtual double consistency_tolerance() const { return 1e-8; }

  virtual std::string describe() const = 0;
};

using DistributionPtr = std::shared_ptr<const TypeDistribution>;

/// F(theta) = theta^a, a > 0. rho is exactly linear: theta / a.
/// For a < 1 the pdf diverges at 0 while rho stays finite.
class PolynomialDistribution final : public TypeDistribution {
 public:
  explicit PolynomialDistribution(double exponent);

  double cdf(double theta) const override;
  double pdf(double theta) const override;
  double reverse_hazard_ratio(double theta) const override { return theta / a_; }
  double quantile(double u) const override;
  std::string describe() const override;
  double exponent() const { return a_; }

 private:
  double a_;
};

/// CDF given at knots, filled in with a monotone piecewise-cubic interpolant
/// so the interpolated cdf cannot oscillate.
class TabulatedDistribution final : public TypeDistribution {
 public:
  TabulatedDistribution(std::vector<double> knots, std::vector<double> cdf_values);

  double cdf(double theta) const override;
  double pdf(double theta) const override;
  double reverse_hazard_ratio(double theta) const override;
  std::vector<double> breakpoints() const override;
  double consistency_tolerance() const override { return 1e-5; }
  std::string describe() const override;

 private:
  num::MonotoneCubic spline_;
};

enum class OrderingRegime { MLRP, ReverseMLRP, Neither };

std::string to_string(OrderingRegime r);

struct GridSpec {
  double lo = 1e-6;
  double hi = 1.0;
  int points = 1001;

  std::vector<double> make() const { return num::linspace(lo, hi, points); }
};

struct DistributionCheck {
  bool ok = true;
  double worst = 0.0;
  double at = 0.0;
  std::string message;
};

/// Invariant scan: cdf range/monotonicity, pdf positivity, rho*f vs F consistency.
DistributionCheck validate_distribution(const TypeDistribution& d, const GridSpec& grid = {});

/// Direction of the likelihood ratio f_T/f_N across the grid.
/// Ties (constant ratio within tolerance) classify as MLRP.
/// Throws InvalidInputError when either distribution fails validation.
OrderingRegime classify_ordering(const TypeDistribution& trait, const TypeDistribution& nontrait,
                                 const GridSpec& grid = {}, double tol = 1e-10);

/// True when the likelihood ratio f_T/f_N is non-increasing within tolerance
/// (Reverse MLRP as a weak order; holds with equality for identical laws).
bool reverse_mlrp_holds(const TypeDistribution& trait, const TypeDistribution& nontrait,
                        const GridSpec& grid = {}, double tol = 1e-10);

/// f/F non-increasing, checked as rho non-decreasing across the grid.
bool check_monotone_reverse_hazard(const TypeDistribution& d, const GridSpec& grid = {},
                                   double tol = 1e-10);

/// rho_T - rho_N non-decreasing across the grid (information-rent single crossing).
bool check_rent_single_crossing(const TypeDistribution& trait, const TypeDistribution& nontrait,
                                const GridSpec& grid = {}, double tol = 1e-10);

/// Population mixtures entering the pooling equation. When tau > 0 the tilde
/// pair is a measure, not a probability law: Ftilde(1) = (1-tau)*pi_T + (1-pi_T).
class MixtureMeasures {
 public:
  MixtureMeasures(DistributionPtr trait, DistributionPtr nontrait, double trait_share, double tau);

  double fhat(double theta) const;
  double ftilde(double theta) const;
  double Fhat(double theta) const;
  double Ftilde(double theta) const;

  double trait_share() const { return pi_; }
  double tau() const { return tau_; }

 private:
  DistributionPtr trait_, nontrait_;
  double pi_, tau_;
};

/// Validates shares/credit ranges and builds the mixture functions.
MixtureMeasures mixture(DistributionPtr trait, DistributionPtr nontrait, double trait_share,
                        double tau);

}  // namespace screening
