#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace screening {

/// Production cost C(q, theta) with the four partials the menu equations use.
/// Sign assumptions (C_q, C_theta > 0 for q > 0; C_qq, C_qtheta > 0) are not
/// enforced here; validate_cost scans them on a lattice. Implementations must
/// evaluate for q < 0 as well: the multiplier diagnostics follow the variational
/// path below the q = 0 clamp.
class CostModel {
 public:
  virtual ~CostModel() = default;

  virtual double cost(double q, double theta) const = 0;
  virtual double cost_q(double q, double theta) const = 0;
  virtual double cost_theta(double q, double theta) const = 0;
  virtual double cost_qtheta(double q, double theta) const = 0;
  virtual double cost_qq(double q, double theta) const = 0;

  virtual std::string describe() const = 0;
};

using CostPtr = std::shared_ptr<const CostModel>;

/// C(q, theta) = q^2/2 + theta*q. All partials are exact.
class QuadraticCost final : public CostModel {
 public:
  double cost(double q, double theta) const override { return 0.5 * q * q + theta * q; }
  double cost_q(double q, double theta) const override { return q + theta; }
  double cost_theta(double q, double /*theta*/) const override { return q; }
  double cost_qtheta(double /*q*/, double /*theta*/) const override { return 1.0; }
  double cost_qq(double /*q*/, double /*theta*/) const override { return 1.0; }
  std::string describe() const override { return "quadratic"; }
};

/// C(q, theta) = q^2/2 + theta*q + c*theta*q^2 with c >= 0 (config key
/// "polyphrase"). Keeps single crossing: C_qtheta = 1 + 2cq > 0 for q >= 0.
class ExtendedQuadraticCost final : public CostModel {
 public:
  explicit ExtendedQuadraticCost(double c);

  double cost(double q, double theta) const override {
    return 0.5 * q * q + theta * q + c_ * theta * q * q;
  }
  double cost_q(double q, double theta) const override { return q + theta + 2.0 * c_ * theta * q; }
  double cost_theta(double q, double /*theta*/) const override { return q + c_ * q * q; }
  double cost_qtheta(double q, double /*theta*/) const override { return 1.0 + 2.0 * c_ * q; }
  double cost_qq(double /*q*/, double theta) const override { return 1.0 + 2.0 * c_ * theta; }
  std::string describe() const override;
  double coefficient() const { return c_; }

 private:
  double c_;
};

/// Callable-backed model for tests and experiments.
class CustomCost final : public CostModel {
 public:
  using Fn = std::function<double(double, double)>;
  CustomCost(Fn c, Fn cq, Fn ctheta, Fn cqtheta, Fn cqq, std::string name = "custom");

  double cost(double q, double theta) const override { return c_(q, theta); }
  double cost_q(double q, double theta) const override { return cq_(q, theta); }
  double cost_theta(double q, double theta) const override { return ctheta_(q, theta); }
  double cost_qtheta(double q, double theta) const override { return cqtheta_(q, theta); }
  double cost_qq(double q, double theta) const override { return cqq_(q, theta); }
  std::string describe() const override { return name_; }

 private:
  Fn c_, cq_, ctheta_, cqtheta_, cqq_;
  std::string name_;
};

/// Psi(q, theta; rho) = C_q + rho * C_qtheta, the virtual marginal cost.
/// Strictly increasing in q under the sign assumptions.
double virtual_marginal_cost(const CostModel& cost, double q, double theta, double rho);

struct LatticeSpec {
  double q_max = 2.0;
  int q_points = 41;
  int theta_points = 41;
};

struct CostCheckEntry {
  std::string name;
  bool pass = true;
  bool warning_only = false;
  double worst = 0.0;
  double at_q = 0.0;
  double at_theta = 0.0;
};

struct CostValidationReport {
  std::vector<CostCheckEntry> entries;

  /// Failures in non-warning entries only.
  bool ok() const;
  const CostCheckEntry* find(const std::string& name) const;
};

/// Sign conditions, C(0,theta) = 0 normalization, and central finite-difference
/// consistency of the supplied partials (relative tolerance 1e-5 on the lattice).
/// The optional condition C_qqtheta <= 0 (used only by the pointwise-FOC
/// monotonicity argument) is reported as a warning entry.
CostValidationReport validate_cost(const CostModel& cost, const LatticeSpec& lattice = {});

}  // namespace screening
