#include "screening/cost.hpp"

#include <cmath>
#include <sstream>

#include "screening/distributions.hpp"

namespace screening {

ExtendedQuadraticCost::ExtendedQuadraticCost(double c) : c_(c) {
  if (!(c >= 0.0)) throw InvalidInputError("polyphrase cost: coefficient must be >= 0");
}

std::string ExtendedQuadraticCost::describe() const {
  std::ostringstream os;
  os << "polyphrase(c=" << c_ << ")";
  return os.str();
}

CustomCost::CustomCost(Fn c, Fn cq, Fn ctheta, Fn cqtheta, Fn cqq, std::string name)
    : c_(std::move(c)),
      cq_(std::move(cq)),
      ctheta_(std::move(ctheta)),
      cqtheta_(std::move(cqtheta)),
      cqq_(std::move(cqq)),
      name_(std::move(name)) {}

double virtual_marginal_cost(const CostModel& cost, double q, double theta, double rho) {
  return cost.cost_q(q, theta) + rho * cost.cost_qtheta(q, theta);
}

bool CostValidationReport::ok() const {
  for (const auto& e : entries)
    if (!e.pass && !e.warning_only) return false;
  return true;
}

const CostCheckEntry* CostValidationReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

namespace {

struct Worst {
  double value = 0.0;
  double q = 0.0;
  double theta = 0.0;

  void update(double v, double q_, double t_) {
    if (v > value) {
      value = v;
      q = q_;
      theta = t_;
    }
  }
};

}  // namespace

CostValidationReport validate_cost(const CostModel& cost, const LatticeSpec& lattice) {
  CostValidationReport report;
  const auto qs = num::linspace(0.0, lattice.q_max, lattice.q_points);
  const auto thetas = num::linspace(0.0, 1.0, lattice.theta_points);

  Worst zero_cost, sign_cq, sign_ctheta, sign_cqq, sign_cqtheta;
  Worst fd_cq, fd_ctheta, fd_cqtheta, fd_cqq, third;

  for (double t : thetas) {
    zero_cost.update(std::abs(cost.cost(0.0, t)), 0.0, t);
    for (double q : qs) {
      if (q > 0.0) {
        sign_cq.update(-cost.cost_q(q, t), q, t);
        sign_ctheta.update(-cost.cost_theta(q, t), q, t);
      }
      sign_cqq.update(-cost.cost_qq(q, t), q, t);
      sign_cqtheta.update(-cost.cost_qtheta(q, t), q, t);

      // Central differences of C against the supplied partials, relative error.
      const double hq = 1e-5 * std::max(1.0, std::abs(q));
      const double ht = 1e-5;
      const double scale_q = std::max(1.0, std::abs(cost.cost_q(q, t)));
      fd_cq.update(std::abs((cost.cost(q + hq, t) - cost.cost(q - hq, t)) / (2 * hq) -
                            cost.cost_q(q, t)) /
                       scale_q,
                   q, t);
      if (t >= ht && t <= 1.0 - ht) {
        const double scale_t = std::max(1.0, std::abs(cost.cost_theta(q, t)));
        fd_ctheta.update(std::abs((cost.cost(q, t + ht) - cost.cost(q, t - ht)) / (2 * ht) -
                                  cost.cost_theta(q, t)) /
                             scale_t,
                         q, t);
        const double mixed = (cost.cost(q + hq, t + ht) - cost.cost(q + hq, t - ht) -
                              cost.cost(q - hq, t + ht) + cost.cost(q - hq, t - ht)) /
                             (4 * hq * ht);
        fd_cqtheta.update(std::abs(mixed - cost.cost_qtheta(q, t)) /
                              std::max(1.0, std::abs(cost.cost_qtheta(q, t))),
                          q, t);
        // d/dtheta of C_qq, for the optional third-derivative warning.
        const double cqq_slope =
            (cost.cost_qq(q, t + ht) - cost.cost_qq(q, t - ht)) / (2 * ht);
        third.update(cqq_slope, q, t);
      }
      const double second = (cost.cost_q(q + hq, t) - cost.cost_q(q - hq, t)) / (2 * hq);
      fd_cqq.update(std::abs(second - cost.cost_qq(q, t)) /
                        std::max(1.0, std::abs(cost.cost_qq(q, t))),
                    q, t);
    }
  }

  const auto sign_entry = [&](const std::string& name, const Worst& w, double tol) {
    report.entries.push_back({name, w.value <= tol, false, w.value, w.q, w.theta});
  };
  sign_entry("cost_zero_output", zero_cost, 1e-12);
  sign_entry("sign_cost_q", sign_cq, 0.0);
  sign_entry("sign_cost_theta", sign_ctheta, 0.0);
  sign_entry("sign_cost_qq", sign_cqq, 0.0);
  sign_entry("sign_cost_qtheta", sign_cqtheta, 0.0);
  sign_entry("fd_cost_q", fd_cq, 1e-5);
  sign_entry("fd_cost_theta", fd_ctheta, 1e-5);
  sign_entry("fd_cost_qtheta", fd_cqtheta, 1e-4);
  sign_entry("fd_cost_qq", fd_cqq, 1e-4);
  report.entries.push_back(
      {"warn_cost_qqtheta_nonpositive", third.value <= 1e-10, true, third.value, third.q,
       third.theta});
  return report;
}

}  // namespace screening
