#include <doctest.h>

#include <cmath>
#include <memory>

#include "screening/cost.hpp"

using namespace screening;

TEST_CASE("quadratic partials are exact") {
  QuadraticCost c;
  CHECK(c.cost(0.4, 0.3) == doctest::Approx(0.08 + 0.12).epsilon(1e-15));
  CHECK(c.cost_q(0.4, 0.3) == 0.7);
  CHECK(c.cost_theta(0.4, 0.3) == 0.4);
  CHECK(c.cost_qtheta(0.4, 0.3) == 1.0);
  CHECK(c.cost_qq(0.4, 0.3) == 1.0);
}

TEST_CASE("virtual marginal cost examples") {
  QuadraticCost c;
  // q=0.5, theta=0.2, rho=0.2/0.3
  CHECK(virtual_marginal_cost(c, 0.5, 0.2, 0.2 / 0.3) ==
        doctest::Approx(0.5 + 0.2 + 0.2 / 0.3).epsilon(1e-14));
  // rho = 0 leaves the plain marginal cost
  ExtendedQuadraticCost ext(0.1);
  CHECK(virtual_marginal_cost(ext, 0.5, 0.2, 0.0) == ext.cost_q(0.5, 0.2));
  // cheapest type, no rent: zero for the quadratic model
  CHECK(virtual_marginal_cost(c, 0.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("quadratic virtual cost collapses to q + theta + rho") {
  QuadraticCost c;
  for (double q : {0.0, 0.2, 1.3}) {
    for (double t : {0.0, 0.4, 1.0}) {
      for (double rho : {0.0, 0.7, 2.0}) {
        CHECK(std::abs(virtual_marginal_cost(c, q, t, rho) - (q + t + rho)) <= 1e-14);
      }
    }
  }
}

TEST_CASE("virtual cost is strictly increasing in q") {
  ExtendedQuadraticCost ext(0.1);
  for (double t : {0.0, 0.5, 1.0}) {
    double prev = virtual_marginal_cost(ext, 0.0, t, 0.4);
    for (int i = 1; i <= 40; ++i) {
      const double q = 2.0 * i / 40;
      const double cur = virtual_marginal_cost(ext, q, t, 0.4);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("validate_cost passes the quadratic model with zero mismatch") {
  const auto report = validate_cost(QuadraticCost{});
  CHECK(report.ok());
  CHECK(report.find("fd_cost_q")->worst <= 1e-9);
  CHECK(report.find("fd_cost_qq")->worst <= 1e-9);
  CHECK(report.find("warn_cost_qqtheta_nonpositive")->pass);
}

TEST_CASE("validate_cost passes the polyphrase family and flags its third derivative") {
  ExtendedQuadraticCost ext(0.1);
  // C_qtheta = 1 + 0.2 q > 0, C_qq = 1 + 0.2 theta > 0.
  CHECK(ext.cost_qtheta(2.0, 0.0) == doctest::Approx(1.4));
  CHECK(ext.cost_qq(0.0, 1.0) == doctest::Approx(1.2));
  const auto report = validate_cost(ext);
  CHECK(report.ok());
  // d3C/dq2 dtheta = 2c > 0: the optional third-derivative condition fails,
  // but only warns.
  const auto* warn = report.find("warn_cost_qqtheta_nonpositive");
  REQUIRE(warn != nullptr);
  CHECK_FALSE(warn->pass);
  CHECK(warn->warning_only);
  CHECK(warn->worst == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("validate_cost catches a partial that is wrong by ten percent") {
  QuadraticCost base;
  CustomCost wrong(
      [&](double q, double t) { return base.cost(q, t); },
      [&](double q, double t) { return 1.1 * base.cost_q(q, t); },  // deliberately off
      [&](double q, double t) { return base.cost_theta(q, t); },
      [&](double q, double t) { return base.cost_qtheta(q, t); },
      [&](double q, double t) { return base.cost_qq(q, t); });
  const auto report = validate_cost(wrong);
  CHECK_FALSE(report.ok());
  const auto* fd = report.find("fd_cost_q");
  REQUIRE(fd != nullptr);
  CHECK_FALSE(fd->pass);
  // Relative mismatch ~ 0.1 at the worst lattice point.
  CHECK(fd->worst == doctest::Approx(0.1).epsilon(0.15));
}

TEST_CASE("validate_cost requires zero cost at zero output") {
  QuadraticCost base;
  CustomCost shifted(
      [&](double q, double t) { return base.cost(q, t) + 0.01; },
      [&](double q, double t) { return base.cost_q(q, t); },
      [&](double q, double t) { return base.cost_theta(q, t); },
      [&](double q, double t) { return base.cost_qtheta(q, t); },
      [&](double q, double t) { return base.cost_qq(q, t); });
  const auto report = validate_cost(shifted);
  CHECK_FALSE(report.find("cost_zero_output")->pass);
}

TEST_CASE("polyphrase coefficient must be nonnegative") {
  CHECK_THROWS(ExtendedQuadraticCost(-0.2));
}
