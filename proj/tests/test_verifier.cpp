#include <doctest.h>

#include <cmath>
#include <memory>

#include "screening/verifier.hpp"

using namespace screening;

namespace {

Scenario example(double trait_exp, double nontrait_exp, double tau) {
  Scenario s;
  s.price = 0.75;
  s.tax_credit = tau;
  s.trait_share = 0.3;
  s.trait_dist = std::make_shared<PolynomialDistribution>(trait_exp);
  s.nontrait_dist = std::make_shared<PolynomialDistribution>(nontrait_exp);
  s.cost = std::make_shared<QuadraticCost>();
  return s;
}

Scenario mlrp_example(double tau) { return example(0.7, 0.3, tau); }
Scenario reverse_example(double tau) { return example(0.3, 0.7, tau); }

ContractMenu null_menu(const Scenario& s) {
  Schedule zero([](double) { return 0.0; }, {0.0, 1.0});
  return menu_from_schedules(s, zero, zero, 0.0, Regime::FullSeparation, 1.0, 201);
}

// Strip the analytic layer so checks treat the samples as the menu.
ContractMenu sampled_copy(const ContractMenu& menu) {
  ContractMenu copy = menu;
  copy.analytic.reset();
  return copy;
}

}  // namespace

TEST_CASE("solved menus pass the constraint oracles on the independent grid") {
  const auto grid = verification_grid(200);
  // reverse_example(0.8) exercises full separation under Reverse MLRP.
  for (const auto& s : {mlrp_example(0.0), mlrp_example(0.2), mlrp_example(0.6),
                        reverse_example(0.0), reverse_example(0.2), reverse_example(0.8)}) {
    const auto menu = assemble_menu(s);
    CAPTURE(s.tax_credit);
    CHECK_FALSE(check_within_group_ic(menu, s, grid).failed());
    CHECK_FALSE(check_across_group_ic(menu, s, grid).failed());
    CHECK_FALSE(check_ir(menu, s, grid).failed());
    CHECK_FALSE(check_schedule_shape(menu, grid).failed());
  }
}

TEST_CASE("within-group IC fails when a schedule is made increasing") {
  const auto s = mlrp_example(0.2);
  auto menu = sampled_copy(assemble_menu(s, 401));
  // Raise qN on a band steeply enough to overcome its own downward slope,
  // then rebuild wages by revenue equivalence on the samples (so only
  // monotonicity is broken).
  const std::size_t n = menu.grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double t = menu.grid[i];
    if (t > 0.05 && t < 0.12) menu.qN[i] += 9.0 * (t - 0.05);
  }
  std::vector<double> rent(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;) {
    const double mid = 0.5 * (menu.grid[i] + menu.grid[i + 1]);
    const double qmid = 0.5 * (menu.qN[i] + menu.qN[i + 1]);
    rent[i] = rent[i + 1] + s.cost->cost_theta(qmid, mid) * (menu.grid[i + 1] - menu.grid[i]);
  }
  for (std::size_t i = 0; i < n; ++i)
    menu.wN[i] = s.cost->cost(menu.qN[i], menu.grid[i]) + rent[i];

  const auto entry = check_within_group_ic(menu, s, verification_grid(200));
  CHECK(entry.failed());
  CHECK(entry.worst > 1e-4);
  CHECK(entry.group == "N");
}

TEST_CASE("across-group IC quantifies the full-separation violation") {
  const auto s = reverse_example(0.0);
  const Scenario sc = s;
  Schedule qT([sc](double t) { return separating_quantity(sc, Group::Trait, t); },
              {0.0, 0.75 * 0.3 / 1.3, 1.0});
  Schedule qN([sc](double t) { return separating_quantity(sc, Group::NonTrait, t); },
              {0.0, 0.75 * 0.7 / 1.7, 1.0});
  const double ubar_min = 11.25 / 221.0;

  SUBCASE("with zero transfer it fails by exactly the required transfer") {
    const auto menu = menu_from_schedules(s, qT, qN, 0.0, Regime::FullSeparation, 1.0, 801);
    const auto entry = check_across_group_ic(menu, s, verification_grid(200));
    CHECK(entry.failed());
    CHECK(entry.worst == doctest::Approx(ubar_min).epsilon(1e-4));
    CHECK(entry.at_theta < 0.01);  // violation peaks at the most efficient type
  }
  SUBCASE("the required transfer exactly closes the gap") {
    const auto menu = menu_from_schedules(s, qT, qN, ubar_min, Regime::FullSeparation, 1.0, 801);
    CHECK_FALSE(check_across_group_ic(menu, s, verification_grid(200)).failed());
    CHECK_FALSE(check_ir(menu, s, verification_grid(200)).failed());
  }
}

TEST_CASE("full pooling passes across-group IC with zero slack") {
  const auto s = reverse_example(0.0);
  const auto menu = assemble_menu(s);
  const auto entry = check_across_group_ic(menu, s, verification_grid(200));
  CHECK_FALSE(entry.failed());
  CHECK(entry.worst <= 1e-10);
}

TEST_CASE("IR fails when wages are shaved") {
  const auto s = mlrp_example(0.2);
  auto menu = sampled_copy(assemble_menu(s, 401));
  for (auto& w : menu.wT) w = std::max(0.0, w - 0.01);
  for (auto& w : menu.wN) w = std::max(0.0, w - 0.01);
  const auto entry = check_ir(menu, s, verification_grid(200));
  CHECK(entry.failed());
  CHECK(entry.worst == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("the null menu is feasible") {
  const auto s = mlrp_example(0.2);
  const auto menu = null_menu(s);
  const auto grid = verification_grid(200);
  CHECK_FALSE(check_within_group_ic(menu, s, grid).failed());
  CHECK_FALSE(check_across_group_ic(menu, s, grid).failed());
  CHECK_FALSE(check_ir(menu, s, grid).failed());
  CHECK(principal_objective(menu, s) == doctest::Approx(0.0));
}

TEST_CASE("candidate menus reproduce the pooling comparisons") {
  const auto s = reverse_example(0.0);
  const auto candidates = build_candidate_menus(s);
  REQUIRE(candidates.size() == 4);
  CHECK(candidates[0].name == "full_separation");
  CHECK(candidates[3].name == "full_pooling");

  // Frozen from the derivation scripts (boundary = half the trait cutoff).
  CHECK(candidates[0].menu.transfer == doctest::Approx(11.25 / 221.0).epsilon(1e-7));
  CHECK(candidates[0].objective == doctest::Approx(0.055762733).epsilon(1e-6));
  CHECK(candidates[1].objective == doctest::Approx(0.057911320).epsilon(1e-6));
  CHECK(candidates[2].objective == doctest::Approx(0.067038313).epsilon(1e-6));
  CHECK(candidates[3].objective == doctest::Approx(0.069131532).epsilon(1e-6));

  // Pooling the costly types beats pooling the efficient types; full pooling
  // beats everything; every candidate is feasible after its transfer.
  CHECK(candidates[2].objective > candidates[1].objective);
  for (const auto& c : candidates) {
    CAPTURE(c.name);
    CHECK(candidates[3].objective >= c.objective - 1e-9);
    const auto grid = verification_grid(200);
    CHECK_FALSE(check_within_group_ic(c.menu, s, grid).failed());
    CHECK_FALSE(check_across_group_ic(c.menu, s, grid).failed());
    CHECK_FALSE(check_ir(c.menu, s, grid).failed());
  }

  // Raw gap at zero transfer: candidate 1 peaks at the required transfer,
  // candidate 4 has none.
  CHECK(candidate_violation(candidates[0], s, 0.0) ==
        doctest::Approx(11.25 / 221.0).epsilon(1e-7));
  CHECK(std::abs(candidate_violation(candidates[3], s, 0.3)) <= 1e-12);
}

TEST_CASE("the solver menu dominates every candidate") {
  SUBCASE("MLRP: full separation is the best design") {
    const auto s = mlrp_example(0.2);
    const auto menu = assemble_menu(s);
    const double own = principal_objective(menu, s);
    const auto candidates = build_candidate_menus(s);
    for (const auto& c : candidates) CHECK(own >= c.objective - 1e-9);
    CHECK(own == doctest::Approx(candidates[0].objective).epsilon(1e-9));
  }
  SUBCASE("Reverse MLRP tau=0.2: semi-pooling beats the stylized designs") {
    const auto s = reverse_example(0.2);
    const double own = principal_objective(assemble_menu(s), s);
    for (const auto& c : build_candidate_menus(s)) {
      CAPTURE(c.name);
      CHECK(own > c.objective + 1e-9);
    }
  }
}

TEST_CASE("no-other-pooling: pool-low designs violate IC or lose to full pooling") {
  const auto s = reverse_example(0.0);
  const double j_pool = build_candidate_menus(s)[3].objective;
  for (double b : {0.05, 0.1, 0.15, 0.2}) {
    const auto candidates = build_candidate_menus(s, b);
    const auto& pool_low = candidates[1];
    // Raw design (zero transfer) violates across-group IC...
    const double raw_gap = candidate_violation(pool_low, s, 0.0);
    const bool violates = raw_gap > 1e-7;
    // ...or its feasible version scores below full pooling.
    const bool loses = pool_low.objective < j_pool - 1e-9;
    CHECK((violates || loses));
    CHECK(loses);  // in this example both hold
  }
}

TEST_CASE("perturbation test certifies local optimality") {
  const auto s = mlrp_example(0.2);
  const auto menu = assemble_menu(s, 601);
  SUBCASE("solved menu survives seeded perturbations") {
    const auto entry = perturbation_test(menu, s, 300, 0.01);
    CHECK_FALSE(entry.failed());
    CHECK(entry.worst <= 1e-6);
  }
  SUBCASE("a scaled-down menu is improved upon") {
    auto worse = menu;
    for (auto& q : worse.qT) q *= 0.9;
    for (auto& q : worse.qN) q *= 0.9;
    worse.analytic.reset();
    const auto entry = perturbation_test(worse, s, 300, 0.01);
    CHECK(entry.failed());
    CHECK(entry.worst > 1e-5);
  }
  SUBCASE("zero-size perturbations change nothing") {
    const auto entry = perturbation_test(menu, s, 50, 0.0);
    CHECK(entry.worst == 0.0);
  }
}

TEST_CASE("lambda is non-positive and non-increasing under Reverse MLRP") {
  const auto s = reverse_example(0.0);
  const auto entry = check_lambda(*s.trait_dist, *s.nontrait_dist, s.trait_share);
  CHECK_FALSE(entry.failed());
  CHECK(entry.status == CheckEntry::Status::Pass);

  // Frozen value: Lambda(1) = 0.21 (0.3 - 0.7) / 0.58.
  CHECK(lambda_weight(*s.trait_dist, *s.nontrait_dist, 0.3, 1.0) ==
        doctest::Approx(-0.084 / 0.58).epsilon(1e-12));

  // Identical groups: Lambda vanishes identically.
  const auto same = example(0.5, 0.5, 0.0);
  CHECK(lambda_weight(*same.trait_dist, *same.nontrait_dist, 0.3, 0.4) ==
        doctest::Approx(0.0));
  CHECK_FALSE(check_lambda(*same.trait_dist, *same.nontrait_dist, 0.3).failed());

  // MLRP pair: reported as a regime mismatch, not a failure.
  const auto swapped = mlrp_example(0.0);
  const auto skipped = check_lambda(*swapped.trait_dist, *swapped.nontrait_dist, 0.3);
  CHECK(skipped.status == CheckEntry::Status::Skipped);
}

TEST_CASE("transfer gradient certification") {
  SUBCASE("tau = 0") {
    const auto s = reverse_example(0.0);
    const auto rep = check_transfer_gradient(s, std::vector<double>{0.0, 0.02, 0.05});
    CHECK(rep.pass());
    CHECK(std::abs(rep.xi_trait_at_0) <= 1e-8);
    // Xi^T(1) = |Lambda(1)| on the pooled path.
    CHECK(rep.xi_trait_at_1 == doctest::Approx(0.084 / 0.58).epsilon(1e-9));
    CHECK(rep.bound == doctest::Approx(0.3));
    for (double fd : rep.slope_fd) CHECK(fd < 0.0);
    // dJ/dUbar(0) ~ -pi_T + |Lambda(boundary)| with the boundary at the
    // pooled hiring cutoff as Ubar -> 0.
    CHECK(rep.slope_fd[0] == doctest::Approx(-0.218).epsilon(0.01));
  }
  SUBCASE("tau = 0.2") {
    const auto s = reverse_example(0.2);
    const auto rep = check_transfer_gradient(s, std::vector<double>{0.0, 0.01, 0.02, 0.04});
    CHECK(rep.pass());
    // Frozen: Xi^T(1) = 0.8 (fhat/ftilde)|Lambda| + Delta at theta = 1.
    CHECK(rep.xi_trait_at_1 == doctest::Approx(0.107802491).epsilon(1e-7));
    CHECK(rep.bound == doctest::Approx(0.24));
    // Past the separation gap the slope is exactly the transfer cost.
    CHECK(rep.slope_fd.back() == doctest::Approx(-0.24).epsilon(1e-9));
    for (std::size_t i = 0; i < rep.ubar_grid.size(); ++i) {
      CHECK(rep.slope_fd[i] < 0.0);
    }
  }
  SUBCASE("identical groups: the slope is exactly the discounted share") {
    const auto s = example(0.5, 0.5, 0.2);
    const auto rep = check_transfer_gradient(s, std::vector<double>{0.0, 0.01, 0.03});
    CHECK(rep.pass());
    for (double fd : rep.slope_fd) CHECK(fd == doctest::Approx(-0.8 * 0.3).epsilon(1e-9));
  }
  SUBCASE("MLRP pair is skipped") {
    const auto rep = check_transfer_gradient(mlrp_example(0.2), std::vector<double>{0.0});
    CHECK(rep.entries.size() == 1);
    CHECK(rep.entries[0].status == CheckEntry::Status::Skipped);
  }
}

TEST_CASE("FOC oracle agrees with the solver pointwise") {
  SUBCASE("quadratic MLRP example") {
    const auto s = mlrp_example(0.2);
    const auto oracle = mlrp_foc_oracle(s);
    const auto menu = assemble_menu(s);
    for (int i = 0; i <= 2000; ++i) {
      const double t = i / 2000.0;
      CHECK(std::abs(oracle.qT(t) - menu.quantity(Group::Trait, t)) <= 1e-8);
      CHECK(std::abs(oracle.qN(t) - menu.quantity(Group::NonTrait, t)) <= 1e-8);
    }
    CHECK(oracle.cutoff_trait == doctest::Approx(0.9375 * 0.7 / 1.7).epsilon(1e-9));
    // Triple agreement with the closed form.
    for (double t : {0.05, 0.15, 0.3}) {
      CHECK(oracle.qT(t) ==
            doctest::Approx(std::max(0.0, 0.9375 - t - t / 0.7)).epsilon(1e-9));
    }
  }
  SUBCASE("non-quadratic regression cost") {
    auto s = mlrp_example(0.2);
    s.cost = std::make_shared<ExtendedQuadraticCost>(0.1);
    const auto oracle = mlrp_foc_oracle(s);
    const auto menu = assemble_menu(s);
    for (int i = 0; i <= 2000; ++i) {
      const double t = i / 2000.0;
      CHECK(std::abs(oracle.qT(t) - menu.quantity(Group::Trait, t)) <= 1e-8);
      CHECK(std::abs(oracle.qN(t) - menu.quantity(Group::NonTrait, t)) <= 1e-8);
    }
  }
  SUBCASE("identical groups at tau=0 collapse to the one-group schedule") {
    const auto s = example(0.5, 0.5, 0.0);
    const auto oracle = mlrp_foc_oracle(s);
    const auto menu = assemble_menu(s);
    for (double t : {0.01, 0.1, 0.2, 0.5, 0.9}) {
      CHECK(std::abs(oracle.qT(t) - oracle.qN(t)) <= 1e-10);
      CHECK(std::abs(oracle.qT(t) - menu.quantity(Group::Trait, t)) <= 1e-8);
    }
  }
  SUBCASE("regime guard") {
    CHECK_THROWS_AS(mlrp_foc_oracle(reverse_example(0.2)), RegimeError);
  }
}

TEST_CASE("objective equals the FOC-oracle objective under MLRP at tau=0") {
  const auto s = mlrp_example(0.0);
  const auto menu = assemble_menu(s);
  const auto oracle = mlrp_foc_oracle(s);
  const auto oracle_menu =
      menu_from_schedules(s, oracle.qT, oracle.qN, 0.0, Regime::FullSeparation, 1.0, 2001);
  CHECK(principal_objective(menu, s) ==
        doctest::Approx(principal_objective(oracle_menu, s)).epsilon(1e-10));
}

TEST_CASE("full verify suite on solved menus") {
  VerifyOptions opts;
  opts.perturbation_count = 100;
  for (const auto& s : {mlrp_example(0.2), reverse_example(0.0), reverse_example(0.2)}) {
    const auto menu = assemble_menu(s);
    const auto report = verify_menu(menu, s, opts);
    CAPTURE(s.tax_credit);
    for (const auto& e : report.entries) {
      CAPTURE(e.name);
      CHECK_FALSE(e.failed());
    }
    CHECK(report.overall());
  }
}

TEST_CASE("verify suite flags a broken menu but stays green on the null menu") {
  const auto s = mlrp_example(0.2);
  VerifyOptions opts;
  opts.perturbation_count = 50;

  auto broken = sampled_copy(assemble_menu(s, 401));
  for (auto& w : broken.wN) w = std::max(0.0, w - 0.01);
  const auto report = verify_menu(broken, s, opts);
  CHECK_FALSE(report.overall());
  CHECK(report.find("individual_rationality")->failed());

  const auto report0 = verify_menu(null_menu(s), s, opts);
  CHECK(report0.overall());  // feasible; optimality entries are informational
  CHECK(report0.find("dominates_candidate_menus")->failed());
  CHECK(report0.find("dominates_candidate_menus")->informational);
}

TEST_CASE("transfer-constrained menus are feasible at their stated transfer") {
  const auto s = reverse_example(0.0);
  const auto grid = verification_grid(200);
  for (double ub : {0.01, 0.03, 0.06}) {
    const auto solved = solve_with_transfer(s, ub);
    CAPTURE(ub);
    CHECK_FALSE(check_within_group_ic(solved.menu, s, grid).failed());
    CHECK_FALSE(check_across_group_ic(solved.menu, s, grid).failed());
    CHECK_FALSE(check_ir(solved.menu, s, grid).failed());
    CHECK_FALSE(check_schedule_shape(solved.menu, grid).failed());
  }
}

TEST_CASE("solved menus beat all seeded perturbations across regimes") {
  for (const auto& s : {reverse_example(0.0), reverse_example(0.2)}) {
    const auto menu = assemble_menu(s, 601);
    const auto entry = perturbation_test(menu, s, 300, 0.01);
    CAPTURE(s.tax_credit);
    CHECK_FALSE(entry.failed());
  }
}
