#include "screening/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace screening {

bool VerificationReport::overall() const {
  for (const auto& e : entries)
    if (!e.informational && e.failed()) return false;
  return true;
}

const CheckEntry* VerificationReport::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

std::vector<double> verification_grid(int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int k = 1; k <= points; ++k) out[k - 1] = (k - 0.5) / points;
  return out;
}

namespace {

struct ContractSet {
  std::vector<double> theta, q, w;
};

ContractSet sample_contracts(const ContractMenu& menu, Group g, std::span<const double> grid) {
  ContractSet set;
  set.theta.assign(grid.begin(), grid.end());
  set.q.reserve(grid.size());
  set.w.reserve(grid.size());
  for (double t : grid) {
    set.q.push_back(menu.quantity(g, t));
    set.w.push_back(menu.wage(g, t));
  }
  return set;
}

std::span<const double> check_grid(const ContractMenu& menu, std::span<const double> grid,
                                   std::vector<double>& storage) {
  if (menu.has_analytic()) return grid;
  storage = menu.grid;  // file menus are verified on the contracts they list
  return storage;
}

}  // namespace

CheckEntry check_within_group_ic(const ContractMenu& menu, const Scenario& s,
                                 std::span<const double> grid, double tol) {
  CheckEntry entry{.name = "within_group_ic"};
  std::vector<double> storage;
  const auto pts = check_grid(menu, grid, storage);
  for (Group g : {Group::Trait, Group::NonTrait}) {
    const auto set = sample_contracts(menu, g, pts);
    const std::size_t n = set.theta.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double truth = set.w[i] - s.cost->cost(set.q[i], set.theta[i]);
      for (std::size_t j = 0; j < n; ++j) {
        const double dev = set.w[j] - s.cost->cost(set.q[j], set.theta[i]);
        const double viol = dev - truth;
        if (viol > entry.worst) {
          entry.worst = viol;
          entry.at_theta = set.theta[i];
          entry.at_theta_prime = set.theta[j];
          entry.group = to_string(g);
        }
      }
    }
  }
  entry.status = entry.worst <= tol ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
  return entry;
}

CheckEntry check_across_group_ic(const ContractMenu& menu, const Scenario& s,
                                 std::span<const double> grid, double tol) {
  CheckEntry entry{.name = "across_group_ic", .group = "T"};
  std::vector<double> storage;
  const auto pts = check_grid(menu, grid, storage);
  const auto trait = sample_contracts(menu, Group::Trait, pts);
  const auto other = sample_contracts(menu, Group::NonTrait, pts);
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double truth = trait.w[i] - s.cost->cost(trait.q[i], trait.theta[i]);
    for (std::size_t j = 0; j < n; ++j) {
      const double dev = other.w[j] - s.cost->cost(other.q[j], trait.theta[i]);
      const double viol = dev - truth;
      if (viol > entry.worst) {
        entry.worst = viol;
        entry.at_theta = trait.theta[i];
        entry.at_theta_prime = other.theta[j];
      }
    }
  }
  entry.status = entry.worst <= tol ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
  return entry;
}

CheckEntry check_ir(const ContractMenu& menu, const Scenario& s, std::span<const double> grid,
                    double tol) {
  CheckEntry entry{.name = "individual_rationality"};
  std::vector<double> storage;
  const auto pts = check_grid(menu, grid, storage);
  for (Group g : {Group::Trait, Group::NonTrait}) {
    for (double t : pts) {
      const double viol = -menu.utility(g, t, *s.cost);
      if (viol > entry.worst) {
        entry.worst = viol;
        entry.at_theta = t;
        entry.group = to_string(g);
      }
    }
  }
  // Binding boundaries: U^N(1) = 0 and U^T(1) = transfer.
  const double uN1 = std::abs(menu.utility(Group::NonTrait, 1.0, *s.cost));
  if (uN1 > entry.worst) {
    entry.worst = uN1;
    entry.at_theta = 1.0;
    entry.group = "N";
  }
  const double uT1 = std::abs(menu.utility(Group::Trait, 1.0, *s.cost) - menu.transfer);
  if (uT1 > entry.worst) {
    entry.worst = uT1;
    entry.at_theta = 1.0;
    entry.group = "T";
  }
  entry.status = entry.worst <= tol ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
  return entry;
}

CheckEntry check_schedule_shape(const ContractMenu& menu, std::span<const double> grid,
                                double tol) {
  CheckEntry entry{.name = "schedule_shape"};
  std::vector<double> storage;
  const auto pts = check_grid(menu, grid, storage);
  for (Group g : {Group::Trait, Group::NonTrait}) {
    double prev_q = menu.quantity(g, pts.front());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double q = menu.quantity(g, pts[i]);
      const double w = menu.wage(g, pts[i]);
      double viol = std::max(-q, -w);          // sign constraints
      viol = std::max(viol, q - prev_q);       // monotonicity
      if (viol > entry.worst) {
        entry.worst = viol;
        entry.at_theta = pts[i];
        entry.group = to_string(g);
      }
      prev_q = q;
    }
  }
  entry.status = entry.worst <= tol ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
  return entry;
}

// --- grid pipeline for perturbations ----------------------------------------

namespace {

constexpr int kCellOrder = 4;

void backward_rents(const Scenario& s, std::span<const double> grid, std::span<const double> q,
                    std::vector<double>& rent) {
  const std::size_t n = grid.size();
  rent.assign(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;) {
    const double a = grid[i], b = grid[i + 1];
    const double qa = q[i], qb = q[i + 1];
    const double cell = num::integrate(
        [&](double x) {
          const double t = (x - a) / (b - a);
          return s.cost->cost_theta(qa + t * (qb - qa), x);
        },
        a, b, kCellOrder);
    rent[i] = rent[i + 1] + cell;
  }
}

}  // namespace

double grid_objective(const Scenario& s, std::span<const double> grid, std::span<const double> qT,
                      std::span<const double> qN) {
  std::vector<double> rentT, rentN;
  backward_rents(s, grid, qT, rentT);
  backward_rents(s, grid, qN, rentN);
  double ubar = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) ubar = std::max(ubar, rentN[i] - rentT[i]);

  double total = 0.0;
  for (Group g : {Group::Trait, Group::NonTrait}) {
    const auto& d = s.dist(g);
    const auto& q = g == Group::Trait ? qT : qN;
    const auto& rent = g == Group::Trait ? rentT : rentN;
    const double base = g == Group::Trait ? ubar : 0.0;
    const double keep = 1.0 - s.credit(g);
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double ua = d.cdf(grid[i]), ub = d.cdf(grid[i + 1]);
      if (ub - ua < 1e-16) continue;
      sum += num::integrate(
          [&](double u) {
            double t = d.quantile(u);
            t = std::clamp(t, grid[i], grid[i + 1]);
            const double frac = (t - grid[i]) / (grid[i + 1] - grid[i]);
            const double qv = q[i] + frac * (q[i + 1] - q[i]);
            const double rv = rent[i] + frac * (rent[i + 1] - rent[i]);
            const double wv = base + s.cost->cost(qv, t) + rv;
            return s.price * qv - keep * wv;
          },
          ua, ub, kCellOrder);
    }
    total += s.weight(g) * sum;
  }
  return total;
}

CheckEntry perturbation_test(const ContractMenu& menu, const Scenario& s, int count, double eps,
                             double tol) {
  CheckEntry entry{.name = "perturbation_local_optimality", .informational = true};
  const auto& grid = menu.grid;
  const std::size_t n = grid.size();

  std::vector<double> baseT = menu.qT, baseN = menu.qN;
  num::project_nonincreasing(baseT);
  num::project_nonincreasing(baseN);
  const double j0 = grid_objective(s, grid, baseT, baseN);

  std::mt19937_64 rng(s.options.seed);
  std::uniform_int_distribution<std::size_t> pick_index(0, n - 1);
  std::uniform_int_distribution<int> pick_group(0, 2);
  std::uniform_real_distribution<double> pick_delta(-eps, eps);

  double worst = 0.0;
  int worst_at = -1;
  std::vector<double> qT, qN;
  for (int k = 0; k < count; ++k) {
    qT = baseT;
    qN = baseN;
    const int which = pick_group(rng);
    std::size_t i0 = pick_index(rng), i1 = pick_index(rng);
    if (i0 > i1) std::swap(i0, i1);
    const double delta = pick_delta(rng);
    const auto bump = [&](std::vector<double>& q) {
      for (std::size_t i = i0; i <= i1; ++i) q[i] = std::max(0.0, q[i] + delta);
      num::project_nonincreasing(q);
    };
    if (which != 1) bump(qT);
    if (which != 0) bump(qN);
    const double improvement = grid_objective(s, grid, qT, qN) - j0;
    if (improvement > worst) {
      worst = improvement;
      worst_at = k;
    }
  }
  entry.worst = worst;
  entry.status = worst <= tol ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
  std::ostringstream os;
  os << count << " perturbations, eps=" << eps;
  if (worst_at >= 0) os << ", best improvement at draw " << worst_at;
  entry.detail = os.str();
  return entry;
}

// --- candidate menus ---------------------------------------------------------

namespace {

double schedule_crossing(const std::function<double(double)>& f, double lo, double hi,
                         double tol) {
  // First zero of a decreasing f on [lo, hi]; hi when none.
  return num::first_crossing(f, lo, hi, -1, 400, tol);
}

}  // namespace

std::vector<Candidate> build_candidate_menus(const Scenario& s, double boundary) {
  s.validate();
  const OrderingRegime regime = classify_ordering(*s.trait_dist, *s.nontrait_dist);
  if (regime == OrderingRegime::Neither)
    throw RegimeError("candidate menus require MLRP or Reverse MLRP");

  const double cutT = hiring_cutoff(s, Group::Trait);
  const double cutN = hiring_cutoff(s, Group::NonTrait);
  const double pool_cut = pooled_hiring_cutoff(s);
  const double b = boundary > 0.0 ? boundary : 0.5 * std::min(cutT, cutN);
  const int gp = s.options.grid_points;

  const Scenario sc = s;  // owned by the schedule closures
  const auto sepT = [sc](double t) { return separating_quantity(sc, Group::Trait, t); };
  const auto sepN = [sc](double t) { return separating_quantity(sc, Group::NonTrait, t); };
  const auto pool = [sc](double t) { return pooling_quantity(sc, t); };
  const double qp_b = pool(b);
  const double sepT_b = sepT(b);

  std::vector<Candidate> out;
  const auto add = [&](std::string name, Schedule qT, Schedule qN, Regime label,
                       double theta_star) {
    const double ubar = required_transfer(qT, qN, s.cost, s.options.quad_order);
    Candidate c;
    c.name = std::move(name);
    c.menu = menu_from_schedules(s, std::move(qT), std::move(qN), ubar, label, theta_star, gp);
    c.objective = principal_objective(c.menu, s);
    out.push_back(std::move(c));
  };

  // (1) full separation
  add("full_separation", Schedule(sepT, {0.0, cutT, 1.0}), Schedule(sepN, {0.0, cutN, 1.0}),
      Regime::FullSeparation, 1.0);

  // (2) pool the efficient types below b, separate above (min-clamped junction)
  {
    const auto qTfn = [sepT, pool, b, qp_b](double t) {
      return t < b ? pool(t) : std::min(sepT(t), qp_b);
    };
    const auto qNfn = [sepN, pool, b, qp_b](double t) {
      return t < b ? pool(t) : std::min(sepN(t), qp_b);
    };
    std::vector<double> breaks{0.0, b, 1.0};
    breaks.push_back(schedule_crossing([&](double t) { return sepT(t) - qp_b; }, b, 1.0,
                                       s.options.root_tol));
    breaks.push_back(schedule_crossing([&](double t) { return sepN(t) - qp_b; }, b, 1.0,
                                       s.options.root_tol));
    breaks.push_back(std::min(b, pool_cut));
    breaks.push_back(cutT);
    breaks.push_back(cutN);
    add("pool_low_separate_high", Schedule(qTfn, breaks), Schedule(qNfn, breaks),
        Regime::SemiPooling, 0.0);
  }

  // (3) separate below b, pool the costly types above (min-clamped junction)
  {
    const auto common = [pool, sepT_b](double t) { return std::min(pool(t), sepT_b); };
    const auto qTfn = [sepT, common, b](double t) { return t < b ? sepT(t) : common(t); };
    const auto qNfn = [sepN, common, b](double t) { return t < b ? sepN(t) : common(t); };
    std::vector<double> breaks{0.0, b, 1.0, pool_cut};
    breaks.push_back(schedule_crossing([&](double t) { return pool(t) - sepT_b; }, b, 1.0,
                                       s.options.root_tol));
    if (cutT < b) breaks.push_back(cutT);
    if (cutN < b) breaks.push_back(cutN);
    add("separate_low_pool_high", Schedule(qTfn, breaks), Schedule(qNfn, breaks),
        Regime::SemiPooling, b);
  }

  // (4) full pooling
  add("full_pooling", Schedule(pool, {0.0, pool_cut, 1.0}), Schedule(pool, {0.0, pool_cut, 1.0}),
      Regime::FullPooling, 0.0);

  return out;
}

double candidate_violation(const Candidate& c, const Scenario&, double theta) {
  if (!c.menu.analytic) throw InvalidInputError("candidate menu lost its analytic layer");
  return c.menu.analytic->rentN(theta) - c.menu.analytic->rentT(theta);
}

// --- variational diagnostics ---------------------------------------------------

double lambda_weight(const TypeDistribution& trait, const TypeDistribution& nontrait,
                     double trait_share, double theta) {
  theta = std::max(theta, 1e-100);  // continuous extension past singular pdfs
  const double fhat = trait_share * trait.pdf(theta) + (1.0 - trait_share) * nontrait.pdf(theta);
  return trait_share * (1.0 - trait_share) *
         (nontrait.cdf(theta) * trait.pdf(theta) - trait.cdf(theta) * nontrait.pdf(theta)) / fhat;
}

CheckEntry check_lambda(const TypeDistribution& trait, const TypeDistribution& nontrait,
                        double trait_share, const GridSpec& grid, double tol) {
  CheckEntry entry{.name = "lambda_nonpositive_nonincreasing"};
  if (!reverse_mlrp_holds(trait, nontrait)) {
    entry.status = CheckEntry::Status::Skipped;
    entry.detail = "regime mismatch: Reverse MLRP does not hold";
    return entry;
  }
  const auto thetas = grid.make();
  double prev = lambda_weight(trait, nontrait, trait_share, thetas.front());
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    const double lam = lambda_weight(trait, nontrait, trait_share, thetas[i]);
    double viol = lam;  // must stay <= 0
    if (i > 0) viol = std::max(viol, lam - prev);  // and non-increasing
    if (viol > entry.worst) {
      entry.worst = viol;
      entry.at_theta = thetas[i];
    }
    prev = lam;
  }
  entry.status = entry.worst <= tol ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
  return entry;
}

namespace {

double delta_term(const Scenario& s, double theta) {
  theta = std::max(theta, 1e-100);
  const double tau = s.tax_credit;
  if (tau == 0.0) return 0.0;
  const double qp = pooling_quantity_unclamped(s, theta);
  const MixtureMeasures mix(s.trait_dist, s.nontrait_dist, s.trait_share, tau);
  return -s.trait_share * (1.0 - s.trait_share) * tau * s.trait_dist->pdf(theta) *
         s.nontrait_dist->pdf(theta) * s.price /
         (mix.ftilde(theta) * s.cost->cost_qtheta(qp, theta));
}

// Xi^j along the variational (unclamped) path of the tau-fixed optimal menu.
double xi_component(const Scenario& s, Group g, double theta, double theta_star) {
  // theta_star >= 1 is full separation: the pooling region is degenerate and
  // the variational path stays on the separating branch through theta = 1.
  const bool separating = theta < theta_star || theta_star >= 1.0;
  const double q = separating ? separating_quantity_unclamped(s, g, theta)
                              : pooling_quantity_unclamped(s, theta);
  const auto& d = s.dist(g);
  const double keep = 1.0 - s.credit(g);
  const double w = s.weight(g);
  return w * d.pdf(theta) * (keep * s.cost->cost_q(q, theta) - s.price) /
             s.cost->cost_qtheta(q, theta) +
         keep * w * d.cdf(theta);
}

double envelope_slope(const Scenario& s, double boundary) {
  const double bound = (1.0 - s.tax_credit) * s.trait_share;
  const MixtureMeasures mix(s.trait_dist, s.nontrait_dist, s.trait_share, s.tax_credit);
  const double lam = lambda_weight(*s.trait_dist, *s.nontrait_dist, s.trait_share, boundary);
  return -bound +
         (1.0 - s.tax_credit) * mix.fhat(boundary) / mix.ftilde(boundary) * std::abs(lam) +
         delta_term(s, boundary);
}

}  // namespace

bool TransferGradientReport::pass() const {
  for (const auto& e : entries)
    if (e.failed()) return false;
  return true;
}

TransferGradientReport check_transfer_gradient(const Scenario& s,
                                               std::span<const double> ubar_grid) {
  TransferGradientReport rep;
  rep.bound = (1.0 - s.tax_credit) * s.trait_share;
  if (!reverse_mlrp_holds(*s.trait_dist, *s.nontrait_dist)) {
    rep.entries.push_back({.name = "transfer_gradient",
                           .status = CheckEntry::Status::Skipped,
                           .detail = "regime mismatch: Reverse MLRP does not hold"});
    return rep;
  }
  s.validate();
  const double theta_star = pooling_cutoff(s);

  rep.thetas = num::merge_breakpoints(num::linspace(1e-6, 1.0, 201),
                                      std::vector<double>{theta_star});
  for (double t : rep.thetas) {
    rep.xi_trait.push_back(xi_component(s, Group::Trait, t, theta_star));
    rep.xi_nontrait.push_back(xi_component(s, Group::NonTrait, t, theta_star));
    rep.lambda_vals.push_back(lambda_weight(*s.trait_dist, *s.nontrait_dist, s.trait_share, t));
    rep.delta_vals.push_back(delta_term(s, t));
  }
  // Continuous extension at the origin, probed just inside the support.
  rep.xi_trait_at_0 = xi_component(s, Group::Trait, theta_star > 0.0 ? 1e-9 : 1e-12, theta_star);
  rep.xi_trait_at_1 = xi_component(s, Group::Trait, 1.0, theta_star);

  const auto entry = [&](std::string name, double worst, double tol, std::string detail = "") {
    rep.entries.push_back({.name = std::move(name),
                           .status = worst <= tol ? CheckEntry::Status::Pass
                                                  : CheckEntry::Status::Fail,
                           .worst = worst,
                           .detail = std::move(detail)});
  };

  entry("xi_trait_zero_at_origin", std::abs(rep.xi_trait_at_0), 1e-8);
  double inc = 0.0, sum = 0.0, dmax = 0.0;
  for (std::size_t i = 0; i < rep.thetas.size(); ++i) {
    if (i > 0) inc = std::max(inc, rep.xi_trait[i - 1] - rep.xi_trait[i]);
    sum = std::max(sum, std::abs(rep.xi_trait[i] + rep.xi_nontrait[i]));
    dmax = std::max(dmax, rep.delta_vals[i]);
  }
  entry("xi_trait_nondecreasing", inc, 1e-9);
  {
    std::ostringstream os;
    os << "margin below (1-tau)*pi_T: " << rep.bound - rep.xi_trait_at_1;
    entry("xi_trait_terminal_bound", std::max(0.0, rep.xi_trait_at_1 - rep.bound + 1e-6), 0.0,
          os.str());
  }
  entry("xi_mass_balance", sum, 1e-8);
  entry("delta_nonpositive", dmax, 1e-12);

  // Full constrained re-solve per grid point; centered differences except at
  // the left edge (negative transfers are infeasible).
  const double h = 1e-3;
  rep.ubar_grid.assign(ubar_grid.begin(), ubar_grid.end());
  double slope_worst = -1.0;
  double identity_excess = 0.0;
  for (std::size_t i = 0; i < rep.ubar_grid.size(); ++i) {
    const double ub = rep.ubar_grid[i];
    const TransferSolve center = solve_with_transfer(s, ub);
    rep.objective_vals.push_back(center.objective);
    double fd;
    double boundary = center.pool_hi;
    bool separation = center.separation_branch;
    if (ub == 0.0) {
      const TransferSolve right = solve_with_transfer(s, h);
      fd = (right.objective - center.objective) / h;
      boundary = right.pool_hi;
      separation = right.separation_branch;
    } else {
      const TransferSolve right = solve_with_transfer(s, ub + h);
      const TransferSolve left = solve_with_transfer(s, ub - h);
      fd = (right.objective - left.objective) / (2.0 * h);
    }
    rep.slope_fd.push_back(fd);
    rep.pool_boundary.push_back(boundary);
    const double env = separation ? -rep.bound : envelope_slope(s, boundary);
    rep.slope_envelope.push_back(env);
    slope_worst = std::max(slope_worst, fd);
    // Identity tolerance: tight on interior/linear points, loose at the left
    // edge where the forward difference straddles the moving boundary.
    const double tol_i = ub == 0.0 ? 5e-3 : (separation ? 1e-9 : 1e-4);
    identity_excess = std::max(identity_excess, std::abs(fd - env) - tol_i);
  }
  {
    std::ostringstream os;
    os << "steepest dJ/dUbar: " << slope_worst;
    entry("gradient_negative", std::max(0.0, slope_worst + 1e-12), 0.0, os.str());
  }
  entry("envelope_identity", std::max(0.0, identity_excess), 0.0,
        "finite differences vs the three-channel decomposition at the pooling boundary");
  return rep;
}

FocOracle mlrp_foc_oracle(const Scenario& s) {
  s.validate();
  if (classify_ordering(*s.trait_dist, *s.nontrait_dist) != OrderingRegime::MLRP)
    throw RegimeError("the first-order-condition oracle applies to the MLRP regime");

  const Scenario sc = s;
  const auto quantity_fn = [sc](Group g) {
    return [sc, g](double theta) {
      const double keep = 1.0 - sc.credit(g);
      const double rho = sc.dist(g).reverse_hazard_ratio(theta);
      const auto foc = [&](double q) {
        return sc.price - keep * (sc.cost->cost_q(q, theta) +
                                  rho * sc.cost->cost_qtheta(q, theta));
      };
      if (foc(0.0) <= 0.0) return 0.0;
      double hi = 1.0;
      const double limit = 8.0 * sc.q_max();
      while (foc(hi) > 0.0 && hi < limit) hi *= 2.0;
      if (foc(hi) > 0.0) throw SolverDomainError("first-order condition never turns negative");
      double lo = 0.0;
      for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (foc(mid) > 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    };
  };

  const auto cutoff_of = [&](const std::function<double(double)>& q) {
    const int steps = 4000;
    double prev = 0.0;
    for (int i = 1; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      if (q(t) <= 0.0) {
        double lo = prev, hi = t;
        for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
          const double mid = 0.5 * (lo + hi);
          (q(mid) > 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      }
      prev = t;
    }
    return 1.0;
  };

  FocOracle oracle;
  auto qT = quantity_fn(Group::Trait);
  auto qN = quantity_fn(Group::NonTrait);
  oracle.cutoff_trait = cutoff_of(qT);
  oracle.cutoff_nontrait = cutoff_of(qN);
  oracle.qT = Schedule(qT, {0.0, oracle.cutoff_trait, 1.0});
  oracle.qN = Schedule(qN, {0.0, oracle.cutoff_nontrait, 1.0});
  return oracle;
}

VerificationReport verify_menu(const ContractMenu& menu, const Scenario& s,
                               const VerifyOptions& opts) {
  VerificationReport rep;
  const auto grid = verification_grid(opts.grid_points);

  rep.entries.push_back(check_schedule_shape(menu, grid, opts.tol));
  rep.entries.push_back(check_within_group_ic(menu, s, grid, opts.tol));
  rep.entries.push_back(check_across_group_ic(menu, s, grid, opts.tol));
  rep.entries.push_back(check_ir(menu, s, grid, opts.tol));
  rep.entries.push_back(
      check_lambda(*s.trait_dist, *s.nontrait_dist, s.trait_share));

  if (opts.run_transfer_gradient &&
      reverse_mlrp_holds(*s.trait_dist, *s.nontrait_dist)) {
    auto tg = check_transfer_gradient(s, opts.ubar_grid);
    for (auto& e : tg.entries) rep.entries.push_back(std::move(e));
  }

  if (opts.run_candidates) {
    CheckEntry entry{.name = "dominates_candidate_menus", .informational = true};
    const double own = principal_objective(menu, s);
    try {
      for (const auto& c : build_candidate_menus(s, opts.candidate_boundary)) {
        const double gap = c.objective - own;
        if (gap > entry.worst) {
          entry.worst = gap;
          entry.detail = "best rival: " + c.name;
        }
      }
      entry.status =
          entry.worst <= 1e-6 ? CheckEntry::Status::Pass : CheckEntry::Status::Fail;
    } catch (const RegimeError& err) {
      entry.status = CheckEntry::Status::Skipped;
      entry.detail = err.what();
    }
    rep.entries.push_back(std::move(entry));
  }

  if (opts.run_perturbations) {
    rep.entries.push_back(perturbation_test(menu, s, opts.perturbation_count,
                                            opts.perturbation_eps, opts.perturbation_tol));
  }
  return rep;
}

}  // namespace screening
