#include "screening/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace screening {

std::string to_string(Group g) { return g == Group::Trait ? "T" : "N"; }

std::string to_string(Regime r) {
  switch (r) {
    case Regime::FullSeparation: return "FullSeparation";
    case Regime::FullPooling: return "FullPooling";
    default: return "SemiPooling";
  }
}

std::string to_string(Region r) {
  switch (r) {
    case Region::Sep: return "SEP";
    case Region::Pool: return "POOL";
    default: return "OUT";
  }
}

void Scenario::validate() const {
  if (!trait_dist || !nontrait_dist || !cost) throw InvalidInputError("scenario: missing component");
  if (!(price > 0.0)) throw InvalidInputError("scenario: price must be > 0");
  if (!(tax_credit >= 0.0 && tax_credit < 1.0))
    throw InvalidInputError("scenario: tax_credit must lie in [0, 1)");
  if (!(trait_share > 0.0 && trait_share < 1.0))
    throw InvalidInputError("scenario: trait_share must lie in (0, 1)");
  if (!(price > cost->cost_q(0.0, 0.0)))
    throw InvalidInputError("scenario: price must exceed C_q(0, 0)");
  if (options.grid_points < 2) throw InvalidInputError("scenario: grid_points must be >= 2");
}

Schedule::Schedule(std::function<double(double)> fn, std::vector<double> breakpoints)
    : fn_(std::move(fn)), breaks_(std::move(breakpoints)) {
  std::sort(breaks_.begin(), breaks_.end());
  if (breaks_.empty() || breaks_.front() > 0.0) breaks_.insert(breaks_.begin(), 0.0);
  if (breaks_.back() < 1.0) breaks_.push_back(1.0);
}

RentProfile::RentProfile(const Schedule& q, CostPtr cost, int quad_order)
    : pts_(q.breakpoints()), order_(quad_order) {
  integrand_ = [q, cost](double x) { return cost->cost_theta(q(x), x); };
  cum_.assign(pts_.size(), 0.0);
  for (std::size_t i = pts_.size() - 1; i-- > 0;) {
    cum_[i] = cum_[i + 1] + num::integrate(integrand_, pts_[i], pts_[i + 1], order_);
  }
}

double RentProfile::operator()(double theta) const {
  if (pts_.empty()) return 0.0;
  if (theta >= pts_.back()) return 0.0;
  if (theta <= pts_.front()) return cum_.front();
  auto it = std::upper_bound(pts_.begin(), pts_.end(), theta);
  const std::size_t i = static_cast<std::size_t>(std::distance(pts_.begin(), it)) - 1;
  return cum_[i + 1] + num::integrate(integrand_, theta, pts_[i + 1], order_);
}

namespace {

double lerp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(std::distance(xs.begin(), it)) - 1;
  const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + t * (ys[i + 1] - ys[i]);
}

// Root of C_q + rho * C_qtheta = price in q. Strictly increasing left side.
double virtual_cost_root(const CostModel& cost, double theta, double rho, double price,
                         double q_max, double tol, bool clamp) {
  const auto psi = [&](double q) { return virtual_marginal_cost(cost, q, theta, rho) - price; };
  double lo = clamp ? 0.0 : -q_max;
  double at_lo = psi(lo);
  if (!clamp) {
    // The variational path can sit well below zero; widen until bracketed.
    for (int it = 0; at_lo >= 0.0 && it < 16; ++it) {
      lo *= 2.0;
      at_lo = psi(lo);
    }
  }
  if (at_lo >= 0.0) {
    if (clamp) return 0.0;
    std::ostringstream os;
    os << "virtual cost " << (at_lo + price) << " at q=" << lo << " already exceeds price "
       << price;
    throw SolverDomainError(os.str());
  }
  const double at_hi = psi(q_max);
  if (at_hi < 0.0) {
    std::ostringstream os;
    os << "virtual cost range [" << (at_lo + price) << ", " << (at_hi + price)
       << "] on q in [" << lo << ", " << q_max << "] does not reach price " << price;
    throw SolverDomainError(os.str());
  }
  return num::find_root_increasing(psi, lo, q_max, tol);
}

double pooling_root(const Scenario& s, double theta, bool clamp) {
  // Continuous extension at theta = 0: the mixture densities can be singular
  // there while their ratios have finite limits, so probe just inside.
  theta = std::max(theta, 1e-100);
  const MixtureMeasures mix(s.trait_dist, s.nontrait_dist, s.trait_share, s.tax_credit);
  const double fh = mix.fhat(theta), ft = mix.ftilde(theta), Ft = mix.Ftilde(theta);
  const auto& cost = *s.cost;
  const auto blended = [&](double q) {
    return ft * cost.cost_q(q, theta) + Ft * cost.cost_qtheta(q, theta) - s.price * fh;
  };
  const double q_max = s.q_max();
  double lo = clamp ? 0.0 : -q_max;
  if (!clamp) {
    for (int it = 0; blended(lo) >= 0.0 && it < 16; ++it) lo *= 2.0;
  }
  if (blended(lo) >= 0.0) {
    if (clamp) return 0.0;
    throw SolverDomainError("pooling equation already positive at the lower bracket");
  }
  if (blended(q_max) < 0.0) {
    std::ostringstream os;
    os << "pooling equation stays negative on [" << lo << ", " << q_max << "] at theta=" << theta;
    throw SolverDomainError(os.str());
  }
  return num::find_root_increasing(blended, lo, q_max, s.options.root_tol);
}

// Left edge of the zero set of a non-increasing schedule (works for clamped
// schedules, which sit exactly at 0 past the cutoff); 1 when positive
// throughout.
double first_zero(const std::function<double(double)>& q, double lo, double tol) {
  if (q(lo) <= 0.0) return lo;
  if (q(1.0) > 0.0) return 1.0;
  double a = lo, b = 1.0;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    (q(mid) > 0.0 ? a : b) = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

double ContractMenu::quantity(Group g, double theta) const {
  if (analytic) return g == Group::Trait ? analytic->qT(theta) : analytic->qN(theta);
  return lerp(grid, g == Group::Trait ? qT : qN, theta);
}

double ContractMenu::wage(Group g, double theta) const {
  if (analytic) {
    const double q = quantity(g, theta);
    const double rent = g == Group::Trait ? analytic->rentT(theta) : analytic->rentN(theta);
    const double base = g == Group::Trait ? transfer : 0.0;
    return base + analytic->cost->cost(q, theta) + rent;
  }
  return lerp(grid, g == Group::Trait ? wT : wN, theta);
}

double ContractMenu::utility(Group g, double theta, const CostModel& cost) const {
  return wage(g, theta) - cost.cost(quantity(g, theta), theta);
}

std::vector<double> ContractMenu::breakpoints() const {
  if (analytic)
    return num::merge_breakpoints(analytic->qT.breakpoints(), analytic->qN.breakpoints());
  return grid;
}

double separating_quantity(const Scenario& s, Group g, double theta) {
  const double rho = s.dist(g).reverse_hazard_ratio(theta);
  return virtual_cost_root(*s.cost, theta, rho, s.effective_price(g), s.q_max(),
                           s.options.root_tol, true);
}

double separating_quantity_unclamped(const Scenario& s, Group g, double theta) {
  const double rho = s.dist(g).reverse_hazard_ratio(theta);
  return virtual_cost_root(*s.cost, theta, rho, s.effective_price(g), s.q_max(),
                           s.options.root_tol, false);
}

double hiring_cutoff(const Scenario& s, Group g) {
  return first_zero([&](double t) { return separating_quantity(s, g, t); }, 0.0,
                    s.options.root_tol);
}

double pooling_quantity(const Scenario& s, double theta) { return pooling_root(s, theta, true); }

double pooling_quantity_unclamped(const Scenario& s, double theta) {
  return pooling_root(s, theta, false);
}

double pooled_hiring_cutoff(const Scenario& s) {
  return first_zero([&](double t) { return pooling_root(s, t, true); }, 1e-9,
                    s.options.root_tol);
}

double pooling_cutoff(const Scenario& s) {
  if (!reverse_mlrp_holds(*s.trait_dist, *s.nontrait_dist))
    throw RegimeError("pooling cutoff requires the Reverse MLRP ordering");
  if (s.tax_credit == 0.0) return 0.0;
  const auto gap = [&](double t) {
    return separating_quantity_unclamped(s, Group::Trait, t) -
           separating_quantity_unclamped(s, Group::NonTrait, t);
  };
  // gap(0) = q_T(0) - q_N(0) > 0 when tau > 0 (boundary conditions).
  return num::first_crossing(gap, 0.0, 1.0, -1, 2000, s.options.root_tol);
}

std::vector<double> solve_grid(int points, std::span<const double> breakpoints) {
  const auto base = num::linspace(0.0, 1.0, points);
  return num::merge_breakpoints(base, breakpoints, 1e-12);
}

ContractMenu menu_from_schedules(const Scenario& s, Schedule qT, Schedule qN, double transfer,
                                 Regime regime, double theta_star, int grid_points) {
  ContractMenu menu;
  menu.regime = regime;
  menu.theta_star = theta_star;
  menu.transfer = transfer;

  menu.cutoff_trait = first_zero([&](double t) { return qT(t); }, 0.0, s.options.root_tol);
  menu.cutoff_nontrait = first_zero([&](double t) { return qN(t); }, 0.0, s.options.root_tol);

  AnalyticMenu a;
  a.qT = qT;
  a.qN = qN;
  a.cost = s.cost;
  a.rentT = RentProfile(qT, s.cost, s.options.quad_order);
  a.rentN = RentProfile(qN, s.cost, s.options.quad_order);
  menu.analytic = std::move(a);

  const auto breaks = num::merge_breakpoints(qT.breakpoints(), qN.breakpoints());
  menu.grid = solve_grid(grid_points, breaks);
  const std::size_t n = menu.grid.size();
  menu.qT.resize(n);
  menu.qN.resize(n);
  menu.region.resize(n);
  const bool pooling_active = regime != Regime::FullSeparation;
  // Root noise at an inserted cutoff breakpoint is snapped to zero so the
  // cutoff row lands in the not-hired region.
  constexpr double kSampleFloor = 1e-11;
  const auto snap = [](double v) { return v < kSampleFloor ? 0.0 : v; };
  for (std::size_t i = 0; i < n; ++i) {
    const double t = menu.grid[i];
    menu.qT[i] = snap(std::max(0.0, qT(t)));
    menu.qN[i] = snap(std::max(0.0, qN(t)));
    if (menu.qT[i] <= 0.0 && menu.qN[i] <= 0.0) {
      menu.region[i] = Region::Out;
    } else if (pooling_active && t >= theta_star) {
      menu.region[i] = Region::Pool;
    } else {
      menu.region[i] = Region::Sep;
    }
  }
  compute_wages(menu, s);
  return menu;
}

void compute_wages(ContractMenu& menu, const Scenario&) {
  if (!menu.analytic) throw InvalidInputError("compute_wages: menu has no analytic schedules");
  const std::size_t n = menu.grid.size();
  menu.wT.resize(n);
  menu.wN.resize(n);
  const auto snap = [](double v) { return std::abs(v) < 1e-11 ? 0.0 : v; };
  for (std::size_t i = 0; i < n; ++i) {
    menu.wT[i] = snap(menu.wage(Group::Trait, menu.grid[i]));
    menu.wN[i] = snap(menu.wage(Group::NonTrait, menu.grid[i]));
  }
}

namespace {

Schedule separating_schedule(const Scenario& s, Group g) {
  const double cut = hiring_cutoff(s, g);
  return Schedule(
      [&s0 = s, g](double t) { return separating_quantity(s0, g, t); },
      {0.0, cut, 1.0});
}

// The scenario is captured by reference in schedule closures; assemble-time
// callers keep it alive for the life of the menu (menus sampled eagerly).
Schedule separating_schedule_owned(Scenario s, Group g) {
  const double cut = hiring_cutoff(s, g);
  return Schedule([s = std::move(s), g](double t) { return separating_quantity(s, g, t); },
                  {0.0, cut, 1.0});
}

Schedule pooling_schedule_owned(Scenario s) {
  const double cut = pooled_hiring_cutoff(s);
  return Schedule([s = std::move(s)](double t) { return pooling_quantity(s, t); },
                  {0.0, cut, 1.0});
}

}  // namespace

ContractMenu assemble_menu(const Scenario& s) { return assemble_menu(s, s.options.grid_points); }

ContractMenu assemble_menu(const Scenario& s, int grid_points) {
  s.validate();
  const OrderingRegime regime = classify_ordering(*s.trait_dist, *s.nontrait_dist);
  if (regime == OrderingRegime::Neither)
    throw RegimeError("ordering regime is Neither: no menu characterization applies");

  if (regime == OrderingRegime::MLRP) {
    return menu_from_schedules(s, separating_schedule_owned(s, Group::Trait),
                               separating_schedule_owned(s, Group::NonTrait), 0.0,
                               Regime::FullSeparation, 1.0, grid_points);
  }

  const double th_star = pooling_cutoff(s);
  if (th_star >= 1.0) {
    return menu_from_schedules(s, separating_schedule_owned(s, Group::Trait),
                               separating_schedule_owned(s, Group::NonTrait), 0.0,
                               Regime::FullSeparation, 1.0, grid_points);
  }
  if (th_star == 0.0) {
    Schedule pool = pooling_schedule_owned(s);
    return menu_from_schedules(s, pool, pool, 0.0, Regime::FullPooling, 0.0, grid_points);
  }

  // Semi-pooling: separating below theta*, pooled above. The schedules meet at
  // theta* (the crossing point solves both virtual-cost equations).
  const double cutT = hiring_cutoff(s, Group::Trait);
  const double cutN = hiring_cutoff(s, Group::NonTrait);
  const double pool_cut = pooled_hiring_cutoff(s);
  const auto piece = [s, th_star](Group g) {
    return [s, th_star, g](double t) {
      return t < th_star ? separating_quantity(s, g, t) : pooling_quantity(s, t);
    };
  };
  std::vector<double> breaks{0.0, th_star, 1.0};
  if (cutT < th_star) breaks.push_back(cutT);
  if (cutN < th_star) breaks.push_back(cutN);
  if (pool_cut > th_star) breaks.push_back(pool_cut);
  Schedule qT(piece(Group::Trait), breaks);
  Schedule qN(piece(Group::NonTrait), breaks);
  return menu_from_schedules(s, std::move(qT), std::move(qN), 0.0, Regime::SemiPooling, th_star,
                             grid_points);
}

double agent_utility(const ContractMenu& menu, const Scenario& s, double theta, Group menu_group,
                     double reported) {
  return menu.wage(menu_group, reported) -
         s.cost->cost(menu.quantity(menu_group, reported), theta);
}

namespace {

double integrate_against(const TypeDistribution& d, const std::function<double(double)>& g,
                         std::span<const double> theta_breaks, int order) {
  std::vector<double> u;
  u.reserve(theta_breaks.size());
  for (double t : theta_breaks) u.push_back(d.cdf(t));
  std::sort(u.begin(), u.end());
  return num::integrate_cells([&](double v) { return g(d.quantile(v)); }, u, order);
}

}  // namespace

double principal_objective(const ContractMenu& menu, const Scenario& s) {
  const auto breaks = menu.breakpoints();
  double total = 0.0;
  for (Group g : {Group::Trait, Group::NonTrait}) {
    const auto& d = s.dist(g);
    const double keep = 1.0 - s.credit(g);
    const auto integrand = [&, g](double t) {
      return s.price * menu.quantity(g, t) - keep * menu.wage(g, t);
    };
    const auto all = num::merge_breakpoints(breaks, d.breakpoints());
    total += s.weight(g) * integrate_against(d, integrand, all, s.options.quad_order);
  }
  return total;
}

double required_transfer(const Schedule& qT, const Schedule& qN, CostPtr cost, int quad_order) {
  RentProfile rT(qT, cost, quad_order);
  RentProfile rN(qN, cost, quad_order);
  const auto gap = [&](double t) { return rN(t) - rT(t); };

  auto candidates = num::merge_breakpoints(qT.breakpoints(), qN.breakpoints());
  candidates = num::merge_breakpoints(candidates, num::linspace(0.0, 1.0, 1001));
  double best = 0.0, best_at = 1.0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double v = gap(candidates[i]);
    if (v > best) {
      best = v;
      best_at = candidates[i];
    }
  }
  if (best <= 0.0) return 0.0;
  // Golden-section polish inside the bracketing cells around the grid argmax.
  auto it = std::lower_bound(candidates.begin(), candidates.end(), best_at);
  const std::size_t idx = static_cast<std::size_t>(std::distance(candidates.begin(), it));
  double lo = idx > 0 ? candidates[idx - 1] : candidates.front();
  double hi = idx + 1 < candidates.size() ? candidates[idx + 1] : candidates.back();
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = gap(x1), f2 = gap(x2);
  for (int it2 = 0; it2 < 80 && hi - lo > 1e-12; ++it2) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = gap(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = gap(x1);
    }
  }
  best = std::max(best, std::max(f1, f2));
  return std::max(0.0, best);
}

namespace {

// Cumulative multiplier mass on the binding (pooled) region, from the
// efficiency-gain/credit-loss decomposition at the unclamped pooled quantity.
double xi_pool(const Scenario& s, double theta) {
  theta = std::max(theta, 1e-100);  // continuous extension past singular pdfs
  const double tau = s.tax_credit;
  const double qp = pooling_quantity_unclamped(s, theta);
  const double cqt = s.cost->cost_qtheta(qp, theta);
  const double rho_gap = s.trait_dist->reverse_hazard_ratio(theta) -
                         s.nontrait_dist->reverse_hazard_ratio(theta);
  const double h = s.trait_share * s.trait_dist->pdf(theta);
  const double g = (1.0 - s.trait_share) * s.nontrait_dist->pdf(theta);
  const double ftil = (1.0 - tau) * h + g;
  return (rho_gap - s.price * tau / ((1.0 - tau) * cqt)) * (1.0 - tau) * h * g / ftil;
}

double shifted_rho(const Scenario& s, Group g, double theta, double xi) {
  const double rho = s.dist(g).reverse_hazard_ratio(theta);
  if (g == Group::Trait)
    return rho - xi / ((1.0 - s.tax_credit) * s.trait_share * s.trait_dist->pdf(theta));
  return rho + xi / ((1.0 - s.trait_share) * s.nontrait_dist->pdf(theta));
}

double shifted_quantity(const Scenario& s, Group g, double theta, double xi) {
  return virtual_cost_root(*s.cost, theta, shifted_rho(s, g, theta, xi), s.effective_price(g),
                           s.q_max(), s.options.root_tol, true);
}

}  // namespace

TransferSolve solve_with_transfer(const Scenario& s, double ubar) {
  s.validate();
  if (ubar < 0.0) throw InvalidInputError("transfer must be >= 0");
  if (!reverse_mlrp_holds(*s.trait_dist, *s.nontrait_dist))
    throw RegimeError("transfer-constrained solve requires the Reverse MLRP ordering");

  const double th_star = pooling_cutoff(s);
  Schedule sepT = separating_schedule(s, Group::Trait);
  Schedule sepN = separating_schedule(s, Group::NonTrait);
  RentProfile rT(sepT, s.cost, s.options.quad_order);
  RentProfile rN(sepN, s.cost, s.options.quad_order);
  const double ubar_sep = th_star >= 1.0 ? 0.0 : rN(th_star) - rT(th_star);

  TransferSolve out;
  out.pool_lo = th_star;

  if (th_star >= 1.0 || ubar >= ubar_sep - 1e-13) {
    out.menu = menu_from_schedules(s, separating_schedule_owned(s, Group::Trait),
                                   separating_schedule_owned(s, Group::NonTrait), ubar,
                                   Regime::FullSeparation, 1.0, s.options.grid_points);
    out.objective = principal_objective(out.menu, s);
    out.pool_hi = 1.0;
    out.separation_branch = true;
    return out;
  }

  // Tail gap: across-group rent difference accumulated over the rent-shifted
  // separating region (theta_2, 1]. Decreasing in theta_2.
  const auto tail_gap = [&](double th2) {
    const double xi = xi_pool(s, th2);
    const auto qt = [&](double t) { return shifted_quantity(s, Group::Trait, t, xi); };
    const auto qn = [&](double t) { return shifted_quantity(s, Group::NonTrait, t, xi); };
    const double cut_t = first_zero(qt, th2, s.options.root_tol);
    const double cut_n = first_zero(qn, th2, s.options.root_tol);
    std::vector<double> pts{th2, cut_t, cut_n, 1.0};
    std::sort(pts.begin(), pts.end());
    return num::integrate_cells(
        [&](double x) {
          return s.cost->cost_theta(qn(x), x) - s.cost->cost_theta(qt(x), x);
        },
        pts, s.options.quad_order);
  };

  const double th2 =
      ubar <= 0.0 ? 1.0
                  : num::find_root_increasing([&](double t) { return ubar - tail_gap(t); },
                                              th_star, 1.0, s.options.root_tol);
  const double xi = xi_pool(s, th2);

  Scenario sc = s;
  const auto qfn = [sc, th_star, th2, xi](Group g) {
    return [sc, th_star, th2, xi, g](double t) {
      if (t < th_star) return separating_quantity(sc, g, t);
      if (t <= th2) return pooling_quantity(sc, t);
      return shifted_quantity(sc, g, t, xi);
    };
  };
  std::vector<double> breaks{0.0, th_star, th2, 1.0};
  const double pool_cut = pooled_hiring_cutoff(s);
  if (pool_cut > th_star && pool_cut < th2) breaks.push_back(pool_cut);
  if (th2 < 1.0) {
    breaks.push_back(first_zero([&](double t) { return shifted_quantity(s, Group::Trait, t, xi); },
                                th2, s.options.root_tol));
    breaks.push_back(first_zero(
        [&](double t) { return shifted_quantity(s, Group::NonTrait, t, xi); }, th2,
        s.options.root_tol));
  }
  const Regime regime =
      (th_star <= 0.0 && th2 >= 1.0) ? Regime::FullPooling : Regime::SemiPooling;
  out.menu = menu_from_schedules(s, Schedule(qfn(Group::Trait), breaks),
                                 Schedule(qfn(Group::NonTrait), breaks), ubar, regime, th_star,
                                 s.options.grid_points);
  out.objective = principal_objective(out.menu, s);
  out.pool_hi = th2;
  return out;
}

}  // namespace screening
