#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "screening/cost.hpp"
#include "screening/distributions.hpp"

namespace screening {

/// Unsupported ordering regime (no characterization outside MLRP / Reverse MLRP).
class RegimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Root bracket failure inside the menu equations.
class SolverDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Group { Trait, NonTrait };
enum class Regime { FullSeparation, FullPooling, SemiPooling };
enum class Region { Sep, Pool, Out };

std::string to_string(Group g);
std::string to_string(Regime r);
std::string to_string(Region r);

struct SolverOptions {
  double root_tol = 1e-10;
  int grid_points = 2001;
  int quad_order = 20;
  std::uint64_t seed = 0;
  int perturbation_count = 1000;
};

/// A full problem instance.
struct Scenario {
  double price = 0.0;        // P
  double tax_credit = 0.0;   // tau, applied to trait hires only
  double trait_share = 0.0;  // pi_T
  DistributionPtr trait_dist;
  DistributionPtr nontrait_dist;
  CostPtr cost;
  SolverOptions options;

  /// Throws InvalidInputError unless P > C_q(0,0), tau in [0,1), share in (0,1).
  void validate() const;

  const TypeDistribution& dist(Group g) const {
    return g == Group::Trait ? *trait_dist : *nontrait_dist;
  }
  double credit(Group g) const { return g == Group::Trait ? tax_credit : 0.0; }
  double weight(Group g) const { return g == Group::Trait ? trait_share : 1.0 - trait_share; }
  double effective_price(Group g) const { return price / (1.0 - credit(g)); }
  /// Largest quantity any menu equation can ask for (zero-rent first best x2).
  double q_max() const { return 2.0 * price / (1.0 - tax_credit); }
};

/// Piecewise-smooth function of theta with named kink locations.
class Schedule {
 public:
  Schedule() = default;
  Schedule(std::function<double(double)> fn, std::vector<double> breakpoints);

  double operator()(double theta) const { return fn_(theta); }
  const std::vector<double>& breakpoints() const { return breaks_; }

 private:
  std::function<double(double)> fn_;
  std::vector<double> breaks_{0.0, 1.0};
};

/// R(theta) = int_theta^1 C_theta(q(x), x) dx, precomputed at the schedule's
/// kinks so point queries cost one partial-cell quadrature.
class RentProfile {
 public:
  RentProfile() = default;
  RentProfile(const Schedule& q, CostPtr cost, int quad_order);

  double operator()(double theta) const;

 private:
  std::function<double(double)> integrand_;
  std::vector<double> pts_;
  std::vector<double> cum_;  // R at pts_
  int order_ = 20;
};

struct AnalyticMenu {
  Schedule qT, qN;
  RentProfile rentT, rentN;
  CostPtr cost;
};

/// Sampled menu plus regime metadata. Solver outputs also carry the analytic
/// schedules; menus read back from files carry samples only.
struct ContractMenu {
  Regime regime = Regime::FullSeparation;
  double theta_star = 1.0;       // pooling cutoff (1 = no pooling, 0 = pool everywhere)
  double cutoff_trait = 1.0;     // hiring cutoffs
  double cutoff_nontrait = 1.0;
  double transfer = 0.0;         // Ubar = U^T(1)

  std::vector<double> grid;
  std::vector<double> qT, qN, wT, wN;
  std::vector<Region> region;

  std::optional<AnalyticMenu> analytic;

  bool has_analytic() const { return analytic.has_value(); }
  double quantity(Group g, double theta) const;
  double wage(Group g, double theta) const;
  /// U^j(theta) under truthful choice.
  double utility(Group g, double theta, const CostModel& cost) const;
  /// Kinks of the quantity schedules (grid points for sampled menus).
  std::vector<double> breakpoints() const;
};

// --- menu building blocks ---------------------------------------------------

/// Unique q >= 0 with Psi_group(q, theta) = effective price, clamped at 0 when
/// Psi(0, theta) already exceeds it.
double separating_quantity(const Scenario& s, Group g, double theta);
/// Same root without the q >= 0 clamp (variational path; may be negative).
double separating_quantity_unclamped(const Scenario& s, Group g, double theta);

/// Smallest theta with separating_quantity = 0; 1 when the group is hired throughout.
double hiring_cutoff(const Scenario& s, Group g);

/// Pooled quantity: P*fhat = ftilde*C_q + Ftilde*C_qtheta, clamped at 0.
double pooling_quantity(const Scenario& s, double theta);
double pooling_quantity_unclamped(const Scenario& s, double theta);

/// Smallest theta with pooling_quantity = 0; 1 if positive throughout.
double pooled_hiring_cutoff(const Scenario& s);

/// Pooling cutoff theta*: 0 when tau = 0; otherwise the smallest crossing of
/// the unclamped separating schedules (q_T = q_N); 1 when they never cross
/// (full separation). Requires the Reverse MLRP ordering.
double pooling_cutoff(const Scenario& s);

/// The optimal menu: full separation under MLRP, cutoff structure under
/// Reverse MLRP. Throws RegimeError for the Neither regime.
ContractMenu assemble_menu(const Scenario& s);
ContractMenu assemble_menu(const Scenario& s, int grid_points);

/// Fills wage samples from revenue equivalence:
/// w^j(theta) = Ubar*[j=T] + C(q^j(theta), theta) + R^j(theta).
void compute_wages(ContractMenu& menu, const Scenario& s);

/// Utility of type theta choosing the contract (menu_group, reported).
double agent_utility(const ContractMenu& menu, const Scenario& s, double theta, Group menu_group,
                     double reported);

/// pi_T int [P qT - (1-tau) wT] dF^T + (1-pi_T) int [P qN - wN] dF^N,
/// integrated against each cdf by the substitution u = F(theta).
double principal_objective(const ContractMenu& menu, const Scenario& s);

/// Smallest transfer making the pair across-group incentive compatible:
/// max(0, max_theta [R^N(theta) - R^T(theta)]).
double required_transfer(const Schedule& qT, const Schedule& qN, CostPtr cost,
                         int quad_order = 20);

/// Constrained optimum with U^T(1) = Ubar held fixed (Reverse MLRP orderings,
/// weak order accepted). Separates on [0,theta*), pools while the across-group
/// constraint binds, then separates with rent-shifted virtual costs; for
/// Ubar past the full-separation gap the menu is full separation plus a pure
/// transfer. Records the pooling boundary in theta_star fields of the result.
struct TransferSolve {
  ContractMenu menu;
  double objective = 0.0;
  double pool_lo = 0.0;   // start of the binding region (theta*)
  double pool_hi = 1.0;   // end of the binding region (theta_2); 1 when none
  bool separation_branch = false;  // Ubar >= full-separation gap
};
TransferSolve solve_with_transfer(const Scenario& s, double ubar);

// --- shared helpers used by the verifier -----------------------------------

/// Menu assembly from explicit quantity schedules (wages via revenue
/// equivalence with the given transfer).
ContractMenu menu_from_schedules(const Scenario& s, Schedule qT, Schedule qN, double transfer,
                                 Regime regime, double theta_star, int grid_points);

/// Sorted solve grid: uniform points plus schedule kinks.
std::vector<double> solve_grid(int points, std::span<const double> breakpoints);

}  // namespace screening
