#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "screening/solver.hpp"
#include "screening/verifier.hpp"

namespace screening::io {

using json = nlohmann::ordered_json;

/// Config/menu file problem; reported with the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 9 significant digits, locale-independent.
std::string fmt9(double v);

Scenario scenario_from_json(const json& j);
Scenario load_scenario(const std::string& path);
json scenario_echo(const Scenario& s);

struct AssumptionReport {
  OrderingRegime regime = OrderingRegime::Neither;
  bool mrhr_trait = false;
  bool mrhr_nontrait = false;
  bool rent_single_crossing = false;

  /// Regime is characterized and its preconditions hold (Assumption 4 is
  /// required for Reverse MLRP only; it is informational under MLRP).
  bool required_ok() const;
};
AssumptionReport check_assumptions(const Scenario& s);
json assumptions_to_json(const AssumptionReport& r);

void write_menu_csv(const ContractMenu& menu, std::ostream& os);
/// Sampled menu from a CSV emitted by write_menu_csv. Throws ConfigError on
/// schema problems. The scenario supplies the cost model for the transfer.
ContractMenu read_menu_csv(std::istream& is, const Scenario& s);

json menu_to_json(const ContractMenu& menu, const Scenario& s, double objective);
json report_to_json(const VerificationReport& report);
json transfer_gradient_to_json(const TransferGradientReport& report);

struct SweepSpec {
  std::string parameter = "tax_credit";
  double from = 0.0;
  double to = 0.0;
  int steps = 2;

  void validate() const;  // throws ConfigError
};

struct SweepRow {
  double tau = 0.0;
  bool ok = false;
  std::string note;
  double cutoff_trait = 0.0;
  double cutoff_nontrait = 0.0;
  double theta_star = 0.0;
  double hire_prob_trait = 0.0;
  double hire_prob_nontrait = 0.0;
  double objective = 0.0;
};

/// One solved row per credit level; points failing the regime assumptions are
/// marked and skipped. Points run concurrently.
std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec);
void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& os);

/// Optimal quantity schedules across credit levels, one column pair per tau.
void write_quantity_curves_csv(const Scenario& base, std::span<const double> taus,
                               std::ostream& os);

/// The four stylized designs and their raw across-group gap at zero transfer.
void write_candidate_curves_csv(const Scenario& s, double boundary, std::ostream& os);

}  // namespace screening::io
