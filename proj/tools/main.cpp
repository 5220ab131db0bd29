#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "screening/io.hpp"

namespace {

// Exit codes: 0 ok, 1 verification fail, 2 input error, 3 unsupported regime.
constexpr int kExitVerifyFail = 1;
constexpr int kExitInputError = 2;
constexpr int kExitRegime = 3;

using screening::io::fmt9;

int cmd_check_assumptions(const std::string& config_path) {
  const auto s = screening::io::load_scenario(config_path);
  const auto report = screening::io::check_assumptions(s);
  std::cout << screening::io::assumptions_to_json(report).dump(2) << '\n';
  return report.required_ok() ? 0 : kExitRegime;
}

int cmd_solve(const std::string& config_path, int grid, std::string out_path,
              const std::string& format) {
  auto s = screening::io::load_scenario(config_path);
  if (grid > 0) s.options.grid_points = grid;
  const auto menu = screening::assemble_menu(s);
  const double objective = screening::principal_objective(menu, s);

  if (out_path.empty()) out_path = format == "json" ? "menu.json" : "menu.csv";
  std::ofstream out(out_path);
  if (!out) throw screening::io::ConfigError("cannot write output file: " + out_path);
  if (format == "json") {
    out << screening::io::menu_to_json(menu, s, objective).dump(2) << '\n';
  } else {
    screening::io::write_menu_csv(menu, out);
  }

  std::cout << "regime " << screening::to_string(menu.regime) << "  theta_T_star "
            << fmt9(menu.cutoff_trait) << "  theta_N_star " << fmt9(menu.cutoff_nontrait)
            << "  theta_star " << fmt9(menu.theta_star) << "  transfer "
            << fmt9(menu.transfer) << "  objective " << fmt9(objective) << '\n';
  std::cout << "menu written to " << out_path << '\n';
  return 0;
}

int cmd_verify(const std::string& config_path, const std::string& menu_path,
               const std::string& out_path, int perturbations, double boundary,
               bool skip_gradient) {
  const auto s = screening::io::load_scenario(config_path);
  screening::ContractMenu menu;
  if (menu_path.empty()) {
    menu = screening::assemble_menu(s);
  } else {
    std::ifstream in(menu_path);
    if (!in) throw screening::io::ConfigError("cannot open menu file: " + menu_path);
    menu = screening::io::read_menu_csv(in, s);
  }

  screening::VerifyOptions opts;
  opts.perturbation_count = perturbations > 0 ? perturbations : s.options.perturbation_count;
  opts.candidate_boundary = boundary;
  opts.run_transfer_gradient = !skip_gradient;
  const auto report = screening::verify_menu(menu, s, opts);

  const auto j = screening::io::report_to_json(report);
  std::ofstream out(out_path);
  if (!out) throw screening::io::ConfigError("cannot write report file: " + out_path);
  out << j.dump(2) << '\n';

  for (const auto& e : report.entries) {
    const char* status = e.status == screening::CheckEntry::Status::Pass
                             ? "pass"
                             : (e.status == screening::CheckEntry::Status::Fail ? "FAIL"
                                                                                : "skipped");
    std::cout << status << (e.informational ? " (info)" : "") << "  " << e.name
              << "  worst " << fmt9(e.worst) << '\n';
  }
  std::cout << (report.overall() ? "overall: pass" : "overall: FAIL") << "  report written to "
            << out_path << '\n';
  return report.overall() ? 0 : kExitVerifyFail;
}

int cmd_sweep(const std::string& config_path, const screening::io::SweepSpec& spec,
              const std::string& out_path) {
  const auto s = screening::io::load_scenario(config_path);
  const auto rows = screening::io::run_sweep(s, spec);
  std::ofstream out(out_path);
  if (!out) throw screening::io::ConfigError("cannot write output file: " + out_path);
  screening::io::write_sweep_csv(rows, out);
  int skipped = 0;
  for (const auto& r : rows)
    if (!r.ok) ++skipped;
  std::cout << rows.size() << " sweep points written to " << out_path;
  if (skipped > 0) std::cout << "  (warning: " << skipped << " skipped)";
  std::cout << '\n';
  return 0;
}

int cmd_curves(const std::string& config_path, const std::string& out_dir,
               const std::vector<double>& taus, double boundary) {
  const auto s = screening::io::load_scenario(config_path);
  std::filesystem::create_directories(out_dir);

  const auto quantities_path = out_dir + "/quantities.csv";
  std::ofstream q_out(quantities_path);
  if (!q_out) throw screening::io::ConfigError("cannot write " + quantities_path);
  screening::io::write_quantity_curves_csv(s, taus, q_out);

  const auto candidates_path = out_dir + "/candidates.csv";
  std::ofstream c_out(candidates_path);
  if (!c_out) throw screening::io::ConfigError("cannot write " + candidates_path);
  screening::io::write_candidate_curves_csv(s, boundary, c_out);

  std::cout << "curves written to " << quantities_path << " and " << candidates_path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal contract menus for two-group screening with verifiable group evidence "
               "and a hiring tax credit"};
  app.require_subcommand(1);

  std::string config, menu_path, out_path, format = "csv", out_dir = "curves";
  int grid = 0, perturbations = 0;
  double boundary = -1.0;
  bool skip_gradient = false;
  screening::io::SweepSpec spec;
  std::vector<double> taus{0.0, 0.2, 0.4, 0.6};

  auto* check = app.add_subcommand("check-assumptions", "Classify the ordering regime and check "
                                                        "the distribution assumptions");
  check->add_option("config", config, "scenario config (JSON)")->required();

  auto* solve = app.add_subcommand("solve", "Compute the optimal menu");
  solve->add_option("config", config)->required();
  solve->add_option("--grid", grid, "theta grid points");
  solve->add_option("--out", out_path, "output file");
  solve->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* verify = app.add_subcommand("verify", "Run the constraint and optimality oracles");
  verify->add_option("config", config)->required();
  verify->add_option("--menu", menu_path, "menu CSV to verify (default: solve internally)");
  verify->add_option("--out", out_path, "report file")->default_val("report.json");
  verify->add_option("--perturbations", perturbations, "perturbation count");
  verify->add_option("--boundary", boundary, "candidate pooling boundary");
  verify->add_flag("--skip-gradient", skip_gradient, "skip the transfer-gradient re-solves");

  auto* sweep = app.add_subcommand("sweep", "Solve across a tax-credit range");
  sweep->add_option("config", config)->required();
  sweep->add_option("--param", spec.parameter, "swept parameter")->default_val("tax_credit");
  sweep->add_option("--from", spec.from)->required();
  sweep->add_option("--to", spec.to)->required();
  sweep->add_option("--steps", spec.steps)->required();
  sweep->add_option("--out", out_path, "output CSV")->default_val("sweep.csv");

  auto* curves = app.add_subcommand("curves", "Emit quantity schedules per tax credit and the "
                                              "stylized candidate designs");
  curves->add_option("config", config)->required();
  curves->add_option("--out", out_dir, "output directory")->default_val("curves");
  curves->add_option("--taus", taus, "tax credit levels");
  curves->add_option("--boundary", boundary, "candidate pooling boundary");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check_assumptions(config);
    if (solve->parsed()) return cmd_solve(config, grid, out_path, format);
    if (verify->parsed())
      return cmd_verify(config, menu_path, out_path, perturbations, boundary, skip_gradient);
    if (sweep->parsed()) return cmd_sweep(config, spec, out_path);
    if (curves->parsed()) return cmd_curves(config, out_dir, taus, boundary);
  } catch (const screening::RegimeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRegime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return 0;
}
