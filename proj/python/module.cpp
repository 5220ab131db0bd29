#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>

#include "screening/io.hpp"

namespace py = pybind11;
using screening::io::json;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items()) out[py::str(key)] = json_to_py(value);
      return out;
    }
    default: return py::none();
  }
}

// Accepts either a JSON document or a path to one.
screening::Scenario scenario_of(const std::string& config) {
  const auto first = config.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && config[first] == '{') {
    return screening::io::scenario_from_json(json::parse(config));
  }
  return screening::io::load_scenario(config);
}

}  // namespace

PYBIND11_MODULE(screening, m) {
  m.doc() = "Optimal contract menus for two-group screening with verifiable group evidence "
            "and a hiring tax credit";

  py::register_exception<screening::io::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<screening::RegimeError>(m, "RegimeError", PyExc_ValueError);
  py::register_exception<screening::InvalidInputError>(m, "InvalidInputError", PyExc_ValueError);

  m.def(
      "check_assumptions",
      [](const std::string& config) {
        const auto s = scenario_of(config);
        return json_to_py(screening::io::assumptions_to_json(screening::io::check_assumptions(s)));
      },
      py::arg("config"), "Ordering regime and distribution assumption checks.");

  m.def(
      "solve",
      [](const std::string& config, int grid) {
        auto s = scenario_of(config);
        if (grid > 0) s.options.grid_points = grid;
        const auto menu = screening::assemble_menu(s);
        const double objective = screening::principal_objective(menu, s);
        return json_to_py(screening::io::menu_to_json(menu, s, objective));
      },
      py::arg("config"), py::arg("grid") = 0,
      "Optimal menu: schedules, cutoffs, regime, transfer and objective.");

  m.def(
      "verify",
      [](const std::string& config, const std::string& menu_csv, int perturbations,
         bool skip_gradient) {
        const auto s = scenario_of(config);
        screening::ContractMenu menu;
        if (menu_csv.empty()) {
          menu = screening::assemble_menu(s);
        } else {
          std::ifstream in(menu_csv);
          if (!in) throw screening::io::ConfigError("cannot open menu file: " + menu_csv);
          menu = screening::io::read_menu_csv(in, s);
        }
        screening::VerifyOptions opts;
        opts.perturbation_count = perturbations;
        opts.run_transfer_gradient = !skip_gradient;
        return json_to_py(screening::io::report_to_json(screening::verify_menu(menu, s, opts)));
      },
      py::arg("config"), py::arg("menu_csv") = std::string(), py::arg("perturbations") = 200,
      py::arg("skip_gradient") = false,
      "Constraint and optimality oracles; overall_pass covers the feasibility gates.");

  m.def(
      "sweep",
      [](const std::string& config, double from, double to, int steps) {
        const auto s = scenario_of(config);
        screening::io::SweepSpec spec{.parameter = "tax_credit", .from = from, .to = to,
                                      .steps = steps};
        py::list out;
        for (const auto& row : screening::io::run_sweep(s, spec)) {
          py::dict d;
          d["tau"] = row.tau;
          d["ok"] = row.ok;
          if (row.ok) {
            d["theta_T_star"] = row.cutoff_trait;
            d["theta_N_star"] = row.cutoff_nontrait;
            d["theta_star"] = row.theta_star;
            d["hire_prob_T"] = row.hire_prob_trait;
            d["hire_prob_N"] = row.hire_prob_nontrait;
            d["objective"] = row.objective;
          } else {
            d["note"] = row.note;
          }
          out.append(std::move(d));
        }
        return out;
      },
      py::arg("config"), py::arg("from"), py::arg("to"), py::arg("steps"),
      "Comparative statics across the tax credit.");

  m.def(
      "transfer_gradient",
      [](const std::string& config, const std::vector<double>& ubar_grid) {
        const auto s = scenario_of(config);
        return json_to_py(screening::io::transfer_gradient_to_json(
            screening::check_transfer_gradient(s, ubar_grid)));
      },
      py::arg("config"),
      py::arg("ubar_grid") = std::vector<double>{0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06},
      "Objective response to the trait transfer, with the envelope diagnostics.");
}
