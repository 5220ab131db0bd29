#include "screening/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

namespace screening::io {

std::string fmt9(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

namespace {

const json& require_field(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing field '" + key + "'");
  return j.at(key);
}

double require_number(const json& j, const std::string& key) {
  const auto& v = require_field(j, key);
  if (!v.is_number()) throw ConfigError("field '" + key + "' must be a number");
  return v.get<double>();
}

DistributionPtr parse_distribution(const json& j, const std::string& key) {
  const auto& spec = require_field(j, key);
  if (!spec.is_object()) throw ConfigError("field '" + key + "' must be an object");
  const auto family = require_field(spec, "family").get<std::string>();
  try {
    if (family == "polynomial") {
      return std::make_shared<PolynomialDistribution>(require_number(spec, "exponent"));
    }
    if (family == "table") {
      const auto knots = require_field(spec, "knots").get<std::vector<double>>();
      const auto cdf = require_field(spec, "cdf").get<std::vector<double>>();
      return std::make_shared<TabulatedDistribution>(knots, cdf);
    }
  } catch (const InvalidInputError& e) {
    throw ConfigError("field '" + key + "': " + e.what());
  }
  throw ConfigError("field '" + key + "': unknown family '" + family + "'");
}

CostPtr parse_cost(const json& j) {
  const auto& spec = require_field(j, "cost");
  std::string kind;
  double c = 0.0;
  if (spec.is_string()) {
    kind = spec.get<std::string>();
  } else if (spec.is_object()) {
    kind = require_field(spec, "kind").get<std::string>();
    if (spec.contains("c")) c = spec.at("c").get<double>();
  } else {
    throw ConfigError("field 'cost' must be a string or an object");
  }
  if (kind == "quadratic") return std::make_shared<QuadraticCost>();
  if (kind == "polyphrase") {
    try {
      return std::make_shared<ExtendedQuadraticCost>(c);
    } catch (const InvalidInputError& e) {
      throw ConfigError(std::string("field 'cost': ") + e.what());
    }
  }
  throw ConfigError("field 'cost': unknown kind '" + kind + "'");
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.price = require_number(j, "price");
  s.tax_credit = require_number(j, "tax_credit");
  s.trait_share = require_number(j, "trait_share");
  s.trait_dist = parse_distribution(j, "trait_dist");
  s.nontrait_dist = parse_distribution(j, "nontrait_dist");
  s.cost = parse_cost(j);
  if (j.contains("options")) {
    const auto& o = j.at("options");
    if (o.contains("root_tol")) s.options.root_tol = o.at("root_tol").get<double>();
    if (o.contains("grid_points")) s.options.grid_points = o.at("grid_points").get<int>();
    if (o.contains("quad_order")) s.options.quad_order = o.at("quad_order").get<int>();
    if (o.contains("seed")) s.options.seed = o.at("seed").get<std::uint64_t>();
    if (o.contains("perturbations"))
      s.options.perturbation_count = o.at("perturbations").get<int>();
  }
  try {
    s.validate();
    const auto trait_check = validate_distribution(*s.trait_dist);
    if (!trait_check.ok) throw ConfigError("field 'trait_dist': " + trait_check.message);
    const auto other_check = validate_distribution(*s.nontrait_dist);
    if (!other_check.ok) throw ConfigError("field 'nontrait_dist': " + other_check.message);
    const auto cost_check = validate_cost(*s.cost, {.q_max = s.q_max()});
    if (!cost_check.ok()) {
      for (const auto& e : cost_check.entries)
        if (!e.pass && !e.warning_only)
          throw ConfigError("field 'cost': check '" + e.name + "' failed");
    }
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

namespace {

json distribution_echo(const TypeDistribution& d) {
  if (const auto* poly = dynamic_cast<const PolynomialDistribution*>(&d)) {
    return json{{"family", "polynomial"}, {"exponent", poly->exponent()}};
  }
  json out{{"family", "table"}};
  out["describe"] = d.describe();
  return out;
}

}  // namespace

json scenario_echo(const Scenario& s) {
  json j;
  j["price"] = s.price;
  j["tax_credit"] = s.tax_credit;
  j["trait_share"] = s.trait_share;
  j["trait_dist"] = distribution_echo(*s.trait_dist);
  j["nontrait_dist"] = distribution_echo(*s.nontrait_dist);
  if (const auto* ext = dynamic_cast<const ExtendedQuadraticCost*>(s.cost.get())) {
    j["cost"] = json{{"kind", "polyphrase"}, {"c", ext->coefficient()}};
  } else {
    j["cost"] = s.cost->describe();
  }
  j["options"] = json{{"root_tol", s.options.root_tol},
                      {"grid_points", s.options.grid_points},
                      {"quad_order", s.options.quad_order},
                      {"seed", s.options.seed},
                      {"perturbations", s.options.perturbation_count}};
  return j;
}

bool AssumptionReport::required_ok() const {
  if (regime == OrderingRegime::Neither) return false;
  if (!mrhr_trait || !mrhr_nontrait) return false;
  if (regime == OrderingRegime::ReverseMLRP && !rent_single_crossing) return false;
  return true;
}

AssumptionReport check_assumptions(const Scenario& s) {
  AssumptionReport r;
  r.regime = classify_ordering(*s.trait_dist, *s.nontrait_dist);
  r.mrhr_trait = check_monotone_reverse_hazard(*s.trait_dist);
  r.mrhr_nontrait = check_monotone_reverse_hazard(*s.nontrait_dist);
  r.rent_single_crossing = check_rent_single_crossing(*s.trait_dist, *s.nontrait_dist);
  return r;
}

json assumptions_to_json(const AssumptionReport& r) {
  return json{{"regime", to_string(r.regime)},
              {"monotone_reverse_hazard_trait", r.mrhr_trait},
              {"monotone_reverse_hazard_nontrait", r.mrhr_nontrait},
              {"rent_single_crossing", r.rent_single_crossing},
              {"required_ok", r.required_ok()}};
}

void write_menu_csv(const ContractMenu& menu, std::ostream& os) {
  os << "theta,qT,qN,wT,wN,region\n";
  for (std::size_t i = 0; i < menu.grid.size(); ++i) {
    os << fmt9(menu.grid[i]) << ',' << fmt9(menu.qT[i]) << ',' << fmt9(menu.qN[i]) << ','
       << fmt9(menu.wT[i]) << ',' << fmt9(menu.wN[i]) << ',' << to_string(menu.region[i])
       << '\n';
  }
}

ContractMenu read_menu_csv(std::istream& is, const Scenario& s) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("menu file is empty");
  if (line.ends_with('\r')) line.pop_back();
  if (line != "theta,qT,qN,wT,wN,region")
    throw ConfigError("menu file header mismatch: expected theta,qT,qN,wT,wN,region");

  ContractMenu menu;
  bool any_pool = false, any_sep = false;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.ends_with('\r')) line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    double vals[5];
    for (int k = 0; k < 5; ++k) {
      if (!std::getline(row, field, ','))
        throw ConfigError("menu file: short row at line " + std::to_string(line_no));
      try {
        vals[k] = std::stod(field);
      } catch (const std::exception&) {
        throw ConfigError("menu file: bad number at line " + std::to_string(line_no));
      }
    }
    if (!std::getline(row, field, ','))
      throw ConfigError("menu file: missing region at line " + std::to_string(line_no));
    Region region;
    if (field == "SEP") region = Region::Sep;
    else if (field == "POOL") region = Region::Pool;
    else if (field == "OUT") region = Region::Out;
    else throw ConfigError("menu file: unknown region '" + field + "'");

    if (!menu.grid.empty() && vals[0] <= menu.grid.back())
      throw ConfigError("menu file: theta must be strictly increasing");
    menu.grid.push_back(vals[0]);
    menu.qT.push_back(vals[1]);
    menu.qN.push_back(vals[2]);
    menu.wT.push_back(vals[3]);
    menu.wN.push_back(vals[4]);
    menu.region.push_back(region);
    any_pool |= region == Region::Pool;
    any_sep |= region == Region::Sep;
  }
  if (menu.grid.size() < 2) throw ConfigError("menu file: need at least two rows");
  if (menu.grid.front() != 0.0 || menu.grid.back() != 1.0)
    throw ConfigError("menu file: theta must span [0, 1]");

  menu.regime = any_pool ? (any_sep ? Regime::SemiPooling : Regime::FullPooling)
                         : Regime::FullSeparation;
  menu.theta_star = 1.0;
  if (any_pool) {
    for (std::size_t i = 0; i < menu.grid.size(); ++i) {
      if (menu.region[i] == Region::Pool) {
        menu.theta_star = menu.grid[i];
        break;
      }
    }
  }
  const auto cutoff = [&](const std::vector<double>& q) {
    for (std::size_t i = q.size(); i-- > 0;) {
      if (q[i] > 0.0) return i + 1 < q.size() ? menu.grid[i + 1] : 1.0;
    }
    return 0.0;
  };
  menu.cutoff_trait = cutoff(menu.qT);
  menu.cutoff_nontrait = cutoff(menu.qN);
  menu.transfer = menu.wT.back() - s.cost->cost(menu.qT.back(), 1.0);
  return menu;
}

json menu_to_json(const ContractMenu& menu, const Scenario& s, double objective) {
  json j;
  j["regime"] = to_string(menu.regime);
  j["theta_star"] = menu.theta_star;
  j["cutoff_trait"] = menu.cutoff_trait;
  j["cutoff_nontrait"] = menu.cutoff_nontrait;
  j["transfer"] = menu.transfer;
  j["objective"] = objective;
  j["scenario"] = scenario_echo(s);
  j["grid"] = menu.grid;
  j["qT"] = menu.qT;
  j["qN"] = menu.qN;
  j["wT"] = menu.wT;
  j["wN"] = menu.wN;
  std::vector<std::string> regions;
  regions.reserve(menu.region.size());
  for (Region r : menu.region) regions.push_back(to_string(r));
  j["region"] = regions;
  return j;
}

namespace {

json entry_to_json(const CheckEntry& e) {
  json j;
  j["name"] = e.name;
  j["status"] = e.status == CheckEntry::Status::Pass
                    ? "pass"
                    : (e.status == CheckEntry::Status::Fail ? "fail" : "skipped");
  j["informational"] = e.informational;
  j["worst_violation"] = e.worst;
  j["witness"] = json{{"theta", e.at_theta}, {"theta_prime", e.at_theta_prime},
                      {"group", e.group}};
  if (!e.detail.empty()) j["detail"] = e.detail;
  return j;
}

}  // namespace

json report_to_json(const VerificationReport& report) {
  json j;
  j["overall_pass"] = report.overall();
  j["checks"] = json::array();
  for (const auto& e : report.entries) j["checks"].push_back(entry_to_json(e));
  return j;
}

json transfer_gradient_to_json(const TransferGradientReport& report) {
  json j;
  j["pass"] = report.pass();
  j["xi_trait_at_0"] = report.xi_trait_at_0;
  j["xi_trait_at_1"] = report.xi_trait_at_1;
  j["bound"] = report.bound;
  j["ubar_grid"] = report.ubar_grid;
  j["objective"] = report.objective_vals;
  j["slope_fd"] = report.slope_fd;
  j["slope_envelope"] = report.slope_envelope;
  j["pool_boundary"] = report.pool_boundary;
  j["checks"] = json::array();
  for (const auto& e : report.entries) j["checks"].push_back(entry_to_json(e));
  return j;
}

void SweepSpec::validate() const {
  if (parameter != "tax_credit")
    throw ConfigError("sweep parameter must be 'tax_credit', got '" + parameter + "'");
  if (!(from < to)) throw ConfigError("sweep: from must be < to");
  if (!(from >= 0.0)) throw ConfigError("sweep: from must be >= 0");
  if (!(to < 1.0)) throw ConfigError("sweep: to must be < 1");
  if (steps < 2) throw ConfigError("sweep: steps must be >= 2");
}

std::vector<SweepRow> run_sweep(const Scenario& base, const SweepSpec& spec) {
  spec.validate();
  const auto taus = num::linspace(spec.from, spec.to, spec.steps);
  const auto solve_point = [&base](double tau) {
    SweepRow row;
    row.tau = tau;
    Scenario s = base;
    s.tax_credit = tau;
    try {
      const auto assumptions = check_assumptions(s);
      if (!assumptions.required_ok()) {
        row.note = "assumptions failed (regime " + to_string(assumptions.regime) + ")";
        return row;
      }
      const auto menu = assemble_menu(s);
      row.cutoff_trait = menu.cutoff_trait;
      row.cutoff_nontrait = menu.cutoff_nontrait;
      row.theta_star = menu.theta_star;
      row.hire_prob_trait = s.trait_dist->cdf(menu.cutoff_trait);
      row.hire_prob_nontrait = s.nontrait_dist->cdf(menu.cutoff_nontrait);
      row.objective = principal_objective(menu, s);
      row.ok = true;
    } catch (const std::exception& e) {
      row.note = e.what();
    }
    return row;
  };

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(taus.size());
  for (double tau : taus)
    futures.push_back(std::async(std::launch::async, solve_point, tau));
  std::vector<SweepRow> rows;
  rows.reserve(taus.size());
  for (auto& f : futures) rows.push_back(f.get());
  return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& os) {
  os << "tau,theta_T_star,theta_N_star,theta_star,hire_prob_T,hire_prob_N,objective,status\n";
  for (const auto& r : rows) {
    os << fmt9(r.tau) << ',';
    if (r.ok) {
      os << fmt9(r.cutoff_trait) << ',' << fmt9(r.cutoff_nontrait) << ',' << fmt9(r.theta_star)
         << ',' << fmt9(r.hire_prob_trait) << ',' << fmt9(r.hire_prob_nontrait) << ','
         << fmt9(r.objective) << ",ok\n";
    } else {
      os << "nan,nan,nan,nan,nan,nan,skipped\n";
    }
  }
}

void write_quantity_curves_csv(const Scenario& base, std::span<const double> taus,
                               std::ostream& os) {
  std::vector<ContractMenu> menus;
  menus.reserve(taus.size());
  for (double tau : taus) {
    Scenario s = base;
    s.tax_credit = tau;
    menus.push_back(assemble_menu(s));
  }
  os << "theta";
  for (double tau : taus) os << ",qT_tau" << fmt9(tau) << ",qN_tau" << fmt9(tau);
  os << '\n';
  const auto grid = num::linspace(0.0, 1.0, base.options.grid_points);
  for (double t : grid) {
    os << fmt9(t);
    for (const auto& menu : menus)
      os << ',' << fmt9(menu.quantity(Group::Trait, t)) << ','
         << fmt9(menu.quantity(Group::NonTrait, t));
    os << '\n';
  }
}

void write_candidate_curves_csv(const Scenario& s, double boundary, std::ostream& os) {
  const auto candidates = build_candidate_menus(s, boundary);
  os << "theta";
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    os << ",qT_" << k + 1 << ",qN_" << k + 1 << ",violation_" << k + 1;
  }
  os << '\n';
  const auto grid = num::linspace(0.0, 1.0, s.options.grid_points);
  for (double t : grid) {
    os << fmt9(t);
    for (const auto& c : candidates) {
      os << ',' << fmt9(c.menu.quantity(Group::Trait, t)) << ','
         << fmt9(c.menu.quantity(Group::NonTrait, t)) << ','
         << fmt9(candidate_violation(c, s, t));
    }
    os << '\n';
  }
}

}  // namespace screening::io
