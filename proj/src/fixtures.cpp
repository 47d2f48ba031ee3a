#include "lidual/fixtures.hpp"

#include "lidual/errors.hpp"

namespace lidual {

namespace {

struct Row {
  std::string name;
  std::optional<std::string> parent;
  double p;
  std::vector<double> prices;
  double income;
  double clock;
};

Scenario assemble(std::string name, const std::vector<Row>& rows, std::size_t assets,
                  const std::vector<std::string>& stops, double bound, double x, double q, UtilityField utility) {
  std::vector<NodeSpec> specs;
  for (const Row& r : rows) specs.push_back({r.name, r.parent, r.p, std::nullopt});
  Scenario s;
  s.name = std::move(name);
  s.tree = build_tree(specs);
  s.prices = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(assets));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const NodeId id = s.tree.index_of(rows[i].name);
    for (std::size_t a = 0; a < assets; ++a)
      s.prices(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(a)) = rows[i].prices.at(a);
  }
  s.income_rate.assign(rows.size(), 0.0);
  s.clock.assign(rows.size(), 0.0);
  for (const Row& r : rows) {
    const NodeId id = s.tree.index_of(r.name);
    s.income_rate[id] = r.income;
    s.clock[id] = r.clock;
  }
  for (const std::string& stop : stops) s.theta0.stop_nodes.push_back(s.tree.index_of(stop));
  s.clock_bound = bound;
  s.initial_wealth = x;
  s.utility = std::move(utility);
  s.income_units = constant_series(s, q);
  return s;
}

}  // namespace

Scenario fix_bin1() {
  return assemble("FIX-BIN1",
                  {{"root", std::nullopt, 1.0, {1.0}, 0.0, 0.0},
                   {"u", "root", 0.5, {2.0}, 0.0, 1.0},
                   {"d", "root", 0.5, {0.5}, 0.0, 1.0}},
                  1, {"root"}, 1.0, 1.0, 0.0, UtilityField::log_utility());
}

Scenario fix_bin1_arbitrage() {
  Scenario s = fix_bin1();
  s.name = "FIX-BIN1-ARB";
  s.prices(static_cast<Eigen::Index>(s.tree.index_of("d")), 0) = 1.5;
  return s;
}

Scenario fix_bin1_income() {
  Scenario s = fix_bin1();
  s.name = "FIX-BIN1-INCOME";
  s.income_rate[s.tree.index_of("u")] = 1.0;
  s.theta0 = terminal_region(s.tree);
  s.income_units = constant_series(s, 1.0);
  return s;
}

Scenario fix_det2() {
  return assemble("FIX-DET2",
                  {{"t0", std::nullopt, 1.0, {}, 0.0, 0.0},
                   {"t1", "t0", 1.0, {}, 0.0, 1.0},
                   {"t2", "t1", 1.0, {}, 1.0, 1.0}},
                  0, {"t0"}, 2.0, 0.1, 1.0, UtilityField::power_utility(0.5));
}

Scenario fix_det2_terminal() {
  Scenario s = with_theta0(fix_det2(), terminal_region(fix_det2().tree));
  s.name = "FIX-DET2-TERMINAL";
  return s;
}

Scenario fix_trinomial() {
  return assemble("FIX-TRI1",
                  {{"root", std::nullopt, 1.0, {1.0}, 0.0, 0.0},
                   {"u", "root", 1.0 / 3.0, {2.0}, 1.0, 1.0},
                   {"m", "root", 1.0 / 3.0, {1.0}, 0.5, 1.0},
                   {"d", "root", 1.0 / 3.0, {0.5}, 0.0, 1.0}},
                  1, {"root"}, 1.0, 1.0, 0.5, UtilityField::log_utility());
}

Scenario fix_bin2() {
  return assemble("FIX-BIN2",
                  {{"root", std::nullopt, 1.0, {1.0}, 0.0, 0.0},
                   {"u", "root", 0.5, {1.5}, 0.0, 0.0},
                   {"d", "root", 0.5, {0.75}, 0.0, 0.0},
                   {"uu", "u", 0.5, {2.25}, 1.0, 1.0},
                   {"ud", "u", 0.5, {1.125}, 0.5, 1.0},
                   {"du", "d", 0.5, {1.125}, 0.5, 1.0},
                   {"dd", "d", 0.5, {0.5625}, 0.0, 1.0}},
                  1, {"u", "du", "dd"}, 1.0, 1.0, 1.0, UtilityField::power_utility(2.0));
}

std::vector<NamedScenario> standard_fixtures() {
  std::vector<NamedScenario> out;
  for (Scenario s : {fix_bin1(), fix_bin1_income(), fix_det2(), fix_det2_terminal(), fix_trinomial(), fix_bin2()})
    out.push_back({s.name, std::move(s)});
  return out;
}

Scenario fixture_by_name(const std::string& name) {
  if (name == "FIX-BIN1-ARB") return fix_bin1_arbitrage();
  for (NamedScenario& f : standard_fixtures())
    if (f.name == name) return std::move(f.scenario);
  throw DomainError("unknown fixture '" + name + "'");
}

}  // namespace lidual
