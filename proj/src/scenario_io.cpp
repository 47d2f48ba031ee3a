#include "lidual/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "lidual/errors.hpp"

namespace lidual {

using nlohmann::json;

namespace {

double number(const json& node, const char* key, double fallback) {
  if (!node.contains(key) || node[key].is_null()) return fallback;
  if (!node[key].is_number()) throw MalformedScenario(std::string("field '") + key + "' must be a number");
  return node[key].get<double>();
}

const json& required(const json& doc, const char* key) {
  if (!doc.contains(key)) throw MalformedScenario(std::string("missing field '") + key + "'");
  return doc[key];
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw MalformedScenario("scenario document must be an object");
  Scenario s;
  s.name = doc.value("name", std::string("scenario"));
  const json& nodes = required(doc, "nodes");
  if (!nodes.is_array() || nodes.empty()) throw MalformedScenario("'nodes' must be a nonempty array");
  const long assets = doc.value("assets", 0L);
  if (assets < 0) throw MalformedScenario("'assets' must be nonnegative");

  std::vector<NodeSpec> specs;
  for (const json& n : nodes) {
    if (!n.is_object() || !n.contains("id") || !n["id"].is_string())
      throw MalformedScenario("every node needs a string 'id'");
    NodeSpec spec;
    spec.name = n["id"].get<std::string>();
    if (n.contains("parent") && !n["parent"].is_null()) {
      if (!n["parent"].is_string()) throw MalformedScenario("node '" + spec.name + "': 'parent' must be a string");
      spec.parent = n["parent"].get<std::string>();
    }
    spec.probability = number(n, "p", 1.0);
    if (n.contains("t")) spec.time = n["t"].get<int>();
    specs.push_back(std::move(spec));
  }
  s.tree = build_tree(specs);

  const std::size_t count = s.tree.size();
  s.prices = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count), assets);
  s.income_rate.assign(count, 0.0);
  s.clock.assign(count, 0.0);
  for (const json& n : nodes) {
    const std::string id = n["id"].get<std::string>();
    const NodeId k = s.tree.index_of(id);
    if (n.contains("S")) {
      const json& S = n["S"];
      if (!S.is_array() || static_cast<long>(S.size()) != assets)
        throw MalformedScenario("node '" + id + "': 'S' must list " + std::to_string(assets) + " prices");
      for (long a = 0; a < assets; ++a) s.prices(static_cast<Eigen::Index>(k), a) = S[static_cast<std::size_t>(a)].get<double>();
    } else if (assets > 0) {
      throw MalformedScenario("node '" + id + "': missing 'S'");
    }
    s.income_rate[k] = number(n, "e", 0.0);
    s.clock[k] = number(n, "dk", 0.0);
  }

  const json& theta0 = required(doc, "theta0");
  if (!theta0.is_array()) throw MalformedScenario("'theta0' must be an array of node ids");
  for (const json& id : theta0) {
    const auto k = s.tree.find(id.get<std::string>());
    if (!k) throw MalformedScenario("theta0 names unknown node '" + id.get<std::string>() + "'");
    s.theta0.stop_nodes.push_back(*k);
  }
  s.clock_bound = number(doc, "clock_bound", 1.0);
  s.initial_wealth = number(doc, "x", 1.0);

  s.income_units = zero_series(s);
  if (doc.contains("q")) {
    const json& q = doc["q"];
    if (q.is_number()) {
      s.income_units = constant_series(s, q.get<double>());
    } else if (q.is_object()) {
      for (const auto& [key, value] : q.items()) {
        std::size_t pos = 0;
        int t = -1;
        try {
          t = std::stoi(key, &pos);
        } catch (const std::exception&) {
        }
        if (pos != key.size() || t < 1 || t > s.horizon())
          throw MalformedScenario("q names invalid time '" + key + "'");
        s.income_units[static_cast<std::size_t>(t)] = value.get<double>();
      }
    } else {
      throw MalformedScenario("'q' must be a number or an object keyed by time");
    }
  }

  const json utility = doc.value("utility", json::object({{"family", "log"}}));
  std::vector<double> weights;
  if (utility.contains("weights")) {
    weights.assign(count, 1.0);
    for (const auto& [key, value] : utility["weights"].items()) {
      const auto k = s.tree.find(key);
      if (!k) throw MalformedScenario("utility weight names unknown node '" + key + "'");
      weights[*k] = value.get<double>();
    }
  }
  const std::string family = utility.value("family", std::string("log"));
  if (family == "log") {
    s.utility = UtilityField::log_utility(std::move(weights));
  } else if (family == "power") {
    if (!utility.contains("R")) throw MalformedScenario("power utility needs 'R'");
    s.utility = UtilityField::power_utility(utility["R"].get<double>(), std::move(weights));
  } else {
    throw MalformedScenario("unknown utility family '" + family + "'");
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["assets"] = s.assets();
  json nodes = json::array();
  for (NodeId k = 0; k < s.tree.size(); ++k) {
    const Node& node = s.tree.node(k);
    json n;
    n["id"] = node.name;
    n["parent"] = node.parent ? json(s.tree.node(*node.parent).name) : json(nullptr);
    n["p"] = node.branch_probability;
    json S = json::array();
    for (std::size_t a = 0; a < s.assets(); ++a) S.push_back(s.prices(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)));
    n["S"] = S;
    n["e"] = s.income_rate[k];
    n["dk"] = s.clock[k];
    nodes.push_back(n);
  }
  doc["nodes"] = nodes;
  json theta0 = json::array();
  for (NodeId k : s.theta0.stop_nodes) theta0.push_back(s.tree.node(k).name);
  doc["theta0"] = theta0;
  doc["clock_bound"] = s.clock_bound;
  doc["x"] = s.initial_wealth;
  json q = json::object();
  for (int t = 1; t <= s.horizon(); ++t) q[std::to_string(t)] = s.income_units.at(static_cast<std::size_t>(t));
  doc["q"] = q;
  json utility;
  if (s.utility.family() == UtilityFamily::Log) {
    utility["family"] = "log";
  } else {
    utility["family"] = "power";
    utility["R"] = s.utility.risk_aversion();
  }
  if (!s.utility.weights().empty()) {
    json w = json::object();
    for (NodeId k = 0; k < s.tree.size(); ++k) w[s.tree.node(k).name] = s.utility.weight(k);
    utility["weights"] = w;
  }
  doc["utility"] = utility;
  return doc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedScenario("cannot read scenario file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw MalformedScenario("scenario file '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return scenario_from_json(doc);
  } catch (const json::exception& e) {
    throw MalformedScenario("scenario file '" + path + "': " + e.what());
  }
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw MalformedScenario("cannot write scenario file '" + path + "'");
  out << scenario_to_json(s).dump(2) << '\n';
}

}  // namespace lidual
