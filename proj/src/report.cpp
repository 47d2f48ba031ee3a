#include "lidual/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "lidual/errors.hpp"

namespace lidual {

using nlohmann::json;

namespace {

json series_json(const TimeSeries& v) {
  json out = json::object();
  for (std::size_t t = 1; t < v.size(); ++t) out[std::to_string(t)] = number_json(v[t]);
  return out;
}

json node_map(const Scenario& s, const AdaptedProcess& v) {
  json out = json::object();
  for (NodeId k = 0; k < s.tree.size() && k < v.size(); ++k) out[s.tree.node(k).name] = number_json(v[k]);
  return out;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json validation_json(const ValidationReport& report) {
  json checks = json::array();
  for (const ValidationCheck& c : report.checks)
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"message", c.message}});
  return {{"passed", report.ok()},
          {"checks", checks},
          {"density_min", number_json(report.density_min)},
          {"density_max", number_json(report.density_max)}};
}

json plan_json(const Scenario& s, const PrimalPlan& plan) {
  json holdings = json::object();
  for (NodeId k = 0; k < s.tree.size(); ++k) {
    if (s.tree.is_leaf(k) || s.assets() == 0) continue;
    json row = json::array();
    for (std::size_t a = 0; a < s.assets(); ++a)
      row.push_back(number_json(plan.holdings(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a))));
    holdings[s.tree.node(k).name] = row;
  }
  return {{"value", number_json(plan.value)},
          {"consumption", node_map(s, plan.consumption)},
          {"wealth", node_map(s, plan.wealth)},
          {"multipliers", node_map(s, plan.multipliers)},
          {"holdings", holdings},
          {"barrier_gap", number_json(plan.gap)},
          {"newton_steps", plan.newton_steps},
          {"boundary_quality", plan.boundary_quality}};
}

json dual_json(const Scenario& s, const DualSolution& dual) {
  json reference = json::array();
  for (NodeId k : dual.decomposition.reference_nodes) reference.push_back(s.tree.node(k).name);
  return {{"value", number_json(dual.value)},
          {"y", number_json(dual.pair.y)},
          {"r", series_json(dual.pair.r)},
          {"deflator", node_map(s, dual.deflator.values)},
          {"decomposition",
           {{"y", number_json(dual.decomposition.y)},
            {"Z", node_map(s, dual.decomposition.density)},
            {"D", node_map(s, dual.decomposition.decreasing)},
            {"reference_nodes", reference}}},
          {"barrier_gap", number_json(dual.gap)},
          {"newton_steps", dual.newton_steps}};
}

json subgradient_json(const SubgradientReport& r) {
  return {{"passed", r.passed},
          {"tolerance", r.tolerance},
          {"v_finite", r.v_finite},
          {"v_value", number_json(r.v_value)},
          {"budget_lhs", number_json(r.budget_lhs)},
          {"budget_rhs", number_json(r.budget_rhs)},
          {"budget_residual", number_json(r.budget_residual)},
          {"first_order_residual", number_json(r.first_order_residual)},
          {"worst_node", r.worst_node ? json(*r.worst_node) : json(nullptr)}};
}

json slackness_json(const Scenario& s, const SlacknessCertificate& c) {
  json drops = json::array();
  for (const DropEdge& e : c.drops)
    drops.push_back({{"node", s.tree.node(e.node).name},
                     {"relative_drop", number_json(e.relative_drop)},
                     {"wealth", number_json(e.wealth)},
                     {"constrained", e.constrained}});
  json offending = json::array();
  for (NodeId k : c.offending) offending.push_back(s.tree.node(k).name);
  return {{"passed", c.passed},
          {"epsilon", c.epsilon},
          {"drops", drops},
          {"max_wealth_at_drops", number_json(c.max_wealth_at_drops)},
          {"max_complementarity", number_json(c.max_complementarity)},
          {"offending", offending}};
}

json price_json(const PriceCheck& p, const PriceCheckOptions& options) {
  json dates = json::array();
  for (const DatePrice& d : p.dates)
    dates.push_back({{"t", d.time},
                     {"finite_difference", number_json(d.finite_difference)},
                     {"predicted", number_json(d.predicted)},
                     {"error", number_json(d.error)}});
  return {{"step", options.step},
          {"wealth_finite_difference", number_json(p.wealth_finite_difference)},
          {"wealth_error", number_json(p.wealth_error)},
          {"dates", dates},
          {"max_derivative_error", number_json(p.max_derivative_error)},
          {"derivative_tolerance", options.derivative_tolerance},
          {"derivatives_passed", p.derivatives_passed},
          {"directions", p.directions},
          {"worst_inequality_excess", number_json(p.worst_inequality_excess)},
          {"inequality_tolerance", options.inequality_tolerance},
          {"inequality_passed", p.inequality_passed}};
}

json duality_report_json(const Scenario& s, const DualityReport& r, const VerifyOptions& options) {
  json body = {{"scenario", s.name},
               {"x", number_json(r.x)},
               {"q", series_json(r.q)},
               {"passed", r.passed()},
               {"primal_value", number_json(r.primal_value)},
               {"dual_value", number_json(r.dual_value)},
               {"gap", {{"value", number_json(r.gap)}, {"tolerance", r.gap_tolerance}, {"passed", r.gap_passed}}},
               {"primal", plan_json(s, r.plan)},
               {"dual", dual_json(s, r.dual)},
               {"subgradient", subgradient_json(r.subgradient)},
               {"slackness", slackness_json(s, r.slackness)}};
  if (r.prices)
    body["prices"] = price_json(*r.prices, options.prices);
  else if (!r.price_skip_reason.empty())
    body["prices"] = {{"skipped", r.price_skip_reason}};
  return body;
}

json suite_json(const SuiteSummary& summary) {
  json entries = json::array();
  for (const SuiteEntry& e : summary.entries)
    entries.push_back({{"index", e.index},
                       {"name", e.name},
                       {"seed", e.seed},
                       {"nodes", e.nodes},
                       {"assets", e.assets},
                       {"utility", e.utility},
                       {"x", number_json(e.x)},
                       {"primal_value", number_json(e.primal_value)},
                       {"dual_value", number_json(e.dual_value)},
                       {"gap", number_json(e.gap)},
                       {"budget_residual", number_json(e.budget_residual)},
                       {"first_order_residual", number_json(e.first_order_residual)},
                       {"slackness_passed", e.slackness_passed},
                       {"drop_edges", e.drop_edges},
                       {"worst_inequality_excess", number_json(e.worst_inequality_excess)},
                       {"max_derivative_error", number_json(e.max_derivative_error)},
                       {"passed", e.passed},
                       {"error", e.error}});
  return {{"seed", summary.seed},
          {"count", summary.entries.size()},
          {"passed", summary.passed_count()},
          {"all_passed", summary.passed()},
          {"entries", entries}};
}

json wrap_report(const std::string& command, std::optional<std::uint64_t> seed, json body) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  json header = {{"tool", "lidual"}, {"command", command}, {"timestamp", stamp}};
  header["seed"] = seed ? json(*seed) : json(nullptr);
  return {{"header", header}, {"body", std::move(body)}};
}

std::string node_table_csv(const Scenario& s, const PrimalPlan* plan, const DualSolution* dual) {
  std::string out = "id,name,t,P,clock,c,V,lambda,xi,Z,D\n";
  for (NodeId k = 0; k < s.tree.size(); ++k) {
    out += std::to_string(k) + "," + s.tree.node(k).name + "," + std::to_string(s.tree.time(k)) + "," +
           csv_number(s.tree.probability(k)) + "," + csv_number(s.clock[k]);
    auto field = [&](bool has, const AdaptedProcess* v) {
      out += ",";
      if (has && v && k < v->size()) out += csv_number((*v)[k]);
    };
    field(plan, plan ? &plan->consumption : nullptr);
    field(plan, plan ? &plan->wealth : nullptr);
    field(plan, plan ? &plan->multipliers : nullptr);
    field(dual, dual ? &dual->deflator.values : nullptr);
    field(dual, dual ? &dual->decomposition.density : nullptr);
    field(dual, dual ? &dual->decomposition.decreasing : nullptr);
    out += "\n";
  }
  return out;
}

std::string date_table_csv(const Scenario& s, const TimeSeries& q, const DualSolution& dual) {
  const ClockProfile clock = deterministic_clock(s);
  std::string out = "t,dK,q,r,r_dK\n";
  for (int t = 1; t <= s.horizon(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    out += std::to_string(t) + "," + csv_number(clock.increments[i]) + "," + csv_number(q.at(i)) + "," +
           csv_number(dual.pair.r.at(i)) + "," + csv_number(dual.pair.r.at(i) * clock.increments[i]) + "\n";
  }
  return out;
}

std::string suite_table_csv(const SuiteSummary& summary) {
  std::string out =
      "index,name,seed,nodes,assets,utility,x,primal_value,dual_value,gap,budget_residual,first_order_residual,"
      "slackness_passed,drop_edges,worst_inequality_excess,max_derivative_error,passed\n";
  for (const SuiteEntry& e : summary.entries)
    out += std::to_string(e.index) + "," + e.name + "," + std::to_string(e.seed) + "," + std::to_string(e.nodes) + "," +
           std::to_string(e.assets) + "," + e.utility + "," + csv_number(e.x) + "," + csv_number(e.primal_value) +
           "," + csv_number(e.dual_value) + "," + csv_number(e.gap) + "," + csv_number(e.budget_residual) + "," +
           csv_number(e.first_order_residual) + "," + (e.slackness_passed ? "1" : "0") + "," +
           std::to_string(e.drop_edges) + "," + csv_number(e.worst_inequality_excess) + "," +
           csv_number(e.max_derivative_error) + "," + (e.passed ? "1" : "0") + "\n";
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw MalformedScenario("cannot write '" + path + "'");
  out << text;
}

}  // namespace lidual
