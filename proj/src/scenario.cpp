#include "lidual/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lidual/errors.hpp"

namespace lidual {

namespace {

constexpr double kTolerance = 1e-12;

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::failures() const {
  std::string out;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (!out.empty()) out += "; ";
    out += c.name + ": " + c.message;
  }
  return out;
}

ValidationReport validate(const Scenario& s) {
  ValidationReport report;
  const auto& tree = s.tree;
  const std::size_t n = tree.size();
  auto add = [&](std::string name, bool passed, std::string message) {
    report.checks.push_back({std::move(name), passed, passed ? std::string{} : std::move(message)});
  };

  const bool price_rows = static_cast<std::size_t>(s.prices.rows()) == n;
  add("price_dimension", price_rows,
      "price table has " + std::to_string(s.prices.rows()) + " rows for " + std::to_string(n) + " nodes");
  bool finite_prices = price_rows && s.prices.allFinite();
  add("price_finite", !price_rows || finite_prices, "non-finite price entry");

  const bool income_ok = s.income_rate.size() == n;
  add("income_dimension", income_ok, "income rate defined on " + std::to_string(s.income_rate.size()) + " nodes");
  const bool clock_sized = s.clock.size() == n;
  add("clock_dimension", clock_sized, "clock increments defined on " + std::to_string(s.clock.size()) + " nodes");

  const std::size_t series_len = static_cast<std::size_t>(tree.horizon()) + 1;
  bool q_ok = s.income_units.size() == series_len &&
              std::all_of(s.income_units.begin(), s.income_units.end(), [](double v) { return std::isfinite(v); });
  add("income_units", q_ok, "income-unit profile must hold a finite value for each time 0.." +
                                std::to_string(tree.horizon()));

  const std::string theta_error = check_stopping_region(tree, s.theta0);
  add("theta0", theta_error.empty(), theta_error);

  bool weights_ok = s.utility.weights().empty() || s.utility.weights().size() == n;
  add("utility_weights", weights_ok, "utility weight table must cover every node");

  if (!clock_sized) return report;

  add("clock_start", std::abs(s.clock[tree.root()]) <= kTolerance,
      "kappa_0 = 0 violated: root increment " + num(s.clock[tree.root()]));

  bool nonneg = true;
  std::string neg_msg;
  for (NodeId id = 0; id < n; ++id)
    if (s.clock[id] < 0.0 || !std::isfinite(s.clock[id])) {
      nonneg = false;
      neg_msg = "clock increment at '" + tree.node(id).name + "' is " + num(s.clock[id]);
      break;
    }
  add("clock_nondecreasing", nonneg, neg_msg);

  // Largest accumulated clock along any path.
  std::vector<double> acc(n, 0.0);
  double max_path = 0.0;
  for (NodeId id = 0; id < n; ++id) {
    const auto& parent = tree.node(id).parent;
    acc[id] = (parent ? acc[*parent] : 0.0) + s.clock[id];
    max_path = std::max(max_path, acc[id]);
  }
  add("clock_bound", max_path <= s.clock_bound + kTolerance,
      "clock reaches " + num(max_path) + " above the bound A = " + num(s.clock_bound));

  const ClockProfile clock = deterministic_clock(s);
  add("clock_mass", clock.total > 0.0, "expected terminal clock is zero");

  double phi_min = std::numeric_limits<double>::infinity();
  double phi_max = 0.0;
  std::string density_msg;
  bool density_ok = true;
  for (int t : clock.support) {
    for (NodeId id : tree.nodes_at(t)) {
      const double phi = s.clock[id] / clock.increments[static_cast<std::size_t>(t)];
      phi_min = std::min(phi_min, phi);
      phi_max = std::max(phi_max, phi);
      if (!(phi > 0.0) && density_ok) {
        density_ok = false;
        density_msg = "clock density not bounded away from 0: node '" + tree.node(id).name + "' has no clock mass at t=" +
                      std::to_string(t) + " where dK > 0";
      }
    }
  }
  report.density_min = clock.support.empty() ? 0.0 : phi_min;
  report.density_max = phi_max;
  add("clock_density", density_ok, density_msg);
  return report;
}

void require_valid(const Scenario& scenario) {
  const auto report = validate(scenario);
  if (!report.ok()) throw MalformedScenario(report.failures());
}

ClockProfile deterministic_clock(const Scenario& s) {
  ClockProfile out;
  out.increments.assign(static_cast<std::size_t>(s.horizon()) + 1, 0.0);
  for (NodeId id = 0; id < s.tree.size(); ++id)
    out.increments[static_cast<std::size_t>(s.tree.time(id))] += s.tree.probability(id) * s.clock.at(id);
  for (int t = 0; t <= s.horizon(); ++t) {
    if (out.increments[static_cast<std::size_t>(t)] > 0.0) out.support.push_back(t);
    out.total += out.increments[static_cast<std::size_t>(t)];
  }
  return out;
}

double dk_pairing(const TimeSeries& q, const TimeSeries& r, const ClockProfile& clock) {
  double sum = 0.0;
  for (int t : clock.support) {
    const auto i = static_cast<std::size_t>(t);
    sum += q.at(i) * r.at(i) * clock.increments[i];
  }
  return sum;
}

TimeSeries zero_series(const Scenario& s) { return TimeSeries(static_cast<std::size_t>(s.horizon()) + 1, 0.0); }

TimeSeries constant_series(const Scenario& s, double value) {
  TimeSeries out(static_cast<std::size_t>(s.horizon()) + 1, value);
  out[0] = 0.0;
  return out;
}

Scenario with_theta0(const Scenario& scenario, StoppingRegion theta0) {
  Scenario out = scenario;
  out.theta0 = std::move(theta0);
  return out;
}

AdaptedProcess cumulative_income(const Scenario& s, const TimeSeries& q) {
  AdaptedProcess out(s.tree.size(), 0.0);
  for (NodeId id = 0; id < s.tree.size(); ++id) {
    const auto& parent = s.tree.node(id).parent;
    const double step = q.at(static_cast<std::size_t>(s.tree.time(id))) * s.income_rate[id] * s.clock[id];
    out[id] = (parent ? out[*parent] : 0.0) + step;
  }
  return out;
}

}  // namespace lidual
