#include "lidual/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "lidual/cones.hpp"
#include "lidual/errors.hpp"

namespace lidual {

SolvedPair solve_pair(const Scenario& s, double x, const TimeSeries& q, const SolveOptions& options) {
  SolvedPair out;
  out.primal = solve_primal(s, x, q, options.primal);
  out.dual = solve_composite_dual(s, x, q, options.dual);
  out.gap = std::abs(out.primal.value - out.dual.value) / (1.0 + std::abs(out.primal.value));
  return out;
}

double duality_gap(const Scenario& s, double x, const TimeSeries& q, const SolveOptions& options) {
  return solve_pair(s, x, q, options).gap;
}

SubgradientReport subgradient_check(const Scenario& s, double x, const TimeSeries& q, const PrimalPlan& plan,
                                    const DualSolution& dual, double tolerance) {
  return subgradient_check(s, x, q, plan, dual.deflator.values, tolerance);
}

SubgradientReport subgradient_check(const Scenario& s, double x, const TimeSeries& q, const PrimalPlan& plan,
                                    const AdaptedProcess& deflator, double tolerance) {
  SubgradientReport out;
  out.tolerance = tolerance;
  const ClockProfile clock = deterministic_clock(s);
  const DualPair pair = income_functional(s, deflator);

  out.v_value = dual_objective(s, deflator);
  out.v_finite = std::isfinite(out.v_value);

  for (NodeId id = 0; id < s.tree.size(); ++id) {
    if (s.clock[id] <= 0.0) continue;
    out.budget_lhs += s.tree.probability(id) * deflator[id] * plan.consumption[id] * s.clock[id];
    const double c = plan.consumption[id];
    const double residual =
        c > 0.0 ? std::abs(deflator[id] - s.utility.marginal(id, c)) / (1.0 + deflator[id])
                : std::numeric_limits<double>::infinity();
    if (!out.worst_node || !(residual <= out.first_order_residual)) {
      out.first_order_residual = residual;
      out.worst_node = id;
    }
  }
  out.budget_rhs = x * pair.y + dk_pairing(q, pair.r, clock);
  out.budget_residual = std::abs(out.budget_lhs - out.budget_rhs);
  out.passed = out.v_finite && out.budget_residual <= tolerance && out.first_order_residual <= tolerance;
  return out;
}

namespace {

double value_at(const Scenario& s, double x, const TimeSeries& q, const SolveOptions& solve) {
  return solve_primal(s, x, q, solve.primal).value;
}

void require_interior(const Scenario& s, double x, const TimeSeries& q, double margin, const std::string& what) {
  const double slack = x - superreplication_price(s, q);
  if (slack <= margin)
    throw StepTooLarge(what + " leaves the interior of K (x - pi(q) = " + std::to_string(slack) + ")");
}

}  // namespace

PriceCheck marginal_price_check(const Scenario& s, double x, const TimeSeries& q, double y, const TimeSeries& r,
                                const PriceCheckOptions& options, const SolveOptions& solve) {
  const double h = options.step;
  const double margin = solve.primal.interior_margin;
  const ClockProfile clock = deterministic_clock(s);
  PriceCheck out;

  require_interior(s, x - h, q, margin, "x - h");
  const double up = value_at(s, x + h, q, solve);
  const double down = value_at(s, x - h, q, solve);
  out.wealth_finite_difference = (up - down) / (2.0 * h);
  out.wealth_error = std::abs(out.wealth_finite_difference - y);
  out.max_derivative_error = out.wealth_error;

  for (int t : clock.support) {
    const auto ti = static_cast<std::size_t>(t);
    TimeSeries plus = q, minus = q;
    plus[ti] += h;
    minus[ti] -= h;
    require_interior(s, x, plus, margin, "q + h at t=" + std::to_string(t));
    require_interior(s, x, minus, margin, "q - h at t=" + std::to_string(t));
    DatePrice row;
    row.time = t;
    row.finite_difference = (value_at(s, x, plus, solve) - value_at(s, x, minus, solve)) / (2.0 * h);
    row.predicted = r.at(ti) * clock.increments[ti];
    row.error = std::abs(row.finite_difference - row.predicted);
    out.max_derivative_error = std::max(out.max_derivative_error, row.error);
    out.dates.push_back(row);
  }
  out.derivatives_passed = out.max_derivative_error <= options.derivative_tolerance;

  const double base = value_at(s, x, q, solve);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> lift(1e-3, options.radius);
  out.worst_inequality_excess = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < options.directions; ++k) {
    TimeSeries qp = q;
    for (int t : clock.support) qp[static_cast<std::size_t>(t)] += options.radius * unit(rng);
    double xp = x + options.radius * unit(rng);
    const double price = superreplication_price(s, qp);
    const double fallback = price + lift(rng);
    if (xp - price < 1e-3) xp = fallback;
    const double predicted = base + y * (xp - x) + dk_pairing(qp, r, clock) - dk_pairing(q, r, clock);
    const double excess = value_at(s, xp, qp, solve) - predicted;
    out.worst_inequality_excess = std::max(out.worst_inequality_excess, excess);
    ++out.directions;
  }
  if (out.directions == 0) out.worst_inequality_excess = 0.0;
  out.inequality_passed = out.worst_inequality_excess <= options.inequality_tolerance;
  return out;
}

SlacknessCertificate slackness_report(const Scenario& s, const PrimalPlan& plan, const DualSolution& dual,
                                      double epsilon) {
  return slackness_report(s, plan, dual.decomposition, epsilon);
}

SlacknessCertificate slackness_report(const Scenario& s, const PrimalPlan& plan, const Decomposition& decomposition,
                                      double epsilon) {
  SlacknessCertificate out;
  out.epsilon = epsilon;
  const auto mask = constrained_mask(s.tree, s.theta0);
  const AdaptedProcess& D = decomposition.decreasing;
  for (NodeId n = 0; n < s.tree.size(); ++n) {
    if (s.tree.is_leaf(n) || !(D[n] > 0.0)) continue;
    double lowest = D[n];
    for (NodeId c : s.tree.children(n)) lowest = std::min(lowest, D[c]);
    const double drop = 1.0 - lowest / D[n];
    if (drop <= epsilon) continue;
    DropEdge edge{n, drop, plan.wealth[n], static_cast<bool>(mask[n])};
    out.max_wealth_at_drops = std::max(out.max_wealth_at_drops, std::abs(edge.wealth));
    if (!(edge.wealth <= epsilon) || !edge.constrained) out.offending.push_back(n);
    out.drops.push_back(edge);
  }
  for (NodeId n = 0; n < s.tree.size(); ++n) {
    if (!mask[n] || n >= plan.multipliers.size()) continue;
    out.max_complementarity = std::max(out.max_complementarity, std::abs(plan.multipliers[n] * plan.wealth[n]));
  }
  out.passed = out.offending.empty() && out.max_complementarity <= epsilon;
  return out;
}

bool DualityReport::passed() const {
  return gap_passed && subgradient.passed && slackness.passed && (!prices || prices->inequality_passed);
}

DualityReport verify(const Scenario& s, double x, const TimeSeries& q, const VerifyOptions& options) {
  DualityReport out;
  out.x = x;
  out.q = q;
  SolvedPair pair = solve_pair(s, x, q, options.solve);
  out.primal_value = pair.primal.value;
  out.dual_value = pair.dual.value;
  out.gap = pair.gap;
  out.gap_tolerance = options.gap_tolerance;
  out.gap_passed = out.gap <= options.gap_tolerance;
  out.plan = std::move(pair.primal);
  out.dual = std::move(pair.dual);
  out.subgradient = subgradient_check(s, x, q, out.plan, out.dual, options.residual_tolerance);
  out.slackness = slackness_report(s, out.plan, out.dual, options.slackness_epsilon);
  if (options.marginal_prices) {
    try {
      out.prices = marginal_price_check(s, x, q, out.dual.pair.y, out.dual.pair.r, options.prices, options.solve);
    } catch (const StepTooLarge& e) {
      out.price_skip_reason = e.what();
    }
  }
  return out;
}

}  // namespace lidual
