#include "lidual/primal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lidual/cones.hpp"
#include "lidual/errors.hpp"
#include "lidual/lp.hpp"

namespace lidual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAdmissibilityTolerance = 1e-9;

}  // namespace

Eigen::VectorXd PlanLayout::pack(const AdaptedProcess& c, const Holdings& H) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (std::size_t k = 0; k < consumption_nodes.size(); ++k) z[static_cast<Eigen::Index>(k)] = c.at(consumption_nodes[k]);
  for (NodeId n : trading_nodes)
    for (std::size_t i = 0; i < assets; ++i)
      z[trading_index[n] + static_cast<long>(i)] = H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
  return z;
}

AdaptedProcess PlanLayout::consumption(const Eigen::VectorXd& z, std::size_t nodes) const {
  AdaptedProcess c(nodes, 0.0);
  for (std::size_t k = 0; k < consumption_nodes.size(); ++k) c[consumption_nodes[k]] = z[static_cast<Eigen::Index>(k)];
  return c;
}

Holdings PlanLayout::holdings(const Eigen::VectorXd& z, std::size_t nodes) const {
  Holdings H = Holdings::Zero(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(assets));
  for (NodeId n : trading_nodes)
    for (std::size_t i = 0; i < assets; ++i)
      H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) = z[trading_index[n] + static_cast<long>(i)];
  return H;
}

PlanLayout plan_layout(const Scenario& s) {
  PlanLayout layout;
  const std::size_t n = s.tree.size();
  layout.assets = s.assets();
  layout.consumption_index.assign(n, -1);
  layout.trading_index.assign(n, -1);
  for (NodeId id = 0; id < n; ++id)
    if (s.clock[id] > 0.0) {
      layout.consumption_index[id] = static_cast<long>(layout.consumption_nodes.size());
      layout.consumption_nodes.push_back(id);
    }
  long next = static_cast<long>(layout.consumption_nodes.size());
  for (NodeId id = 0; id < n; ++id)
    if (!s.tree.is_leaf(id)) {
      layout.trading_index[id] = next;
      layout.trading_nodes.push_back(id);
      next += static_cast<long>(layout.assets);
    }
  return layout;
}

WealthMap wealth_map(const Scenario& s, const PlanLayout& layout, double x, const TimeSeries& q) {
  const auto n = static_cast<Eigen::Index>(s.tree.size());
  WealthMap w;
  w.matrix = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(layout.size()));
  w.base = Eigen::VectorXd::Zero(n);
  const AdaptedProcess income = cumulative_income(s, q);
  for (NodeId id = 0; id < s.tree.size(); ++id) {
    const auto row = static_cast<Eigen::Index>(id);
    w.base[row] = x + income[id];
    const auto& parent = s.tree.node(id).parent;
    if (!parent) continue;
    w.matrix.row(row) = w.matrix.row(static_cast<Eigen::Index>(*parent));
    if (layout.consumption_index[id] >= 0) w.matrix(row, layout.consumption_index[id]) -= s.clock[id];
    for (std::size_t i = 0; i < layout.assets; ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      w.matrix(row, layout.trading_index[*parent] + col) +=
          s.prices(row, col) - s.prices(static_cast<Eigen::Index>(*parent), col);
    }
  }
  return w;
}

AdaptedProcess wealth_process(const Scenario& s, double x, const TimeSeries& q, const Holdings& H,
                              const AdaptedProcess& c) {
  AdaptedProcess V(s.tree.size(), 0.0);
  for (NodeId id = 0; id < s.tree.size(); ++id) {
    const auto& parent = s.tree.node(id).parent;
    if (!parent) {
      V[id] = x;
      continue;
    }
    double gain = 0.0;
    for (std::size_t i = 0; i < s.assets(); ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      gain += H(static_cast<Eigen::Index>(*parent), col) *
              (s.prices(static_cast<Eigen::Index>(id), col) - s.prices(static_cast<Eigen::Index>(*parent), col));
    }
    const double rate = q.at(static_cast<std::size_t>(s.tree.time(id))) * s.income_rate[id] - c.at(id);
    V[id] = V[*parent] + gain + rate * s.clock[id];
  }
  return V;
}

double primal_objective(const Scenario& s, const AdaptedProcess& c) {
  double total = 0.0;
  for (NodeId id = 0; id < s.tree.size(); ++id) {
    if (s.clock[id] <= 0.0) continue;
    total += s.tree.probability(id) * s.clock[id] * s.utility.value(id, c.at(id));
  }
  return total;
}

namespace {

// LP over H only: V(n) >= 0 for the constrained nodes listed in `rows`.
LpOutcome financing_lp(const Scenario& s, const PlanLayout& layout, const WealthMap& w, const AdaptedProcess& c,
                       const std::vector<NodeId>& rows) {
  const std::size_t nh = layout.trading_nodes.size() * layout.assets;
  const auto offset = static_cast<Eigen::Index>(layout.consumption_size());
  LinearProgram lp;
  lp.sense = Sense::Maximize;
  for (std::size_t k = 0; k < nh; ++k) lp.add_variable(0.0, -LinearProgram::kInfinity, LinearProgram::kInfinity);
  const Eigen::VectorXd cz = layout.pack(c, Holdings::Zero(static_cast<Eigen::Index>(s.tree.size()),
                                                          static_cast<Eigen::Index>(layout.assets)));
  for (NodeId n : rows) {
    const auto r = static_cast<Eigen::Index>(n);
    const double fixed = w.base[r] + w.matrix.row(r).dot(cz);
    std::vector<double> coeffs(nh);
    for (std::size_t k = 0; k < nh; ++k) coeffs[k] = w.matrix(r, offset + static_cast<Eigen::Index>(k));
    lp.add_row(std::move(coeffs), RowType::GreaterEqual, -fixed);
  }
  return solve_lp(lp);
}

}  // namespace

Admissibility admissibility_check(const Scenario& s, double x, const TimeSeries& q, const AdaptedProcess& c) {
  for (double v : c)
    if (v < 0.0) throw DomainError("admissibility check needs nonnegative consumption");
  const PlanLayout layout = plan_layout(s);
  const WealthMap w = wealth_map(s, layout, x, q);
  const std::vector<NodeId> constrained = constrained_region(s.tree, s.theta0);
  Admissibility out;
  const Holdings zero = Holdings::Zero(static_cast<Eigen::Index>(s.tree.size()), static_cast<Eigen::Index>(s.assets()));

  auto feasible_prefix = [&](std::size_t count) -> std::optional<Holdings> {
    std::vector<NodeId> rows(constrained.begin(), constrained.begin() + static_cast<long>(count));
    if (layout.assets == 0 || layout.trading_nodes.empty()) {
      const AdaptedProcess V = wealth_process(s, x, q, zero, c);
      for (NodeId n : rows)
        if (V[n] < -kAdmissibilityTolerance) return std::nullopt;
      return zero;
    }
    const LpOutcome outcome = financing_lp(s, layout, w, c, rows);
    if (!is_optimal(outcome)) return std::nullopt;
    const auto& point = std::get<LpOptimal>(outcome).point;
    Eigen::VectorXd z = layout.pack(c, zero);
    for (std::size_t k = 0; k < point.size(); ++k)
      z[static_cast<Eigen::Index>(layout.consumption_size() + k)] = point[k];
    return layout.holdings(z, s.tree.size());
  };

  if (auto H = feasible_prefix(constrained.size())) {
    out.admissible = true;
    out.wealth = wealth_process(s, x, q, *H, c);
    out.strategy = std::move(H);
    return out;
  }
  // Smallest infeasible prefix; feasibility is monotone in the prefix length.
  std::size_t lo = 0, hi = constrained.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible_prefix(mid))
      lo = mid;
    else
      hi = mid;
  }
  out.violated_node = constrained[hi - 1];
  return out;
}

bool financeable(const Scenario& s, double x, const TimeSeries& q, const AdaptedProcess& c) {
  const std::vector<NodeId> constrained = constrained_region(s.tree, s.theta0);
  const PlanLayout layout = plan_layout(s);
  if (layout.assets == 0 || layout.trading_nodes.empty()) {
    const Holdings zero = Holdings::Zero(static_cast<Eigen::Index>(s.tree.size()), static_cast<Eigen::Index>(s.assets()));
    const AdaptedProcess V = wealth_process(s, x, q, zero, c);
    for (NodeId n : constrained)
      if (V[n] < -kAdmissibilityTolerance) return false;
    return true;
  }
  return is_optimal(financing_lp(s, layout, wealth_map(s, layout, x, q), c, constrained));
}

namespace {

PrimalPlan solve_interior(const Scenario& s, double x, const TimeSeries& q, double price,
                          const PrimalOptions& options) {
  const std::size_t nodes = s.tree.size();
  const PlanLayout layout = plan_layout(s);
  const WealthMap w = wealth_map(s, layout, x, q);
  const std::vector<NodeId> constrained = constrained_region(s.tree, s.theta0);
  const auto nz = static_cast<Eigen::Index>(layout.size());
  const auto nc = static_cast<Eigen::Index>(layout.consumption_size());
  const auto nrows = static_cast<Eigen::Index>(constrained.size()) + nc;

  BarrierProblem problem;
  problem.inequality = Eigen::MatrixXd::Zero(nrows, nz);
  problem.inequality_offset = Eigen::VectorXd::Zero(nrows);
  for (std::size_t k = 0; k < constrained.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(constrained[k]);
    problem.inequality.row(static_cast<Eigen::Index>(k)) = w.matrix.row(r);
    problem.inequality_offset[static_cast<Eigen::Index>(k)] = w.base[r];
  }
  for (Eigen::Index j = 0; j < nc; ++j) problem.inequality(static_cast<Eigen::Index>(constrained.size()) + j, j) = 1.0;

  std::vector<double> mass(static_cast<std::size_t>(nc));
  for (Eigen::Index j = 0; j < nc; ++j) {
    const NodeId id = layout.consumption_nodes[static_cast<std::size_t>(j)];
    mass[static_cast<std::size_t>(j)] = s.tree.probability(id) * s.clock[id];
  }
  const auto& utility = s.utility;
  // H enters linearly; the diagonal term only conditions the Newton system.
  problem.regularization = Eigen::VectorXd::Zero(nz);
  problem.regularization.tail(nz - nc).setConstant(options.holdings_regularization);
  problem.objective.value = [&, nc](const Eigen::VectorXd& z) {
    double f = 0.0;
    for (Eigen::Index j = 0; j < nc; ++j) {
      if (!(z[j] > 0.0)) return kInf;
      f -= mass[static_cast<std::size_t>(j)] * utility.value(layout.consumption_nodes[static_cast<std::size_t>(j)], z[j]);
    }
    return f;
  };
  problem.objective.derivatives = [&, nc](const Eigen::VectorXd& z, Eigen::VectorXd& g, Eigen::VectorXd& h) {
    g.setZero(z.size());
    h.setZero(z.size());
    for (Eigen::Index j = 0; j < nc; ++j) {
      const NodeId id = layout.consumption_nodes[static_cast<std::size_t>(j)];
      const double m = mass[static_cast<std::size_t>(j)];
      g[j] = -m * utility.marginal(id, z[j]);
      h[j] = -m * utility.marginal_derivative(id, z[j]);
    }
  };

  // Strictly feasible start: zero trading if it already leaves slack,
  // otherwise the superreplicating strategy; uniform consumption on top.
  Holdings H0 = Holdings::Zero(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(s.assets()));
  double slack = kInf;
  for (NodeId n : constrained) slack = std::min(slack, w.base[static_cast<Eigen::Index>(n)]);
  if (!(slack > 0.0)) {
    const Admissibility super = admissibility_check(s, price, q, AdaptedProcess(nodes, 0.0));
    if (!super.admissible)
      throw NumericalFailure("superreplicating strategy not found at the superreplication price");
    H0 = *super.strategy;
    slack = x - price;
    for (NodeId n : constrained) slack = std::min(slack, x - price + super.wealth[n]);
  }
  const double eps = slack / (2.0 * std::max(s.clock_bound, 1e-300));
  AdaptedProcess c0(nodes, 0.0);
  for (NodeId id : layout.consumption_nodes) c0[id] = eps;
  Eigen::VectorXd z0 = layout.pack(c0, H0);

  const BarrierResult result = minimize_with_barrier(problem, z0, options.barrier);

  PrimalPlan plan;
  plan.consumption = layout.consumption(result.point, nodes);
  plan.holdings = layout.holdings(result.point, nodes);
  plan.wealth = wealth_process(s, x, q, plan.holdings, plan.consumption);
  plan.value = primal_objective(s, plan.consumption);
  plan.multipliers.assign(nodes, 0.0);
  for (std::size_t k = 0; k < constrained.size(); ++k)
    plan.multipliers[constrained[k]] = result.multipliers[static_cast<Eigen::Index>(k)];
  plan.gap = result.gap;
  plan.newton_steps = result.newton_steps;
  return plan;
}

}  // namespace

PrimalPlan solve_primal(const Scenario& s, double x, const TimeSeries& q, const PrimalOptions& options) {
  const double price = superreplication_price(s, q);
  if (x < price - kAdmissibilityTolerance)
    throw InfeasibleProblem("(x, q) outside K: x = " + std::to_string(x) + " below superreplication price " +
                            std::to_string(price));
  if (x - price >= options.interior_margin) return solve_interior(s, x, q, price, options);

  // Boundary of K: follow x + eps down to the margin.
  PrimalPlan plan;
  const double target = std::max(x - price, options.boundary_floor * (1.0 + std::abs(price)));
  for (double eps = 1e-2; eps > target; eps /= 10.0) plan = solve_interior(s, price + eps, q, price, options);
  plan = solve_interior(s, price + target, q, price, options);
  plan.wealth = wealth_process(s, x, q, plan.holdings, plan.consumption);
  plan.boundary_quality = true;
  if (s.utility.minus_infinity_at_zero()) {
    for (NodeId id = 0; id < s.tree.size(); ++id)
      if (s.clock[id] > 0.0 && plan.consumption[id] < 1e-6)
        throw DegenerateValue("optimal consumption vanishes at '" + s.tree.node(id).name +
                              "' where U(t, 0) = -infinity; value is -infinity");
  }
  return plan;
}

}  // namespace lidual
