#include "lidual/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lidual/errors.hpp"
#include "lidual/lp.hpp"

namespace lidual {

namespace {

constexpr double kFeasibilityTolerance = 1e-12;

// Budget rows V(n) >= 0 for constrained n, written as
//   sum_a H(a) . dS(a -> path child) - sum_{k <= n} c(k) clock(k) >= -(x + income(n)).
// Built from the path structure directly, without the solver's wealth map.
struct BudgetSystem {
  std::vector<NodeId> rows;
  std::vector<NodeId> trading;            // non-leaf nodes
  std::vector<long> trading_slot;         // per node
  std::vector<std::vector<double>> gains; // per row, H coefficients
  std::vector<std::vector<double>> spend; // per row, per consumption variable
  std::vector<double> endowment;          // x + income(n)
  std::size_t holdings = 0;
};

BudgetSystem budget_system(const Scenario& s, double x, const TimeSeries& q, const std::vector<NodeId>& vars) {
  const EventTree& tree = s.tree;
  const std::size_t d = s.assets();
  BudgetSystem b;
  b.trading_slot.assign(tree.size(), -1);
  for (NodeId n = 0; n < tree.size(); ++n)
    if (!tree.is_leaf(n)) {
      b.trading_slot[n] = static_cast<long>(b.trading.size());
      b.trading.push_back(n);
    }
  b.holdings = b.trading.size() * d;
  std::vector<long> var_slot(tree.size(), -1);
  for (std::size_t j = 0; j < vars.size(); ++j) var_slot[vars[j]] = static_cast<long>(j);

  for (NodeId n = 0; n < tree.size(); ++n) {
    bool constrained = false;
    for (NodeId stop : s.theta0.stop_nodes)
      if (tree.is_ancestor_or_equal(stop, n)) constrained = true;
    if (!constrained) continue;
    std::vector<double> gain(b.holdings, 0.0), spend(vars.size(), 0.0);
    double endowment = x;
    for (NodeId k = n; tree.node(k).parent; k = *tree.node(k).parent) {
      const NodeId a = *tree.node(k).parent;
      const double rate = q.at(static_cast<std::size_t>(tree.time(k))) * s.income_rate[k];
      endowment += rate * s.clock[k];
      if (var_slot[k] >= 0) spend[static_cast<std::size_t>(var_slot[k])] += s.clock[k];
      for (std::size_t i = 0; i < d; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        gain[static_cast<std::size_t>(b.trading_slot[a]) * d + i] +=
            s.prices(static_cast<Eigen::Index>(k), col) - s.prices(static_cast<Eigen::Index>(a), col);
      }
    }
    b.rows.push_back(n);
    b.gains.push_back(std::move(gain));
    b.spend.push_back(std::move(spend));
    b.endowment.push_back(endowment);
  }
  return b;
}

bool feasible(const BudgetSystem& b, const std::vector<double>& c) {
  std::vector<double> fixed(b.rows.size());
  bool all_nonnegative = true;
  for (std::size_t r = 0; r < b.rows.size(); ++r) {
    double v = b.endowment[r];
    for (std::size_t j = 0; j < c.size(); ++j) v -= b.spend[r][j] * c[j];
    fixed[r] = v;
    if (v < -kFeasibilityTolerance) all_nonnegative = false;
  }
  if (all_nonnegative) return true;
  if (b.holdings == 0) return false;
  LinearProgram lp;
  for (std::size_t k = 0; k < b.holdings; ++k) lp.add_variable(0.0, -LinearProgram::kInfinity, LinearProgram::kInfinity);
  for (std::size_t r = 0; r < b.rows.size(); ++r) lp.add_row(b.gains[r], RowType::GreaterEqual, -fixed[r]);
  const LpOutcome outcome = solve_lp(lp);
  if (!is_optimal(outcome)) return false;
  // The simplex tolerance is looser than ours; re-check the witness.
  const std::vector<double>& h = std::get<LpOptimal>(outcome).point;
  for (std::size_t r = 0; r < b.rows.size(); ++r) {
    double v = fixed[r];
    for (std::size_t k = 0; k < b.holdings; ++k) v += b.gains[r][k] * h[k];
    if (v < -kFeasibilityTolerance * (1.0 + std::abs(fixed[r]))) return false;
  }
  return true;
}

std::vector<NodeId> consumption_variables(const Scenario& s) {
  std::vector<NodeId> vars;
  for (NodeId n = 0; n < s.tree.size(); ++n)
    if (s.clock[n] > 0.0) vars.push_back(n);
  return vars;
}

}  // namespace

std::vector<double> consumption_bounds(const Scenario& s, double x, const TimeSeries& q) {
  const std::vector<NodeId> vars = consumption_variables(s);
  const BudgetSystem b = budget_system(s, x, q, vars);
  std::vector<double> bounds(vars.size(), 0.0);
  for (std::size_t j = 0; j < vars.size(); ++j) {
    LinearProgram lp;
    lp.sense = Sense::Maximize;
    for (std::size_t k = 0; k < vars.size(); ++k) lp.add_variable(k == j ? 1.0 : 0.0);
    for (std::size_t k = 0; k < b.holdings; ++k) lp.add_variable(0.0, -LinearProgram::kInfinity, LinearProgram::kInfinity);
    for (std::size_t r = 0; r < b.rows.size(); ++r) {
      std::vector<double> row(vars.size() + b.holdings);
      for (std::size_t k = 0; k < vars.size(); ++k) row[k] = -b.spend[r][k];
      for (std::size_t k = 0; k < b.holdings; ++k) row[vars.size() + k] = b.gains[r][k];
      lp.add_row(std::move(row), RowType::GreaterEqual, -b.endowment[r]);
    }
    const LpOutcome outcome = solve_lp(lp);
    if (is_infeasible(outcome)) throw InfeasibleProblem("no admissible consumption at this (x, q)");
    if (is_unbounded(outcome)) throw DomainError("consumption at node " + std::to_string(vars[j]) + " is unbounded");
    bounds[j] = std::max(0.0, std::get<LpOptimal>(outcome).value);
  }
  return bounds;
}

OracleResult brute_force_primal(const Scenario& s, double x, const TimeSeries& q, const GridSpec& spec) {
  const std::vector<NodeId> vars = consumption_variables(s);
  const std::size_t k = vars.size();
  if (k == 0) throw DomainError("scenario has no consumption variables");
  if (k > spec.max_variables)
    throw DomainError("brute force needs at most " + std::to_string(spec.max_variables) + " consumption variables, got " +
                      std::to_string(k));

  std::size_t res = spec.resolution;
  if (res == 0) {
    res = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(spec.max_points), 1.0 / static_cast<double>(k)) + 1e-9));
    res = std::clamp<std::size_t>(res, 2, 101);
  }
  const double total = std::pow(static_cast<double>(res), static_cast<double>(k));
  if (total > static_cast<double>(spec.max_points))
    throw GridGuard("grid of " + std::to_string(res) + "^" + std::to_string(k) + " points exceeds the guard of " +
                    std::to_string(spec.max_points));

  const BudgetSystem b = budget_system(s, x, q, vars);
  std::vector<double> cap;
  if (spec.ranges.size() == k) {
    for (const auto& r : spec.ranges) cap.push_back(r.second);
  } else {
    cap = consumption_bounds(s, x, q);
  }
  std::vector<double> lo(k), hi(k);
  for (std::size_t j = 0; j < k; ++j) {
    lo[j] = spec.ranges.size() == k ? spec.ranges[j].first : 0.0;
    hi[j] = cap[j];
  }

  OracleResult out;
  out.value = -std::numeric_limits<double>::infinity();
  std::vector<double> best_c;

  for (int round = 0; round <= spec.refinement_rounds; ++round) {
    // Axis grids and separable utility contributions.
    std::vector<std::vector<double>> grid(k), score(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double step = res > 1 ? (hi[j] - lo[j]) / static_cast<double>(res - 1) : 0.0;
      const double mass = s.tree.probability(vars[j]) * s.clock[vars[j]];
      for (std::size_t i = 0; i < res; ++i) {
        const double c = i + 1 == res ? hi[j] : lo[j] + step * static_cast<double>(i);
        grid[j].push_back(c);
        score[j].push_back(mass * s.utility.value(vars[j], c));
      }
    }
    out.points += static_cast<std::size_t>(total);

    // Feasibility is downward closed and U increasing, so along the last axis
    // the best grid point of each line is its largest feasible index.
    std::vector<std::size_t> idx(k - 1, 0);
    std::vector<double> c(k);
    const std::size_t last = k - 1;
    while (true) {
      double prefix = 0.0;
      for (std::size_t j = 0; j < last; ++j) {
        c[j] = grid[j][idx[j]];
        prefix += score[j][idx[j]];
      }
      // Only indices whose value beats the incumbent matter.
      std::size_t first = 0;
      while (first < res && !(prefix + score[last][first] > out.value)) ++first;
      if (first < res) {
        auto check = [&](std::size_t i) {
          c[last] = grid[last][i];
          ++out.feasibility_lps;
          return feasible(b, c);
        };
        if (check(first)) {
          std::size_t good = first, bad = res;
          if (check(res - 1)) {
            good = res - 1;
          } else {
            bad = res - 1;
            while (bad - good > 1) {
              const std::size_t mid = good + (bad - good) / 2;
              if (check(mid))
                good = mid;
              else
                bad = mid;
            }
          }
          const double value = prefix + score[last][good];
          if (value > out.value) {
            out.value = value;
            c[last] = grid[last][good];
            best_c = c;
          }
        }
      }
      std::size_t j = 0;
      while (j < last && ++idx[j] == res) idx[j++] = 0;
      if (j == last) break;
    }

    if (best_c.empty()) break;
    // Same half-width on every axis so a coarse axis cannot pin a fine one.
    double step = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      if (res > 1) step = std::max(step, (hi[j] - lo[j]) / static_cast<double>(res - 1));
    for (std::size_t j = 0; j < k; ++j) {
      lo[j] = std::max(0.0, best_c[j] - spec.window * step);
      hi[j] = std::min(cap[j], best_c[j] + spec.window * step);
    }
  }

  out.consumption.assign(s.tree.size(), 0.0);
  for (std::size_t j = 0; j < best_c.size(); ++j) out.consumption[vars[j]] = best_c[j];
  return out;
}

double finite_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double finite_difference(const std::function<double(double)>& f, double x, double h_plus, double h_minus) {
  return (f(x + h_plus) - f(x - h_minus)) / (h_plus + h_minus);
}

}  // namespace lidual
