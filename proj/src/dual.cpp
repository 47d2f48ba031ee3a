#include "lidual/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "lidual/errors.hpp"
#include "lidual/lp.hpp"

namespace lidual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Separable part sum P V(xi) clock plus a linear term.
SeparableObjective conjugate_objective(const Scenario& s, Eigen::VectorXd linear) {
  std::vector<NodeId> clock_nodes;
  std::vector<double> mass;
  for (NodeId id = 0; id < s.tree.size(); ++id)
    if (s.clock[id] > 0.0) {
      clock_nodes.push_back(id);
      mass.push_back(s.tree.probability(id) * s.clock[id]);
    }
  SeparableObjective obj;
  const UtilityField utility = s.utility;
  obj.value = [=](const Eigen::VectorXd& xi) {
    double f = linear.dot(xi);
    for (std::size_t k = 0; k < clock_nodes.size(); ++k) {
      const double v = xi[static_cast<Eigen::Index>(clock_nodes[k])];
      if (!(v > 0.0)) return kInf;
      f += mass[k] * utility.conjugate(clock_nodes[k], v);
    }
    return f;
  };
  obj.derivatives = [=](const Eigen::VectorXd& xi, Eigen::VectorXd& g, Eigen::VectorXd& h) {
    g = linear;
    h.setZero(xi.size());
    for (std::size_t k = 0; k < clock_nodes.size(); ++k) {
      const auto j = static_cast<Eigen::Index>(clock_nodes[k]);
      g[j] += mass[k] * utility.conjugate_derivative(clock_nodes[k], xi[j]);
      h[j] += mass[k] * utility.conjugate_second_derivative(clock_nodes[k], xi[j]);
    }
  };
  return obj;
}

Eigen::VectorXd composite_linear_term(const Scenario& s, double x, const TimeSeries& q) {
  Eigen::VectorXd lin = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.tree.size()));
  lin[static_cast<Eigen::Index>(s.tree.root())] += x;
  for (NodeId id = 0; id < s.tree.size(); ++id)
    lin[static_cast<Eigen::Index>(id)] +=
        s.tree.probability(id) * q.at(static_cast<std::size_t>(s.tree.time(id))) * s.income_rate[id] * s.clock[id];
  return lin;
}

AdaptedProcess to_process(const Eigen::VectorXd& v) { return AdaptedProcess(v.data(), v.data() + v.size()); }

}  // namespace

double dual_objective(const Scenario& s, const AdaptedProcess& xi) {
  double f = 0.0;
  for (NodeId id = 0; id < s.tree.size(); ++id) {
    if (s.clock[id] <= 0.0) continue;
    if (!(xi.at(id) > 0.0)) return kInf;
    f += s.tree.probability(id) * s.clock[id] * s.utility.conjugate(id, xi[id]);
  }
  return f;
}

double composite_dual_objective(const Scenario& s, double x, const TimeSeries& q, const AdaptedProcess& xi) {
  const ClockProfile clock = deterministic_clock(s);
  const DualPair pair = income_functional(s, xi);
  return dual_objective(s, xi) + x * pair.y + dk_pairing(q, pair.r, clock);
}

DualSolution solve_composite_dual(const Scenario& s, double x, const TimeSeries& q, const DualOptions& options) {
  const double price = superreplication_price(s, q);
  if (x - price < options.interior_margin)
    throw InfeasibleProblem("(x, q) not in the interior of K: x - pi(q) = " + std::to_string(x - price));

  const DeflatorConstraints cone = deflator_constraints(s);
  BarrierProblem problem;
  problem.objective = conjugate_objective(s, composite_linear_term(s, x, q));
  problem.inequality = cone.inequalities;
  problem.inequality_offset = Eigen::VectorXd::Zero(cone.inequalities.rows());
  problem.equality = cone.equalities;

  // Start from y0 Z D0 with a uniform drop on every constrained edge.
  const Deflator reference = reference_martingale_density(s);
  const auto mask = constrained_mask(s.tree, s.theta0);
  Eigen::VectorXd xi0(static_cast<Eigen::Index>(s.tree.size()));
  std::vector<double> drop(s.tree.size(), 1.0);
  for (NodeId id = 0; id < s.tree.size(); ++id) {
    const auto& parent = s.tree.node(id).parent;
    if (parent) drop[id] = drop[*parent] * (mask[*parent] ? options.start_drop : 1.0);
    xi0[static_cast<Eigen::Index>(id)] = options.start_scale * reference.values[id] * drop[id];
  }

  const BarrierResult result = minimize_with_barrier(problem, xi0, options.barrier);
  DualSolution out;
  out.deflator.values = to_process(result.point);
  out.value = composite_dual_objective(s, x, q, out.deflator.values);
  out.pair = income_functional(s, out.deflator.values);
  out.decomposition = multiplicative_decomposition(s, out.deflator.values);
  out.gap = result.gap;
  out.newton_steps = result.newton_steps;
  return out;
}

DualAtResult solve_dual_at(const Scenario& s, double y, const TimeSeries& r, const DualOptions& options) {
  if (y < 0.0) throw InfeasibleProblem("y < 0 lies outside the polar cone");
  if (y == 0.0) throw DomainError("y = 0 forces xi = 0 where V(t, 0+) is not finite; pair outside the effective domain");
  const auto& tree = s.tree;
  const std::size_t n = tree.size();
  const ClockProfile clock = deterministic_clock(s);
  const DeflatorConstraints cone = deflator_constraints(s);

  // Affine slice: cone equalities, xi(root) = y, r^xi = r.
  std::vector<Eigen::VectorXd> eq_rows;
  std::vector<double> eq_rhs;
  for (Eigen::Index i = 0; i < cone.equalities.rows(); ++i) {
    eq_rows.emplace_back(cone.equalities.row(i).transpose());
    eq_rhs.push_back(0.0);
  }
  Eigen::VectorXd root_row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  root_row[static_cast<Eigen::Index>(tree.root())] = 1.0;
  eq_rows.push_back(root_row);
  eq_rhs.push_back(y);
  for (int t : clock.support) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (NodeId id : tree.nodes_at(t)) row[static_cast<Eigen::Index>(id)] = tree.probability(id) * s.income_rate[id] * s.clock[id];
    eq_rows.push_back(row);
    const auto ti = static_cast<std::size_t>(t);
    eq_rhs.push_back(r.at(ti) * clock.increments[ti]);
  }

  // Find a relatively interior point, promoting implicitly tight inequalities to equalities.
  const auto m = static_cast<std::size_t>(cone.inequalities.rows());
  std::vector<bool> strict(m, false);
  std::vector<bool> decided(m, false);
  std::vector<Eigen::VectorXd> points;
  while (true) {
    LinearProgram lp;
    for (NodeId id = 0; id < n; ++id) lp.add_variable(0.0, 0.0, y / tree.probability(id));
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < m; ++i)
      if (!decided[i]) open.push_back(i);
    for (std::size_t k = 0; k < open.size(); ++k) lp.add_variable(1.0, 0.0, 1.0);
    for (std::size_t k = 0; k < eq_rows.size(); ++k)
      lp.add_row(std::vector<double>(eq_rows[k].data(), eq_rows[k].data() + n), RowType::Equal, eq_rhs[k]);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row(n + open.size(), 0.0);
      for (std::size_t j = 0; j < n; ++j) row[j] = cone.inequalities(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      auto pos = std::find(open.begin(), open.end(), i);
      if (pos != open.end()) row[n + static_cast<std::size_t>(pos - open.begin())] = -1.0;
      lp.add_row(std::move(row), RowType::GreaterEqual, 0.0);
    }
    const LpOutcome outcome = solve_lp(lp);
    if (!is_optimal(outcome)) throw InfeasibleProblem("(y, r) slice of the deflator cone is empty; pair not in L");
    const auto& opt = std::get<LpOptimal>(outcome);
    points.emplace_back(Eigen::Map<const Eigen::VectorXd>(opt.point.data(), static_cast<Eigen::Index>(n)));
    bool progress = false;
    for (std::size_t k = 0; k < open.size(); ++k)
      if (opt.point[n + k] > 1e-9) {
        strict[open[k]] = true;
        decided[open[k]] = true;
        progress = true;
      }
    if (!progress || open.empty()) break;
  }
  Eigen::VectorXd start = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (const auto& p : points) start += p;
  start /= static_cast<double>(points.size());
  for (NodeId id = 0; id < n; ++id)
    if (s.clock[id] > 0.0 && !(start[static_cast<Eigen::Index>(id)] > 0.0))
      throw DomainError("slice forces xi = 0 at '" + tree.node(id).name + "' where V(t, 0+) is not finite");

  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < m; ++i) {
    if (strict[i])
      keep.push_back(static_cast<Eigen::Index>(i));
    else {
      eq_rows.emplace_back(cone.inequalities.row(static_cast<Eigen::Index>(i)).transpose());
      eq_rhs.push_back(0.0);
    }
  }

  BarrierProblem problem;
  problem.objective = conjugate_objective(s, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n)));
  problem.inequality.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < keep.size(); ++k) problem.inequality.row(static_cast<Eigen::Index>(k)) = cone.inequalities.row(keep[k]);
  problem.inequality_offset = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(keep.size()));
  problem.equality.resize(static_cast<Eigen::Index>(eq_rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < eq_rows.size(); ++k) problem.equality.row(static_cast<Eigen::Index>(k)) = eq_rows[k].transpose();

  const BarrierResult result = minimize_with_barrier(problem, start, options.barrier);
  DualAtResult out;
  out.deflator.values = to_process(result.point);
  out.value = dual_objective(s, out.deflator.values);
  return out;
}

Decomposition multiplicative_decomposition(const Scenario& s, const AdaptedProcess& xi) {
  const auto& tree = s.tree;
  if (!(xi.at(tree.root()) > 0.0)) throw DomainError("decomposition needs xi(root) > 0");
  Decomposition d;
  d.y = xi[tree.root()];
  d.density.assign(tree.size(), 0.0);
  d.decreasing.assign(tree.size(), 0.0);
  d.density[tree.root()] = 1.0;
  d.decreasing[tree.root()] = 1.0;
  std::optional<Deflator> reference;
  for (NodeId n = 0; n < tree.size(); ++n) {
    if (tree.is_leaf(n)) continue;
    double mean = 0.0;
    for (NodeId c : tree.children(n)) mean += tree.branch_probability(c) * xi[c];
    for (NodeId c : tree.children(n)) {
      if (xi[n] > 0.0 && mean > 0.0) {
        d.density[c] = d.density[n] * xi[c] / mean;
        d.decreasing[c] = d.decreasing[n] * mean / xi[n];
      } else {
        if (!reference) reference = reference_martingale_density(s);
        d.density[c] = d.density[n] * reference->values[c] / reference->values[n];
        d.decreasing[c] = 0.0;
        d.reference_nodes.push_back(c);
      }
    }
  }
  return d;
}

Deflator extend_deflator(const Scenario& s, const PrimalPlan& plan, double tolerance) {
  const auto& tree = s.tree;
  Deflator xi{AdaptedProcess(tree.size(), 0.0)};
  for (NodeId step = tree.size(); step-- > 0;) {
    const NodeId n = step;
    if (s.clock[n] > 0.0) {
      if (!(plan.consumption.at(n) > 0.0))
        throw ExtensionFailure("unbounded multiplier: optimal consumption vanishes at '" + tree.node(n).name + "'");
      xi.values[n] = s.utility.marginal(n, plan.consumption[n]);
      continue;
    }
    double v = plan.multipliers.at(n) / tree.probability(n);
    for (NodeId c : tree.children(n)) v += tree.branch_probability(c) * xi.values[c];
    xi.values[n] = v;
  }
  double scale = 1.0;
  for (double v : xi.values) scale = std::max(scale, std::abs(v));
  const ConeResiduals residuals = deflator_residuals(s, xi.values);
  if (residuals.max() > tolerance * scale)
    throw ExtensionFailure("extended deflator leaves the cone: residual " + std::to_string(residuals.max()));
  return xi;
}

}  // namespace lidual
