#include "lidual/cones.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lidual/errors.hpp"
#include "lidual/lp.hpp"

namespace lidual {

namespace {

constexpr double kMembershipTolerance = 1e-9;

// Row of sum_c p(c|n) xi(c) (S_i(c) - S_i(n)).
std::vector<double> neutrality_row(const Scenario& s, NodeId n, std::size_t asset) {
  std::vector<double> row(s.tree.size(), 0.0);
  const auto col = static_cast<Eigen::Index>(asset);
  for (NodeId c : s.tree.children(n))
    row[c] = s.tree.branch_probability(c) *
             (s.prices(static_cast<Eigen::Index>(c), col) - s.prices(static_cast<Eigen::Index>(n), col));
  return row;
}

// Row of xi(n) - sum_c p(c|n) xi(c).
std::vector<double> drop_row(const Scenario& s, NodeId n) {
  std::vector<double> row(s.tree.size(), 0.0);
  row[n] = 1.0;
  for (NodeId c : s.tree.children(n)) row[c] = -s.tree.branch_probability(c);
  return row;
}

// LP over xi with the cone constraints, xi(root) = y and 0 <= xi <= y / P.
LinearProgram cone_slice_lp(const Scenario& s, double y) {
  const auto& tree = s.tree;
  const auto mask = constrained_mask(tree, s.theta0);
  LinearProgram lp;
  for (NodeId id = 0; id < tree.size(); ++id) lp.add_variable(0.0, 0.0, y / tree.probability(id));
  std::vector<double> root(tree.size(), 0.0);
  root[tree.root()] = 1.0;
  lp.add_row(root, RowType::Equal, y);
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree.is_leaf(id)) continue;
    for (std::size_t i = 0; i < s.assets(); ++i) lp.add_row(neutrality_row(s, id, i), RowType::Equal, 0.0);
    lp.add_row(drop_row(s, id), mask[id] ? RowType::GreaterEqual : RowType::Equal, 0.0);
  }
  return lp;
}

// Coefficient of q_t in V(n): income accumulated at time t along the path to n.
Eigen::MatrixXd income_unit_matrix(const Scenario& s, const std::vector<int>& times) {
  const auto& tree = s.tree;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tree.size()), static_cast<Eigen::Index>(times.size()));
  for (NodeId id = 0; id < tree.size(); ++id) {
    const auto& parent = tree.node(id).parent;
    if (parent) m.row(static_cast<Eigen::Index>(id)) = m.row(static_cast<Eigen::Index>(*parent));
    for (std::size_t k = 0; k < times.size(); ++k)
      if (times[k] == tree.time(id)) m(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(k)) += s.income_rate[id] * s.clock[id];
  }
  return m;
}

// Minimises x y + <q, r> over (x, q) in K with |x|, |q_t| <= 1.
std::optional<std::pair<double, TimeSeries>> separate_from_k(const Scenario& s, double y, const TimeSeries& r) {
  const ClockProfile clock = deterministic_clock(s);
  const PlanLayout layout = plan_layout(s);
  const WealthMap w = wealth_map(s, layout, 0.0, zero_series(s));
  const Eigen::MatrixXd units = income_unit_matrix(s, clock.support);
  const auto constrained = constrained_region(s.tree, s.theta0);
  const std::size_t nq = clock.support.size();
  const std::size_t nh = layout.trading_nodes.size() * layout.assets;
  const auto h_offset = static_cast<Eigen::Index>(layout.consumption_size());

  LinearProgram lp;
  lp.sense = Sense::Minimize;
  lp.add_variable(y, -1.0, 1.0);
  for (std::size_t k = 0; k < nq; ++k) {
    const auto t = static_cast<std::size_t>(clock.support[k]);
    lp.add_variable(r.at(t) * clock.increments[t], -1.0, 1.0);
  }
  for (std::size_t k = 0; k < nh; ++k) lp.add_variable(0.0, -LinearProgram::kInfinity, LinearProgram::kInfinity);
  for (NodeId n : constrained) {
    const auto row = static_cast<Eigen::Index>(n);
    std::vector<double> coeffs(1 + nq + nh, 0.0);
    coeffs[0] = 1.0;
    for (std::size_t k = 0; k < nq; ++k) coeffs[1 + k] = units(row, static_cast<Eigen::Index>(k));
    for (std::size_t k = 0; k < nh; ++k) coeffs[1 + nq + k] = w.matrix(row, h_offset + static_cast<Eigen::Index>(k));
    lp.add_row(std::move(coeffs), RowType::GreaterEqual, 0.0);
  }
  const LpOutcome outcome = solve_lp(lp);
  if (!is_optimal(outcome)) throw NumericalFailure("separation LP over K did not reach an optimum");
  const auto& opt = std::get<LpOptimal>(outcome);
  if (opt.value >= -kMembershipTolerance) return std::nullopt;
  TimeSeries q = zero_series(s);
  for (std::size_t k = 0; k < nq; ++k) q[static_cast<std::size_t>(clock.support[k])] = opt.point[1 + k];
  return std::make_pair(opt.point[0], std::move(q));
}

}  // namespace

double ConeResiduals::max() const { return std::max({nonnegativity, neutrality, supermartingale, martingale}); }

DeflatorConstraints deflator_constraints(const Scenario& s) {
  const auto& tree = s.tree;
  const auto mask = constrained_mask(tree, s.theta0);
  std::vector<std::vector<double>> eq, ineq;
  DeflatorConstraints out;
  for (NodeId id = 0; id < tree.size(); ++id) {
    if (tree.is_leaf(id)) continue;
    for (std::size_t i = 0; i < s.assets(); ++i) eq.push_back(neutrality_row(s, id, i));
    if (mask[id]) {
      ineq.push_back(drop_row(s, id));
      out.inequality_node.push_back(id);
    } else {
      eq.push_back(drop_row(s, id));
    }
  }
  for (NodeId leaf : tree.leaves()) {
    std::vector<double> row(tree.size(), 0.0);
    row[leaf] = 1.0;
    ineq.push_back(std::move(row));
    out.inequality_node.push_back(leaf);
  }
  auto to_matrix = [&](const std::vector<std::vector<double>>& rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(tree.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < tree.size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return m;
  };
  out.equalities = to_matrix(eq);
  out.inequalities = to_matrix(ineq);
  return out;
}

ConeResiduals deflator_residuals(const Scenario& s, const AdaptedProcess& xi) {
  const auto& tree = s.tree;
  const auto mask = constrained_mask(tree, s.theta0);
  ConeResiduals r;
  auto dot = [&](const std::vector<double>& row) {
    double v = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) v += row[k] * xi.at(k);
    return v;
  };
  for (NodeId id = 0; id < tree.size(); ++id) {
    r.nonnegativity = std::max(r.nonnegativity, -xi.at(id));
    if (tree.is_leaf(id)) continue;
    for (std::size_t i = 0; i < s.assets(); ++i) r.neutrality = std::max(r.neutrality, std::abs(dot(neutrality_row(s, id, i))));
    const double drop = dot(drop_row(s, id));
    if (mask[id])
      r.supermartingale = std::max(r.supermartingale, -drop);
    else
      r.martingale = std::max(r.martingale, std::abs(drop));
  }
  return r;
}

bool in_deflator_cone(const Scenario& s, const AdaptedProcess& xi, double tolerance) {
  return deflator_residuals(s, xi).max() <= tolerance;
}

std::variant<Deflator, NoArbitrageViolation> find_martingale_density(const Scenario& s) {
  const auto& tree = s.tree;
  const std::size_t n = tree.size();
  LinearProgram lp;
  for (NodeId id = 0; id < n; ++id) lp.add_variable(0.0, 0.0, 1.0 / tree.probability(id));
  const std::size_t t = lp.add_variable(1.0, 0.0, 1.0);
  std::vector<double> root(n + 1, 0.0);
  root[tree.root()] = 1.0;
  lp.add_row(root, RowType::Equal, 1.0);
  for (NodeId id = 0; id < n; ++id) {
    if (!tree.is_leaf(id)) {
      for (std::size_t i = 0; i < s.assets(); ++i) lp.add_row(neutrality_row(s, id, i), RowType::Equal, 0.0);
      lp.add_row(drop_row(s, id), RowType::Equal, 0.0);
    }
    std::vector<double> floor_row(n + 1, 0.0);
    floor_row[id] = 1.0;
    floor_row[t] = -1.0;
    lp.add_row(std::move(floor_row), RowType::GreaterEqual, 0.0);
  }
  const LpOutcome outcome = solve_lp(lp);
  if (is_optimal(outcome)) {
    const auto& opt = std::get<LpOptimal>(outcome);
    if (opt.value > 1e-12) return Deflator{AdaptedProcess(opt.point.begin(), opt.point.begin() + static_cast<long>(n))};
  }

  NoArbitrageViolation violation;
  violation.best_min_density = is_optimal(outcome) ? std::get<LpOptimal>(outcome).value : 0.0;
  violation.message = "no strictly positive martingale density exists";
  // Arbitrage: gains >= 0 at every leaf with positive expected gain.
  const PlanLayout layout = plan_layout(s);
  const WealthMap w = wealth_map(s, layout, 0.0, zero_series(s));
  const std::size_t nh = layout.trading_nodes.size() * layout.assets;
  const auto h_offset = static_cast<Eigen::Index>(layout.consumption_size());
  if (nh > 0) {
    LinearProgram arb;
    for (std::size_t k = 0; k < nh; ++k) {
      double expected = 0.0;
      for (NodeId leaf : tree.leaves())
        expected += tree.probability(leaf) * w.matrix(static_cast<Eigen::Index>(leaf), h_offset + static_cast<Eigen::Index>(k));
      arb.add_variable(expected, -LinearProgram::kInfinity, LinearProgram::kInfinity);
    }
    for (NodeId leaf : tree.leaves()) {
      std::vector<double> coeffs(nh);
      for (std::size_t k = 0; k < nh; ++k) coeffs[k] = w.matrix(static_cast<Eigen::Index>(leaf), h_offset + static_cast<Eigen::Index>(k));
      arb.add_row(coeffs, RowType::GreaterEqual, 0.0);
      arb.add_row(std::move(coeffs), RowType::LessEqual, 1.0);
    }
    const LpOutcome found = solve_lp(arb);
    if (is_optimal(found) && std::get<LpOptimal>(found).value > 1e-9) {
      Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()));
      const auto& p = std::get<LpOptimal>(found).point;
      for (std::size_t k = 0; k < nh; ++k) z[h_offset + static_cast<Eigen::Index>(k)] = p[k];
      violation.arbitrage = layout.holdings(z, n);
      violation.message = "arbitrage: self-financing strategy with nonnegative terminal gains and expected gain " +
                          std::to_string(std::get<LpOptimal>(found).value);
    }
  }
  return violation;
}

Deflator reference_martingale_density(const Scenario& s) {
  auto result = find_martingale_density(s);
  if (auto* v = std::get_if<NoArbitrageViolation>(&result)) throw DomainError(v->message);
  return std::get<Deflator>(std::move(result));
}

DualPair income_functional(const Scenario& s, const AdaptedProcess& xi) {
  const ClockProfile clock = deterministic_clock(s);
  DualPair pair;
  pair.y = xi.at(s.tree.root());
  pair.r = zero_series(s);
  for (NodeId id = 0; id < s.tree.size(); ++id)
    pair.r[static_cast<std::size_t>(s.tree.time(id))] += s.tree.probability(id) * xi.at(id) * s.income_rate[id] * s.clock[id];
  for (int t = 0; t <= s.horizon(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    pair.r[i] = clock.charges(t) ? pair.r[i] / clock.increments[i] : 0.0;
  }
  return pair;
}

Superreplication superreplicate(const Scenario& s, const TimeSeries& q) {
  LinearProgram lp = cone_slice_lp(s, 1.0);
  for (NodeId id = 0; id < s.tree.size(); ++id)
    lp.objective[id] = -s.tree.probability(id) * q.at(static_cast<std::size_t>(s.tree.time(id))) * s.income_rate[id] * s.clock[id];
  const LpOutcome outcome = solve_lp(lp);
  if (!is_optimal(outcome)) throw NumericalFailure("superreplication LP over the deflator slice has no optimum");
  const auto& opt = std::get<LpOptimal>(outcome);
  return {opt.value, opt.point};
}

double superreplication_price(const Scenario& s, const TimeSeries& q) { return superreplicate(s, q).price; }

KMembership k_membership(const Scenario& s, double x, const TimeSeries& q) {
  const Superreplication sup = superreplicate(s, q);
  KMembership out;
  out.price = sup.price;
  out.member = x >= sup.price - kMembershipTolerance;
  if (out.member) {
    const Admissibility adm = admissibility_check(s, std::max(x, sup.price), q, AdaptedProcess(s.tree.size(), 0.0));
    if (adm.admissible) out.strategy = adm.strategy;
  } else {
    out.separating_deflator = sup.deflator;
  }
  return out;
}

LMembership l_membership(const Scenario& s, double y, const TimeSeries& r) {
  LMembership out;
  const ClockProfile clock = deterministic_clock(s);
  if (y < 0.0) {
    out.separating_x = 1.0;
    out.separating_q = zero_series(s);
    return out;
  }
  if (y == 0.0) {
    bool zero = true;
    for (int t : clock.support) zero = zero && std::abs(r.at(static_cast<std::size_t>(t))) <= kMembershipTolerance;
    if (zero) {
      out.member = true;
      out.deflator = AdaptedProcess(s.tree.size(), 0.0);
      return out;
    }
  } else {
    LinearProgram lp = cone_slice_lp(s, y);
    for (int t : clock.support) {
      std::vector<double> row(s.tree.size(), 0.0);
      for (NodeId id : s.tree.nodes_at(t)) row[id] = s.tree.probability(id) * s.income_rate[id] * s.clock[id];
      const auto ti = static_cast<std::size_t>(t);
      lp.add_row(std::move(row), RowType::Equal, r.at(ti) * clock.increments[ti]);
    }
    const LpOutcome outcome = solve_lp(lp);
    if (is_optimal(outcome)) {
      out.member = true;
      out.deflator = std::get<LpOptimal>(outcome).point;
      return out;
    }
  }
  if (auto sep = separate_from_k(s, y, r)) {
    out.separating_x = sep->first;
    out.separating_q = std::move(sep->second);
  }
  return out;
}

DualMembership dual_membership(const Scenario& s, const AdaptedProcess& Y, double y, const TimeSeries& r) {
  const ClockProfile clock = deterministic_clock(s);
  const PlanLayout layout = plan_layout(s);
  const WealthMap w = wealth_map(s, layout, 0.0, zero_series(s));
  const Eigen::MatrixXd units = income_unit_matrix(s, clock.support);
  const auto constrained = constrained_region(s.tree, s.theta0);
  const std::size_t nq = clock.support.size();
  const std::size_t nz = layout.size();
  const std::size_t nc = layout.consumption_size();

  LinearProgram lp;
  lp.sense = Sense::Maximize;
  lp.add_variable(-y, -1.0, 1.0);
  for (std::size_t k = 0; k < nq; ++k) {
    const auto t = static_cast<std::size_t>(clock.support[k]);
    lp.add_variable(-r.at(t) * clock.increments[t], -1.0, 1.0);
  }
  for (std::size_t k = 0; k < nz; ++k) {
    if (k < nc) {
      const NodeId id = layout.consumption_nodes[k];
      lp.add_variable(s.tree.probability(id) * Y.at(id) * s.clock[id], 0.0, LinearProgram::kInfinity);
    } else {
      lp.add_variable(0.0, -LinearProgram::kInfinity, LinearProgram::kInfinity);
    }
  }
  for (NodeId n : constrained) {
    const auto row = static_cast<Eigen::Index>(n);
    std::vector<double> coeffs(1 + nq + nz, 0.0);
    coeffs[0] = 1.0;
    for (std::size_t k = 0; k < nq; ++k) coeffs[1 + k] = units(row, static_cast<Eigen::Index>(k));
    for (std::size_t k = 0; k < nz; ++k) coeffs[1 + nq + k] = w.matrix(row, static_cast<Eigen::Index>(k));
    lp.add_row(std::move(coeffs), RowType::GreaterEqual, 0.0);
  }
  const LpOutcome outcome = solve_lp(lp);
  DualMembership out;
  if (is_unbounded(outcome)) {
    out.worst_violation = std::numeric_limits<double>::infinity();
    return out;
  }
  if (!is_optimal(outcome)) throw NumericalFailure("dual membership LP infeasible; x = q = c = 0 should be feasible");
  out.worst_violation = std::get<LpOptimal>(outcome).value;
  out.member = out.worst_violation <= kMembershipTolerance;
  return out;
}

}  // namespace lidual
