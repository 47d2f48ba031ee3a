#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lidual/barrier.hpp"
#include "lidual/scenario.hpp"

namespace lidual {

/// Holdings per (node, asset); rows of leaves are unused and stay zero.
using Holdings = Eigen::MatrixXd;

/// Index layout of the decision vector z = (c, H) and the affine wealth map.
struct PlanLayout {
  std::vector<NodeId> consumption_nodes;  // nodes with clock mass
  std::vector<long> consumption_index;    // per node, -1 when it carries no clock
  std::vector<NodeId> trading_nodes;      // non-leaf nodes
  std::vector<long> trading_index;        // per node, first holding index or -1
  std::size_t assets = 0;

  std::size_t consumption_size() const { return consumption_nodes.size(); }
  std::size_t size() const { return consumption_nodes.size() + trading_nodes.size() * assets; }
  Eigen::VectorXd pack(const AdaptedProcess& c, const Holdings& H) const;
  AdaptedProcess consumption(const Eigen::VectorXd& z, std::size_t nodes) const;
  Holdings holdings(const Eigen::VectorXd& z, std::size_t nodes) const;
};

PlanLayout plan_layout(const Scenario& scenario);

/// Wealth at every node, V = base + matrix * z.
struct WealthMap {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd base;
};

WealthMap wealth_map(const Scenario& scenario, const PlanLayout& layout, double x, const TimeSeries& q);

/// V(n) = V(parent) + H(parent) . (S(n) - S(parent)) + (q e - c) clock, V(root) = x.
AdaptedProcess wealth_process(const Scenario& scenario, double x, const TimeSeries& q, const Holdings& H,
                              const AdaptedProcess& c);

struct PrimalPlan {
  AdaptedProcess consumption;  // zero where the clock does not charge
  Holdings holdings;
  AdaptedProcess wealth;
  double value = 0.0;
  AdaptedProcess multipliers;  // KKT multipliers of V(n) >= 0, zero off the constrained region
  double gap = 0.0;
  int newton_steps = 0;
  bool boundary_quality = false;
};

struct PrimalOptions {
  BarrierOptions barrier = {.gap_tolerance = 1e-10};
  /// (x, q) with x - pi(q) below this margin go through the boundary homotopy.
  double interior_margin = 1e-7;
  /// Smallest excess over pi(q) (relative to 1 + |pi|) reached by the boundary homotopy.
  double boundary_floor = 1e-13;
  double holdings_regularization = 1e-10;
};

/// Maximises sum_n P(n) U(n, c(n)) clock(n) over admissible (c, H).
/// Throws InfeasibleProblem when (x, q) is outside K, DegenerateValue when
/// every admissible plan has -infinity utility.
PrimalPlan solve_primal(const Scenario& scenario, double x, const TimeSeries& q, const PrimalOptions& options = {});

/// Utility of a consumption plan, -infinity allowed.
double primal_objective(const Scenario& scenario, const AdaptedProcess& c);

struct Admissibility {
  bool admissible = false;
  std::optional<Holdings> strategy;
  std::optional<NodeId> violated_node;
  AdaptedProcess wealth;  // wealth of the witness strategy when admissible
};

/// Searches a financing strategy for c; when none exists, reports the first
/// node (in node order) at which the constraints up to it become infeasible.
Admissibility admissibility_check(const Scenario& scenario, double x, const TimeSeries& q, const AdaptedProcess& c);

/// Feasibility only: some H keeps V >= -1e-9 on the constrained region.
bool financeable(const Scenario& scenario, double x, const TimeSeries& q, const AdaptedProcess& c);

}  // namespace lidual
