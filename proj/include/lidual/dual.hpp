#pragma once

#include <vector>

#include "lidual/barrier.hpp"
#include "lidual/cones.hpp"
#include "lidual/primal.hpp"
#include "lidual/scenario.hpp"

namespace lidual {

/// xi = y Z D with Z a martingale density and D nonincreasing, D = 1 up to
/// and including the stop nodes.
struct Decomposition {
  double y = 0.0;
  AdaptedProcess density;     // Z
  AdaptedProcess decreasing;  // D
  /// Nodes where D hit zero and Z was continued with the reference density.
  std::vector<NodeId> reference_nodes;
};

struct DualSolution {
  Deflator deflator;
  double value = 0.0;  // composite objective Phi
  DualPair pair;
  Decomposition decomposition;
  double gap = 0.0;
  int newton_steps = 0;
};

struct DualOptions {
  BarrierOptions barrier;
  double interior_margin = 1e-7;
  /// Multiplicative drop per constrained edge of the starting point.
  double start_drop = 0.5;
  double start_scale = 1.0;
};

/// Minimises sum P V(xi) clock + x xi(root) + <q, r^xi> over the deflator cone.
/// Throws InfeasibleProblem unless x exceeds pi(q) by the interior margin.
DualSolution solve_composite_dual(const Scenario& scenario, double x, const TimeSeries& q,
                                  const DualOptions& options = {});

/// Composite objective at an arbitrary deflator (+infinity off the domain of V).
double composite_dual_objective(const Scenario& scenario, double x, const TimeSeries& q, const AdaptedProcess& xi);

/// sum_n P(n) V(n, xi(n)) clock(n).
double dual_objective(const Scenario& scenario, const AdaptedProcess& xi);

struct DualAtResult {
  Deflator deflator;
  double value = 0.0;
};

/// Minimises sum P V(xi) clock over the slice xi(root) = y, r^xi = r.
/// Upper bound for v(y, r); exact at pairs produced by the composite dual.
/// DomainError when the slice pins V at 0 (y = 0 included),
/// InfeasibleProblem when the slice is empty.
DualAtResult solve_dual_at(const Scenario& scenario, double y, const TimeSeries& r, const DualOptions& options = {});

/// y = xi(root); Z and D by the ratio recursion along the tree.
Decomposition multiplicative_decomposition(const Scenario& scenario, const AdaptedProcess& xi);

/// U'(c) on clock nodes, filled backwards through zero-clock nodes with the
/// primal multipliers. Throws ExtensionFailure if the result leaves the cone
/// by more than `tolerance`.
Deflator extend_deflator(const Scenario& scenario, const PrimalPlan& plan, double tolerance = 1e-7);

}  // namespace lidual
