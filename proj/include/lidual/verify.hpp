#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lidual/dual.hpp"
#include "lidual/primal.hpp"
#include "lidual/scenario.hpp"

namespace lidual {

struct SolveOptions {
  PrimalOptions primal;
  DualOptions dual;
};

/// Primal and composite dual at the same (x, q).
struct SolvedPair {
  PrimalPlan primal;
  DualSolution dual;
  double gap = 0.0;  // |u - Phi| / (1 + |u|)
};

SolvedPair solve_pair(const Scenario& scenario, double x, const TimeSeries& q, const SolveOptions& options = {});

/// |u(x,q) - Phi(xi_hat)| / (1 + |u(x,q)|).
double duality_gap(const Scenario& scenario, double x, const TimeSeries& q, const SolveOptions& options = {});

struct SubgradientReport {
  bool v_finite = false;
  double v_value = 0.0;
  double budget_lhs = 0.0;  // E[sum Y c dkappa]
  double budget_rhs = 0.0;  // x y + <q, r>
  double budget_residual = 0.0;
  double first_order_residual = 0.0;
  std::optional<NodeId> worst_node;
  double tolerance = 1e-6;
  bool passed = false;
};

/// Conditions at the computed pair: v finite, budget equality, Y = U'(c) on
/// the clock support. The pair (y, r) is induced by the deflator.
SubgradientReport subgradient_check(const Scenario& scenario, double x, const TimeSeries& q, const PrimalPlan& plan,
                                    const DualSolution& dual, double tolerance = 1e-6);
SubgradientReport subgradient_check(const Scenario& scenario, double x, const TimeSeries& q, const PrimalPlan& plan,
                                    const AdaptedProcess& deflator, double tolerance = 1e-6);

struct DatePrice {
  int time = 0;
  double finite_difference = 0.0;
  double predicted = 0.0;  // r_t dK_t
  double error = 0.0;
};

struct PriceCheckOptions {
  double step = 1e-4;
  double derivative_tolerance = 1e-4;
  int directions = 100;
  std::uint64_t seed = 1;
  double inequality_tolerance = 1e-7;
  /// Random directions are drawn with |x' - x|, |q'_t - q_t| up to this size.
  double radius = 0.5;
};

struct PriceCheck {
  double wealth_finite_difference = 0.0;
  double wealth_error = 0.0;
  std::vector<DatePrice> dates;
  double max_derivative_error = 0.0;
  int directions = 0;
  double worst_inequality_excess = 0.0;  // max of u(x',q') - [u + y dx + <dq, r>]
  bool derivatives_passed = false;
  bool inequality_passed = false;
};

/// Central differences of u against (y, r dK) and the subgradient inequality
/// on random admissible points. StepTooLarge when x +- h or q +- h e_t leaves
/// the interior of K.
PriceCheck marginal_price_check(const Scenario& scenario, double x, const TimeSeries& q, double y,
                                const TimeSeries& r, const PriceCheckOptions& options = {},
                                const SolveOptions& solve = {});

struct DropEdge {
  NodeId node = 0;
  double relative_drop = 0.0;
  double wealth = 0.0;
  bool constrained = false;
};

struct SlacknessCertificate {
  std::vector<DropEdge> drops;
  double max_wealth_at_drops = 0.0;
  double max_complementarity = 0.0;  // max lambda(n) V(n)
  std::vector<NodeId> offending;
  double epsilon = 1e-5;
  bool passed = false;
};

/// Every edge where D drops by more than epsilon (relative) must leave a
/// constrained node with V <= epsilon; lambda V <= epsilon everywhere.
SlacknessCertificate slackness_report(const Scenario& scenario, const PrimalPlan& plan, const DualSolution& dual,
                                      double epsilon = 1e-5);
SlacknessCertificate slackness_report(const Scenario& scenario, const PrimalPlan& plan,
                                      const Decomposition& decomposition, double epsilon);

struct VerifyOptions {
  SolveOptions solve;
  double gap_tolerance = 1e-6;
  double residual_tolerance = 1e-6;
  double slackness_epsilon = 1e-5;
  bool marginal_prices = true;
  PriceCheckOptions prices;
};

struct DualityReport {
  double x = 0.0;
  TimeSeries q;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  double gap_tolerance = 1e-6;
  bool gap_passed = false;
  PrimalPlan plan;
  DualSolution dual;
  SubgradientReport subgradient;
  SlacknessCertificate slackness;
  std::optional<PriceCheck> prices;
  std::string price_skip_reason;

  bool passed() const;
};

DualityReport verify(const Scenario& scenario, double x, const TimeSeries& q, const VerifyOptions& options = {});

}  // namespace lidual
