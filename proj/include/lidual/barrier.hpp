#pragma once

#include <Eigen/Dense>
#include <functional>

namespace lidual {

/// Smooth convex objective with a diagonal Hessian. `value` returns +inf
/// outside its domain.
struct SeparableObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd& gradient, Eigen::VectorXd& hessian_diagonal)> derivatives;
};

/// minimize f(z) subject to G z + h >= 0 and A z = b, from a start that
/// satisfies the equalities and the inequalities strictly.
struct BarrierProblem {
  SeparableObjective objective;
  Eigen::MatrixXd inequality;        // G
  Eigen::VectorXd inequality_offset; // h
  Eigen::MatrixXd equality;          // A (may have zero rows)
  /// Added to the Newton matrix diagonal.
  Eigen::VectorXd regularization;
};

struct BarrierOptions {
  /// Stop once (number of inequalities) * mu <= gap_tolerance * (1 + |f|).
  double gap_tolerance = 1e-9;
  int max_newton_steps = 200;
  double mu_reduction = 10.0;
  double armijo = 0.01;
  double initial_mu = 0.0;  // <= 0: chosen from the starting objective
};

struct BarrierResult {
  Eigen::VectorXd point;
  /// Estimated multipliers mu / s_i of the inequality rows.
  Eigen::VectorXd multipliers;
  Eigen::VectorXd slacks;
  double objective = 0.0;
  double gap = 0.0;
  double mu = 0.0;
  int newton_steps = 0;
};

/// Log-barrier path following with Newton steps, mu divided by
/// `mu_reduction` after each centring, fraction-to-boundary plus Armijo
/// backtracking. Throws NumericalFailure on a bad start or when the Newton
/// budget runs out.
BarrierResult minimize_with_barrier(const BarrierProblem& problem, Eigen::VectorXd start,
                                    const BarrierOptions& options = {});

}  // namespace lidual
