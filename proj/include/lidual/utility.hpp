#pragma once

#include <cstddef>
#include <vector>

#include "lidual/tree.hpp"

namespace lidual {

enum class UtilityFamily { Log, Power };

/// Node-weighted utility field U(n, x) = w(n) * u(x), with u = log or
/// u(x) = x^(1-R) / (1-R). Weights default to 1 when the table is empty.
class UtilityField {
 public:
  UtilityField() = default;
  static UtilityField log_utility(std::vector<double> weights = {});
  /// Throws DomainError unless R > 0 and R != 1.
  static UtilityField power_utility(double relative_risk_aversion, std::vector<double> weights = {});

  UtilityFamily family() const { return family_; }
  double risk_aversion() const { return risk_aversion_; }
  const std::vector<double>& weights() const { return weights_; }
  double weight(NodeId node) const { return weights_.empty() ? 1.0 : weights_.at(node); }

  /// U(n, x); -infinity at x = 0 when log or R > 1. DomainError for x < 0.
  double value(NodeId node, double x) const;
  double marginal(NodeId node, double x) const;
  double marginal_derivative(NodeId node, double x) const;
  double inverse_marginal(NodeId node, double y) const;

  /// V(n, y) = sup_{x>0} (U(n, x) - x y). DomainError for y <= 0.
  double conjugate(NodeId node, double y) const;
  /// dV/dy = -I(y).
  double conjugate_derivative(NodeId node, double y) const;
  double conjugate_second_derivative(NodeId node, double y) const;

  /// True when U(n, 0) = -infinity.
  bool minus_infinity_at_zero() const;

 private:
  UtilityFamily family_ = UtilityFamily::Log;
  double risk_aversion_ = 1.0;
  std::vector<double> weights_;
};

}  // namespace lidual
