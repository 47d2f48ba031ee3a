#include "lidual/utility.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lidual/errors.hpp"

namespace lidual {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_weights(const std::vector<double>& weights) {
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("utility weights must be finite and positive");
}

void require_nonnegative(double x) {
  if (!(x >= 0.0)) throw DomainError("utility evaluated at negative consumption " + std::to_string(x));
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw DomainError(std::string(what) + " requires a positive argument, got " + std::to_string(v));
}

}  // namespace

UtilityField UtilityField::log_utility(std::vector<double> weights) {
  check_weights(weights);
  UtilityField f;
  f.family_ = UtilityFamily::Log;
  f.risk_aversion_ = 1.0;
  f.weights_ = std::move(weights);
  return f;
}

UtilityField UtilityField::power_utility(double relative_risk_aversion, std::vector<double> weights) {
  if (!(relative_risk_aversion > 0.0) || relative_risk_aversion == 1.0 || !std::isfinite(relative_risk_aversion))
    throw DomainError("power utility needs R > 0 and R != 1");
  check_weights(weights);
  UtilityField f;
  f.family_ = UtilityFamily::Power;
  f.risk_aversion_ = relative_risk_aversion;
  f.weights_ = std::move(weights);
  return f;
}

bool UtilityField::minus_infinity_at_zero() const {
  return family_ == UtilityFamily::Log || risk_aversion_ > 1.0;
}

double UtilityField::value(NodeId node, double x) const {
  require_nonnegative(x);
  const double w = weight(node);
  if (family_ == UtilityFamily::Log) return x == 0.0 ? -kInf : w * std::log(x);
  const double R = risk_aversion_;
  if (x == 0.0) return R > 1.0 ? -kInf : 0.0;
  return w * std::pow(x, 1.0 - R) / (1.0 - R);
}

double UtilityField::marginal(NodeId node, double x) const {
  require_positive(x, "marginal utility");
  const double w = weight(node);
  if (family_ == UtilityFamily::Log) return w / x;
  return w * std::pow(x, -risk_aversion_);
}

double UtilityField::marginal_derivative(NodeId node, double x) const {
  require_positive(x, "marginal utility derivative");
  const double w = weight(node);
  if (family_ == UtilityFamily::Log) return -w / (x * x);
  return -w * risk_aversion_ * std::pow(x, -risk_aversion_ - 1.0);
}

double UtilityField::inverse_marginal(NodeId node, double y) const {
  require_positive(y, "inverse marginal utility");
  const double w = weight(node);
  if (family_ == UtilityFamily::Log) return w / y;
  return std::pow(y / w, -1.0 / risk_aversion_);
}

double UtilityField::conjugate(NodeId node, double y) const {
  require_positive(y, "conjugate utility");
  const double w = weight(node);
  if (family_ == UtilityFamily::Log) return w * (-std::log(y / w) - 1.0);
  const double R = risk_aversion_;
  return w * (R / (1.0 - R)) * std::pow(y / w, (R - 1.0) / R);
}

double UtilityField::conjugate_derivative(NodeId node, double y) const {
  return -inverse_marginal(node, y);
}

double UtilityField::conjugate_second_derivative(NodeId node, double y) const {
  require_positive(y, "conjugate curvature");
  const double w = weight(node);
  if (family_ == UtilityFamily::Log) return w / (y * y);
  const double R = risk_aversion_;
  return (1.0 / (w * R)) * std::pow(y / w, -1.0 / R - 1.0);
}

}  // namespace lidual
