#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lidual/primal.hpp"
#include "lidual/scenario.hpp"

namespace lidual {

/// Nonnegative process xi = y Z D in the polyhedral deflator cone.
struct Deflator {
  AdaptedProcess values;
};

/// (y, r): initial value of a deflator and its income functional.
struct DualPair {
  double y = 0.0;
  TimeSeries r;
};

/// Linear description of the cone over xi in R^{nodes}:
/// equalities * xi = 0 and inequalities * xi >= 0.
struct DeflatorConstraints {
  Eigen::MatrixXd equalities;
  Eigen::MatrixXd inequalities;
  /// Node attached to each inequality row: the drop origin for
  /// supermartingale rows, the leaf itself for leaf nonnegativity rows.
  std::vector<NodeId> inequality_node;
};

/// Rows: neutrality for each (non-leaf node, asset), martingale equality at
/// non-leaf nodes outside the constrained region; supermartingale slack at
/// constrained non-leaf nodes and xi >= 0 at leaves.
DeflatorConstraints deflator_constraints(const Scenario& scenario);

struct ConeResiduals {
  double nonnegativity = 0.0;
  double neutrality = 0.0;
  double supermartingale = 0.0;
  double martingale = 0.0;
  double max() const;
};

ConeResiduals deflator_residuals(const Scenario& scenario, const AdaptedProcess& xi);
bool in_deflator_cone(const Scenario& scenario, const AdaptedProcess& xi, double tolerance = 1e-9);

struct NoArbitrageViolation {
  double best_min_density = 0.0;
  /// Self-financing strategy with nonnegative gains and positive expected gain.
  std::optional<Holdings> arbitrage;
  std::string message;
};

/// Strictly positive martingale density (xi(root) = 1, martingale equality
/// everywhere) maximising its smallest node value.
std::variant<Deflator, NoArbitrageViolation> find_martingale_density(const Scenario& scenario);

/// Like find_martingale_density but throws DomainError on arbitrage.
Deflator reference_martingale_density(const Scenario& scenario);

/// y = xi(root), r_t = sum_{t(n)=t} P xi e clock / dK_t on the clock support.
DualPair income_functional(const Scenario& scenario, const AdaptedProcess& xi);

struct Superreplication {
  double price = 0.0;
  AdaptedProcess deflator;  // maximiser with xi(root) = 1
};

/// pi(q) = max over xi in the cone with xi(root) = 1 of -E[sum xi q e clock].
Superreplication superreplicate(const Scenario& scenario, const TimeSeries& q);
double superreplication_price(const Scenario& scenario, const TimeSeries& q);

struct KMembership {
  bool member = false;
  double price = 0.0;
  std::optional<Holdings> strategy;               // superreplicating H when a member
  std::optional<AdaptedProcess> separating_deflator;  // maximising xi otherwise
};

KMembership k_membership(const Scenario& scenario, double x, const TimeSeries& q);

struct LMembership {
  bool member = false;
  std::optional<AdaptedProcess> deflator;  // xi with xi(root) = y and r^xi = r
  /// (x, q) in K with x y + <q, r> < 0, from the box |x|, |q_t| <= 1.
  std::optional<double> separating_x;
  std::optional<TimeSeries> separating_q;
};

LMembership l_membership(const Scenario& scenario, double y, const TimeSeries& r);

struct DualMembership {
  bool member = false;
  /// Optimum of E[sum c Y clock] - x y - <q, r> over the normalised slice.
  double worst_violation = 0.0;
};

/// Pairing test against every (x, q) in K with |x|, |q_t| <= 1 and every c
/// admissible for it; member iff the optimum is <= 1e-9.
DualMembership dual_membership(const Scenario& scenario, const AdaptedProcess& Y, double y, const TimeSeries& r);

}  // namespace lidual
