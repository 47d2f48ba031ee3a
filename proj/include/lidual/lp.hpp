#pragma once

#include <cstddef>
#include <limits>
#include <variant>
#include <vector>

namespace lidual {

enum class RowType { LessEqual, Equal, GreaterEqual };
enum class Sense { Maximize, Minimize };

struct LinearConstraint {
  std::vector<double> coefficients;  // dense; entries past the end are zero
  RowType type = RowType::LessEqual;
  double rhs = 0.0;
};

/// Dense linear program with per-variable bounds (default [0, +inf)).
struct LinearProgram {
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  Sense sense = Sense::Maximize;
  std::vector<double> objective;
  std::vector<LinearConstraint> rows;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t variables() const { return objective.size(); }
  /// Appends a variable and returns its index.
  std::size_t add_variable(double cost, double lo = 0.0, double up = kInfinity);
  void add_row(std::vector<double> coefficients, RowType type, double rhs);
};

struct LpOptimal {
  std::vector<double> point;
  double value = 0.0;
  /// d(value)/d(rhs) per row.
  std::vector<double> duals;
};

/// Farkas multipliers on the rows, followed by one entry per finite upper
/// bound. For problems with default bounds: y_i <= 0 on <= rows, y_i >= 0
/// on >= rows, y^T A <= 0 componentwise and y^T b > 0.
struct LpInfeasible {
  std::vector<double> certificate;
};

/// Feasible direction along which the objective improves without bound.
struct LpUnbounded {
  std::vector<double> ray;
};

using LpOutcome = std::variant<LpOptimal, LpInfeasible, LpUnbounded>;

enum class PivotRule {
  Bland,
  /// Largest reduced cost, falling back to Bland after a run of degenerate pivots.
  DantzigWithBlandFallback,
};

struct LpOptions {
  double tolerance = 1e-9;
  std::size_t max_pivots = 200000;
  PivotRule rule = PivotRule::Bland;
};

/// Two-phase dense tableau simplex on row-scaled data. Throws
/// NumericalFailure when the pivot cap is exceeded.
LpOutcome solve_lp(const LinearProgram& lp, const LpOptions& options = {});

inline bool is_optimal(const LpOutcome& o) { return std::holds_alternative<LpOptimal>(o); }
inline bool is_infeasible(const LpOutcome& o) { return std::holds_alternative<LpInfeasible>(o); }
inline bool is_unbounded(const LpOutcome& o) { return std::holds_alternative<LpUnbounded>(o); }

}  // namespace lidual
