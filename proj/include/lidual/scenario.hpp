#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lidual/tree.hpp"
#include "lidual/utility.hpp"

namespace lidual {

/// Deterministic function of time, indexed t = 0..N. Used for the income
/// profile q and for income functionals r. Entry 0 is never read.
using TimeSeries = std::vector<double>;

/// Market, clock, income and constraint data on an event tree.
struct Scenario {
  std::string name;
  EventTree tree;
  Eigen::MatrixXd prices;     // one row per node, one column per asset
  AdaptedProcess income_rate; // e(n)
  AdaptedProcess clock;       // clock increment at n; zero at the root
  StoppingRegion theta0;
  double clock_bound = 1.0;   // A
  TimeSeries income_units;    // default q
  double initial_wealth = 1.0;
  UtilityField utility;

  std::size_t assets() const { return static_cast<std::size_t>(prices.cols()); }
  int horizon() const { return tree.horizon(); }
};

struct ClockProfile {
  TimeSeries increments;  // sum over nodes at t of P(n) * clock(n)
  std::vector<int> support;
  double total = 0.0;
  bool charges(int t) const { return increments.at(static_cast<std::size_t>(t)) > 0.0; }
};

struct ValidationCheck {
  std::string name;
  bool passed = true;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  double density_min = 0.0;
  double density_max = 0.0;
  bool ok() const;
  std::string failures() const;
};

/// Evaluates every structural condition; never throws for semantic violations.
ValidationReport validate(const Scenario& scenario);

/// Throws MalformedScenario listing the failed checks.
void require_valid(const Scenario& scenario);

ClockProfile deterministic_clock(const Scenario& scenario);

/// sum_t q_t r_t dK_t over the clock support.
double dk_pairing(const TimeSeries& q, const TimeSeries& r, const ClockProfile& clock);

/// Zero-filled series of length N + 1.
TimeSeries zero_series(const Scenario& scenario);
TimeSeries constant_series(const Scenario& scenario, double value);

/// Copy of `scenario` with a different stopping region.
Scenario with_theta0(const Scenario& scenario, StoppingRegion theta0);

/// Cumulative labor income sum_{k <= n} q_t(k) e(k) clock(k) at every node.
AdaptedProcess cumulative_income(const Scenario& scenario, const TimeSeries& q);

}  // namespace lidual
