#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "lidual/scenario.hpp"

namespace lidual {

struct GridSpec {
  /// Points per axis; 0 picks the largest value keeping one round under max_points (capped at 101).
  std::size_t resolution = 0;
  int refinement_rounds = 2;
  /// Optional per-variable [lo, hi] in consumption-node order; default [0, c_max] from an LP.
  std::vector<std::pair<double, double>> ranges;
  /// Half-width of the refined window, in units of the previous round's widest spacing.
  double window = 2.0;
  std::size_t max_points = 10'000'000;
  std::size_t max_variables = 4;
};

struct OracleResult {
  double value = 0.0;
  AdaptedProcess consumption;
  std::size_t points = 0;          // grid points scored
  std::size_t feasibility_lps = 0; // admissibility checks performed
};

/// Exhaustive grid over consumption with an LP financing check per point.
/// Throws GridGuard when a round would exceed max_points, DomainError when
/// the scenario has more than max_variables consumption nodes.
OracleResult brute_force_primal(const Scenario& scenario, double x, const TimeSeries& q, const GridSpec& spec = {});

/// Largest admissible consumption at each clock node, all others free.
std::vector<double> consumption_bounds(const Scenario& scenario, double x, const TimeSeries& q);

/// (f(x + h) - f(x - h)) / 2h.
double finite_difference(const std::function<double(double)>& f, double x, double h);

/// (f(x + h_plus) - f(x - h_minus)) / (h_plus + h_minus); first order when the steps differ.
double finite_difference(const std::function<double(double)>& f, double x, double h_plus, double h_minus);

}  // namespace lidual
