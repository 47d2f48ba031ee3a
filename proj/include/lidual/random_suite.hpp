#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lidual/scenario.hpp"
#include "lidual/verify.hpp"

namespace lidual {

struct RandomScenarioOptions {
  int max_depth = 4;
  int max_branching = 3;
  int max_assets = 2;
  /// Trees above this size are redrawn.
  std::size_t max_nodes = 48;
  double stop_probability = 0.4;
  double clock_date_probability = 0.7;
};

/// Arbitrage-free by construction: returns are drawn around a random
/// risk-neutral branch distribution shared by all assets at each node.
/// `family` selects log (0) or power (1) utility.
Scenario random_scenario(std::mt19937_64& rng, const RandomScenarioOptions& options, int family, std::string name);

struct SuiteCase {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Scenario scenario;
  double x = 0.0;
  TimeSeries q;
};

/// Deterministic in (seed, count); utility families alternate log / power.
std::vector<SuiteCase> random_cases(std::uint64_t seed, std::size_t count, const RandomScenarioOptions& options = {});

struct SuiteEntry {
  std::size_t index = 0;
  std::string name;
  std::uint64_t seed = 0;
  std::size_t nodes = 0;
  std::size_t assets = 0;
  std::string utility;
  double x = 0.0;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  double budget_residual = 0.0;
  double first_order_residual = 0.0;
  bool slackness_passed = false;
  std::size_t drop_edges = 0;
  double worst_inequality_excess = 0.0;
  double max_derivative_error = 0.0;
  bool passed = false;
  std::string error;
  /// Exit-code class of `error`: 2 input, 3 numerical, 1 otherwise.
  int error_class = 0;
};

struct SuiteSummary {
  std::uint64_t seed = 0;
  std::vector<SuiteEntry> entries;
  std::size_t passed_count() const;
  bool passed() const { return passed_count() == entries.size(); }
};

SuiteSummary run_suite(std::uint64_t seed, const std::vector<SuiteCase>& cases, const VerifyOptions& options = {});

}  // namespace lidual
