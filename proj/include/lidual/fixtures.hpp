#pragma once

#include <string>
#include <vector>

#include "lidual/scenario.hpp"

namespace lidual {

/// One-period binomial: S = 1 -> {2, 0.5} with p = 1/2, clock 1 at both
/// leaves, no income, constraint from the root, A = 1, log utility, x = 1.
Scenario fix_bin1();

/// FIX-BIN1 with S_d = 1.5 (buy-and-hold arbitrage).
Scenario fix_bin1_arbitrage();

/// FIX-BIN1 with e(u) = 1, e(d) = 0, q = 1 and the constraint at the leaves.
Scenario fix_bin1_income();

/// Deterministic path t0 -> t1 -> t2, no assets, clock 1 at t1 and t2,
/// e = (0, 1), constraint from the root, A = 2, U = 2 sqrt(x), x = 0.1, q = 1.
Scenario fix_det2();

/// FIX-DET2 with the constraint at the leaf only.
Scenario fix_det2_terminal();

/// One-period trinomial S = 1 -> {2, 1, 0.5}, p = 1/3, clock at the leaves,
/// e = (1, 0.5, 0), log utility, x = 1, q = 0.5, constraint from the root.
Scenario fix_trinomial();

/// Two-period binomial, clock only at t = 2, income at t = 1 and 2 nodes,
/// power utility R = 2, and a mixed stopping region {u, dd, du}.
Scenario fix_bin2();

struct NamedScenario {
  std::string name;
  Scenario scenario;
};

/// Every shipped fixture free of arbitrage.
std::vector<NamedScenario> standard_fixtures();

/// Looks a fixture up by name ("FIX-BIN1", "FIX-DET2", ...); throws DomainError.
Scenario fixture_by_name(const std::string& name);

}  // namespace lidual
