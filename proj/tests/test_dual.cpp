#include <doctest.h>

#include <cmath>
#include <random>

#include "lidual/cones.hpp"
#include "lidual/dual.hpp"
#include "lidual/errors.hpp"
#include "lidual/fixtures.hpp"
#include "lidual/random_suite.hpp"
#include "oracles.hpp"

using namespace lidual;

namespace {

const double kSqrt10 = std::sqrt(10.0);

}  // namespace

TEST_CASE("composite dual on the binomial") {
  const Scenario s = fix_bin1();
  const DualSolution d = solve_composite_dual(s, 1.0, zero_series(s));
  CHECK(d.deflator.values[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(d.deflator.values[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
  CHECK(d.deflator.values[2] == doctest::Approx(4.0 / 3.0).epsilon(1e-7));
  CHECK(d.pair.y == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(d.pair.r.at(1) == 0.0);
  // V(y) = -log y - 1.
  const double closed = 0.5 * (-std::log(2.0 / 3.0) - 1.0) + 0.5 * (-std::log(4.0 / 3.0) - 1.0) + 1.0;
  CHECK(d.value == doctest::Approx(closed).epsilon(1e-9));
  for (double dv : d.decomposition.decreasing) CHECK(dv == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("composite dual on the deterministic path") {
  const Scenario s = fix_det2();
  const DualSolution d = solve_composite_dual(s, 0.1, constant_series(s, 1.0));
  CHECK(d.deflator.values[0] == doctest::Approx(kSqrt10).epsilon(1e-7));
  CHECK(d.deflator.values[1] == doctest::Approx(kSqrt10).epsilon(1e-7));
  CHECK(d.deflator.values[2] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(d.pair.r.at(1) == doctest::Approx(0.0));
  CHECK(d.pair.r.at(2) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(d.value == doctest::Approx(2.0 * std::sqrt(0.1) + 2.0).epsilon(1e-9));
  const Decomposition& dec = d.decomposition;
  CHECK(dec.decreasing[0] == doctest::Approx(1.0));
  CHECK(dec.decreasing[1] == doctest::Approx(1.0));
  CHECK(dec.decreasing[2] == doctest::Approx(1.0 / kSqrt10).epsilon(1e-7));
  for (double z : dec.density) CHECK(z == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("log utility without income: y = E[kappa_T] / x") {
  int checked = 0;
  for (const SuiteCase& c : random_cases(19, 20)) {
    const Scenario& s = c.scenario;
    if (s.utility.family() != UtilityFamily::Log) continue;
    AdaptedProcess w(s.tree.size());
    for (NodeId k = 0; k < s.tree.size(); ++k) w[k] = s.utility.weight(k);
    const double mass = expectation(s.tree, w, s.clock);
    const double x = 0.7;
    const DualSolution d = solve_composite_dual(s, x, zero_series(s));
    CHECK(d.pair.y == doctest::Approx(mass / x).epsilon(1e-7));
    if (s.utility.weights().empty()) CHECK(d.pair.y == doctest::Approx(deterministic_clock(s).total / x).epsilon(1e-7));
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("dual value at fixed pairs") {
  const Scenario bin = fix_bin1();
  const DualAtResult a = solve_dual_at(bin, 1.0, zero_series(bin));
  CHECK(a.value == doctest::Approx(0.5 * std::log(9.0 / 8.0) - 1.0).epsilon(1e-8));
  CHECK(a.deflator.values[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-7));

  const Scenario det = fix_det2();
  const DualAtResult b = solve_dual_at(det, kSqrt10, {0.0, 0.0, 1.0});
  CHECK(b.value == doctest::Approx(1.0 / kSqrt10 + 1.0).epsilon(1e-8));

  CHECK_THROWS_AS(solve_dual_at(det, 0.0, zero_series(det)), DomainError);
  CHECK_THROWS_AS(solve_dual_at(det, 1.0, {0.0, 0.0, 2.0}), InfeasibleProblem);
}

TEST_CASE("multiplicative decomposition examples") {
  const Scenario bin = fix_bin1();
  const Decomposition a = multiplicative_decomposition(bin, {2.0, 4.0 / 3.0, 8.0 / 3.0});
  CHECK(a.y == 2.0);
  for (double dv : a.decreasing) CHECK(dv == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.density[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  const Scenario det = fix_det2();
  const Decomposition b = multiplicative_decomposition(det, {kSqrt10, kSqrt10, 1.0});
  CHECK(b.decreasing[2] == doctest::Approx(0.316228).epsilon(1e-6));
  CHECK(b.density[2] == doctest::Approx(1.0));

  const Decomposition c = multiplicative_decomposition(bin, {1.0, 0.0, 0.0});
  CHECK(c.decreasing[1] == 0.0);
  CHECK(c.decreasing[2] == 0.0);
  CHECK(c.density[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(c.density[2] == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK_FALSE(c.reference_nodes.empty());
}

TEST_CASE("deflator extension from primal multipliers") {
  const Scenario bin = fix_bin1();
  const Deflator a = extend_deflator(bin, solve_primal(bin, 1.0, zero_series(bin)));
  CHECK(a.values[0] == doctest::Approx(1.0).epsilon(1e-7));
  const Scenario det = fix_det2();
  const Deflator b = extend_deflator(det, solve_primal(det, 0.1, constant_series(det, 1.0)));
  CHECK(b.values[0] == doctest::Approx(kSqrt10).epsilon(1e-7));
  const Scenario tri = fix_trinomial();
  const PrimalPlan p = solve_primal(tri, 1.0, constant_series(tri, 0.5));
  const Deflator c = extend_deflator(tri, p);
  for (NodeId k = 1; k < tri.tree.size(); ++k) CHECK(c.values[k] == doctest::Approx(1.0 / p.consumption[k]).epsilon(1e-12));
}

TEST_CASE("random suite: biconjugacy, decomposition, membership, uniqueness") {
  for (const SuiteCase& c : random_cases(7, 12)) {
    const Scenario& s = c.scenario;
    INFO(s.name);
    const PrimalPlan p = solve_primal(s, c.x, c.q);
    const DualSolution d = solve_composite_dual(s, c.x, c.q);
    CHECK(std::abs(p.value - d.value) <= 1e-6 * (1.0 + std::abs(p.value)));
    CHECK(in_deflator_cone(s, d.deflator.values, 1e-9));

    const Decomposition& dec = d.decomposition;
    CHECK(deflator_residuals(with_theta0(s, terminal_region(s.tree)), dec.density).max() < 1e-9);
    CHECK(dec.density[0] == doctest::Approx(1.0));
    const auto mask = constrained_mask(s.tree, s.theta0);
    for (NodeId k = 0; k < s.tree.size(); ++k) {
      CHECK(dec.decreasing[k] >= 0.0);
      CHECK(dec.decreasing[k] <= 1.0 + 1e-12);
      const auto parent = s.tree.node(k).parent;
      if (parent) {
        CHECK(dec.decreasing[k] <= dec.decreasing[*parent] + 1e-12);
        if (!mask[*parent]) CHECK(dec.decreasing[k] == doctest::Approx(1.0));
      }
      if (dec.decreasing[k] > 0.0)
        CHECK(std::abs(d.deflator.values[k] - dec.y * dec.density[k] * dec.decreasing[k]) <=
              1e-9 * (1.0 + d.deflator.values[k]));
    }
    CHECK(dual_membership(s, d.deflator.values, d.pair.y, d.pair.r).member);

    DualOptions other;
    other.start_drop = 0.8;
    other.start_scale = 2.5;
    const DualSolution e = solve_composite_dual(s, c.x, c.q, other);
    for (NodeId k = 0; k < s.tree.size(); ++k)
      if (s.clock[k] > 0.0) CHECK(e.deflator.values[k] == doctest::Approx(d.deflator.values[k]).epsilon(1e-7));
  }
}

TEST_CASE("weak duality against random deflators") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> w(0.05, 1.0), y(0.2, 4.0);
  for (const NamedScenario& f : standard_fixtures()) {
    const Scenario& s = f.scenario;
    const double x = s.initial_wealth;
    const TimeSeries& q = s.income_units;
    const double u = solve_primal(s, x, q).value;
    const std::vector<Eigen::VectorXd> vs = oracle::vertices(oracle::normalized_deflators(s));
    for (int i = 0; i < 25; ++i) {
      Eigen::VectorXd xi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.tree.size()));
      double total = 0.0;
      for (const Eigen::VectorXd& v : vs) {
        const double a = w(rng);
        xi += a * v;
        total += a;
      }
      xi *= y(rng) / total;
      const double phi = composite_dual_objective(s, x, q, AdaptedProcess(xi.data(), xi.data() + xi.size()));
      CHECK(u <= phi + 1e-9 * (1.0 + std::abs(u)));
    }
  }
}
