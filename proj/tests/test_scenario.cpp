#include <doctest.h>

#include <random>

#include "lidual/errors.hpp"
#include "lidual/fixtures.hpp"
#include "lidual/random_suite.hpp"
#include "lidual/scenario.hpp"

using namespace lidual;

namespace {

const ValidationCheck& check_named(const ValidationReport& r, const std::string& name) {
  for (const ValidationCheck& c : r.checks)
    if (c.name == name) return c;
  FAIL("missing check " << name);
  return r.checks.front();
}

}  // namespace

TEST_CASE("fixtures validate") {
  for (const NamedScenario& f : standard_fixtures()) {
    INFO(f.name);
    CHECK(validate(f.scenario).ok());
  }
  const ClockProfile k = deterministic_clock(fix_bin1());
  CHECK(k.increments.at(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("clock at the root is rejected") {
  Scenario s = fix_bin1();
  s.clock[0] = 0.5;
  const ValidationReport r = validate(s);
  CHECK_FALSE(r.ok());
  const ValidationCheck& c = check_named(r, "clock_start");
  CHECK_FALSE(c.passed);
  CHECK(c.message.find("kappa_0 = 0 violated") != std::string::npos);
  CHECK_THROWS_AS(require_valid(s), MalformedScenario);
}

TEST_CASE("a node without clock mass on a charging date breaks the density condition") {
  Scenario s = fix_bin1();
  s.clock[s.tree.index_of("d")] = 0.0;
  const ValidationReport r = validate(s);
  CHECK_FALSE(r.ok());
  CHECK_FALSE(check_named(r, "clock_density").passed);
  CHECK(check_named(r, "clock_start").passed);
}

TEST_CASE("other structural violations") {
  Scenario s = fix_det2();
  s.clock[1] = 1.5;
  CHECK_FALSE(check_named(validate(s), "clock_bound").passed);

  s = fix_det2();
  s.clock[1] = -0.1;
  CHECK_FALSE(check_named(validate(s), "clock_nondecreasing").passed);

  s = fix_det2();
  s.clock.assign(3, 0.0);
  CHECK_FALSE(check_named(validate(s), "clock_mass").passed);

  s = fix_bin2();
  s.theta0.stop_nodes.pop_back();
  CHECK_FALSE(check_named(validate(s), "theta0").passed);

  s = fix_bin1();
  s.income_rate.pop_back();
  CHECK_FALSE(validate(s).ok());
}

TEST_CASE("deterministic clock examples") {
  const ClockProfile det = deterministic_clock(fix_det2());
  CHECK(det.increments.at(1) == doctest::Approx(1.0));
  CHECK(det.increments.at(2) == doctest::Approx(1.0));
  CHECK(det.support == std::vector<int>{1, 2});

  const Scenario bin2 = fix_bin2();
  const ClockProfile k = deterministic_clock(bin2);
  double direct = 0.0;
  for (NodeId l : bin2.tree.leaves()) direct += bin2.tree.probability(l) * bin2.clock[l];
  CHECK(k.increments.at(2) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(k.increments.at(1) == 0.0);
  CHECK_FALSE(k.charges(1));
}

TEST_CASE("dK pairing examples") {
  const Scenario det = fix_det2();
  const ClockProfile k = deterministic_clock(det);
  CHECK(dk_pairing(zero_series(det), {0.0, 0.3, 0.7}, k) == 0.0);
  CHECK(dk_pairing(constant_series(det, 1.0), {0.0, 0.0, 1.0}, k) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(dk_pairing(constant_series(det, 2.0), {0.0, 0.0, 1.0}, k) ==
        doctest::Approx(2.0 * dk_pairing(constant_series(det, 1.0), {0.0, 0.0, 1.0}, k)));
}

TEST_CASE("random scenarios: bilinear pairing, clock totals, income on the clock support") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const SuiteCase& c : random_cases(13, 20)) {
    const Scenario& s = c.scenario;
    const ClockProfile k = deterministic_clock(s);
    CHECK(k.total == doctest::Approx(expectation(s.tree, AdaptedProcess(s.tree.size(), 1.0), s.clock)).epsilon(1e-12));

    TimeSeries q1 = zero_series(s), q2 = q1, r1 = q1, r2 = q1, qm = q1, rm = q1;
    const double a = u(rng), b = u(rng);
    for (std::size_t t = 1; t < q1.size(); ++t) {
      q1[t] = u(rng), q2[t] = u(rng), r1[t] = u(rng), r2[t] = u(rng);
      qm[t] = a * q1[t] + b * q2[t];
      rm[t] = a * r1[t] + b * r2[t];
    }
    CHECK(dk_pairing(qm, r1, k) == doctest::Approx(a * dk_pairing(q1, r1, k) + b * dk_pairing(q2, r1, k)).epsilon(1e-12));
    CHECK(dk_pairing(q1, rm, k) == doctest::Approx(a * dk_pairing(q1, r1, k) + b * dk_pairing(q1, r2, k)).epsilon(1e-12));

    // Changing q off the clock support leaves cumulative income unchanged.
    TimeSeries off = q1;
    for (std::size_t t = 1; t < off.size(); ++t)
      if (!k.charges(static_cast<int>(t))) off[t] += 3.0;
    CHECK(cumulative_income(s, q1) == cumulative_income(s, off));
  }
}

TEST_CASE("with_theta0 replaces only the stopping region") {
  const Scenario s = fix_det2();
  const Scenario t = with_theta0(s, terminal_region(s.tree));
  CHECK(t.theta0.stop_nodes == std::vector<NodeId>{2});
  CHECK(t.clock == s.clock);
}
