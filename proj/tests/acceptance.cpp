// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lidual/cones.hpp"
#include "lidual/dual.hpp"
#include "lidual/errors.hpp"
#include "lidual/fixtures.hpp"
#include "lidual/lp.hpp"
#include "lidual/oracle.hpp"
#include "lidual/random_suite.hpp"
#include "lidual/verify.hpp"
#include "oracles.hpp"

using namespace lidual;

namespace {

constexpr std::uint64_t kSuiteSeed = 7;
constexpr std::size_t kSuiteCount = 50;

struct Outcome {
  bool passed = true;
  std::string detail;
  // Records a failed condition; passing ones stay silent.
  void require(bool ok, const std::string& what) {
    if (ok) return;
    passed = false;
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
  void note(const std::string& text) {
    if (!detail.empty()) detail += "; ";
    detail += text;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void criterion(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double dt = seconds_since(t0);
  if (!o.passed) ++failures;
  std::printf("%s criterion %d: %s [%.3f s]%s%s\n", o.passed ? "PASS" : "FAIL", id, title.c_str(), dt,
              o.detail.empty() ? "" : " -- ", o.detail.c_str());
  std::fflush(stdout);
}

AdaptedProcess as_process(const Eigen::VectorXd& v) { return AdaptedProcess(v.data(), v.data() + v.size()); }

std::vector<Scenario> tiny_trees() {
  return {fix_bin1(), fix_bin1_income(), fix_det2(), fix_det2_terminal(), fix_trinomial(), fix_bin2()};
}

// Random element of the normalised deflator slice: an LP vertex for a random
// objective, mixed with the previous draws.
AdaptedProcess random_deflator(const Scenario& s, std::mt19937_64& rng) {
  const DeflatorConstraints c = deflator_constraints(s);
  const auto n = static_cast<Eigen::Index>(s.tree.size());
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.1, 1.0);
  Eigen::VectorXd mix = Eigen::VectorXd::Zero(n);
  double total = 0.0;
  for (int draw = 0; draw < 4; ++draw) {
    LinearProgram lp;
    for (Eigen::Index k = 0; k < n; ++k) lp.add_variable(u(rng), 0.0, 1.0 / s.tree.probability(static_cast<NodeId>(k)));
    std::vector<double> root(static_cast<std::size_t>(n), 0.0);
    root[0] = 1.0;
    lp.add_row(root, RowType::Equal, 1.0);
    for (Eigen::Index r = 0; r < c.equalities.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(n));
      for (Eigen::Index k = 0; k < n; ++k) row[static_cast<std::size_t>(k)] = c.equalities(r, k);
      lp.add_row(row, RowType::Equal, 0.0);
    }
    for (Eigen::Index r = 0; r < c.inequalities.rows(); ++r) {
      std::vector<double> row(static_cast<std::size_t>(n));
      for (Eigen::Index k = 0; k < n; ++k) row[static_cast<std::size_t>(k)] = c.inequalities(r, k);
      lp.add_row(row, RowType::GreaterEqual, 0.0);
    }
    const LpOutcome o = solve_lp(lp);
    if (!is_optimal(o)) throw NumericalFailure("deflator sampling LP not optimal");
    const double a = w(rng);
    for (Eigen::Index k = 0; k < n; ++k) mix[k] += a * std::get<LpOptimal>(o).point[static_cast<std::size_t>(k)];
    total += a;
  }
  return as_process(mix / total);
}

Outcome binomial_fixture() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = fix_bin1();
  const TimeSeries q = zero_series(s);
  const PrimalPlan p = solve_primal(s, 1.0, q);
  const DualSolution d = solve_composite_dual(s, 1.0, q);
  const double dt = seconds_since(t0);
  o.require(near(p.value, 0.058891, 1e-6), "value " + fmt("%.9f", p.value));
  o.require(near(p.value, 0.5 * std::log(9.0 / 8.0), 1e-6), "value vs 0.5 log(9/8)");
  o.require(near(p.consumption[s.tree.index_of("u")], 1.5, 1e-6), "c(u) " + fmt("%.9f", p.consumption[1]));
  o.require(near(p.consumption[s.tree.index_of("d")], 0.75, 1e-6), "c(d) " + fmt("%.9f", p.consumption[2]));
  o.require(near(d.pair.y, 1.0, 1e-6), "y " + fmt("%.9f", d.pair.y));
  o.require(near(d.value, p.value, 1e-6), "dual value " + fmt("%.9f", d.value));
  o.require(dt < 1.0, "runtime " + fmt("%.3f s", dt));
  o.note("u = " + fmt("%.9f", p.value) + ", Phi = " + fmt("%.9f", d.value) + ", y = " + fmt("%.9f", d.pair.y));
  return o;
}

Outcome deterministic_fixture() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = fix_det2();
  const TimeSeries q = constant_series(s, 1.0);
  const SolvedPair pd = solve_pair(s, 0.1, q);
  const PrimalPlan& p = pd.primal;
  const DualSolution& d = pd.dual;
  const NodeId t1 = s.tree.index_of("t1");
  o.require(near(p.value, 2.632456, 1e-6), "value " + fmt("%.9f", p.value));
  o.require(near(p.wealth[t1], 0.0, 1e-6) && p.multipliers[t1] > 1e-3, "constraint at t1 not binding");
  o.require(near(d.pair.y, 3.16228, 1e-5), "y " + fmt("%.9f", d.pair.y));
  o.require(near(d.pair.r.at(1), 0.0, 1e-6) && near(d.pair.r.at(2), 1.0, 1e-6), "r");
  const SubgradientReport sg = subgradient_check(s, 0.1, q, p, d);
  o.require(near(sg.budget_lhs, 1.316228, 1e-6) && near(sg.budget_rhs, 1.316228, 1e-6),
            "budget " + fmt("%.9f", sg.budget_lhs) + " vs " + fmt("%.9f", sg.budget_rhs));
  const AdaptedProcess& D = d.decomposition.decreasing;
  o.require(near(D[0], 1.0, 1e-6) && near(D[1], 1.0, 1e-6) && near(D[2], 0.316228, 1e-6),
            "D = (" + fmt("%.7f", D[0]) + ", " + fmt("%.7f", D[1]) + ", " + fmt("%.7f", D[2]) + ")");
  const SlacknessCertificate sl = slackness_report(s, p, d, 1e-5);
  o.require(sl.passed, "slackness certificate");

  const Scenario t = fix_det2_terminal();
  const SolvedPair pt = solve_pair(t, 0.1, q);
  o.require(near(pt.primal.value, 2.966479, 1e-6), "terminal value " + fmt("%.9f", pt.primal.value));
  o.require(near(pt.primal.consumption[1], 0.55, 1e-6) && near(pt.primal.consumption[2], 0.55, 1e-6),
            "terminal consumption");
  for (NodeId k = 0; k < t.tree.size(); ++k)
    if (!t.tree.is_leaf(k)) o.require(near(pt.dual.decomposition.decreasing[k], 1.0, 1e-6), "terminal D drop");
  o.require(slackness_report(t, pt.primal, pt.dual, 1e-5).drops.empty(), "terminal drop edges");
  const double dt = seconds_since(t0);
  o.require(dt < 1.0, "runtime " + fmt("%.3f s", dt));
  o.note("u = " + fmt("%.9f", p.value) + ", y = " + fmt("%.7f", d.pair.y) + ", budget " + fmt("%.9f", sg.budget_lhs) +
         ", D(t2) = " + fmt("%.7f", D[2]) + ", terminal u = " + fmt("%.9f", pt.primal.value));
  return o;
}

Outcome randomized_suite() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<SuiteCase> cases = random_cases(kSuiteSeed, kSuiteCount);
  VerifyOptions options;
  options.prices.directions = 100;
  const SuiteSummary summary = run_suite(kSuiteSeed, cases, options);
  const double dt = seconds_since(t0);

  double gap = 0, foc = 0, budget = 0, excess = -1e300;
  std::size_t slack = 0, log_cases = 0, power_cases = 0;
  int depth = 0;
  std::size_t branching = 0;
  for (const SuiteCase& c : cases) {
    depth = std::max(depth, c.scenario.horizon());
    for (const Node& n : c.scenario.tree.nodes()) branching = std::max(branching, n.children.size());
    (c.scenario.utility.family() == UtilityFamily::Log ? log_cases : power_cases)++;
  }
  for (const SuiteEntry& e : summary.entries) {
    o.require(e.error.empty(), e.name + ": " + e.error);
    gap = std::max(gap, e.gap);
    foc = std::max(foc, e.first_order_residual);
    budget = std::max(budget, e.budget_residual);
    excess = std::max(excess, e.worst_inequality_excess);
    slack += e.slackness_passed;
  }
  o.require(summary.entries.size() >= 50, "fewer than 50 scenarios");
  o.require(depth <= 4 && branching <= 3, "tree shape out of range");
  o.require(log_cases > 0 && power_cases > 0, "both utility families");
  o.require(gap <= 1e-6, "gap " + fmt("%.2e", gap));
  o.require(foc <= 1e-6, "first-order residual " + fmt("%.2e", foc));
  o.require(budget <= 1e-6, "budget residual " + fmt("%.2e", budget));
  o.require(slack == summary.entries.size(), "slackness passes " + std::to_string(slack));
  o.require(excess <= 1e-7, "subgradient excess " + fmt("%.2e", excess));
  o.require(dt < 60.0, "runtime " + fmt("%.1f s", dt));
  o.note(std::to_string(summary.entries.size()) + " scenarios (seed " + std::to_string(kSuiteSeed) + ", " +
         std::to_string(log_cases) + " log / " + std::to_string(power_cases) + " power), max gap " + fmt("%.1e", gap) +
         ", foc " + fmt("%.1e", foc) + ", budget " + fmt("%.1e", budget) + ", slackness " + std::to_string(slack) + "/" +
         std::to_string(summary.entries.size()) + ", worst excess " + fmt("%.1e", excess));
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  std::size_t count = 0;
  for (const NamedScenario& f : standard_fixtures()) {
    const Scenario& s = f.scenario;
    std::size_t vars = 0;
    for (double k : s.clock) vars += k > 0.0;
    if (vars > 4) continue;
    const double solver = solve_primal(s, s.initial_wealth, s.income_units).value;
    const double grid = brute_force_primal(s, s.initial_wealth, s.income_units).value;
    o.require(std::abs(solver - grid) <= 1e-4, f.name + " diff " + fmt("%.2e", solver - grid));
    o.require(grid <= solver + 1e-9, f.name + " grid above solver by " + fmt("%.2e", grid - solver));
    worst = std::max(worst, std::abs(solver - grid));
    ++count;
  }
  const double dt = seconds_since(t0);
  o.require(dt < 30.0, "runtime " + fmt("%.1f s", dt));
  o.note(std::to_string(count) + " fixtures, worst |solver - grid| " + fmt("%.2e", worst));
  return o;
}

Outcome cone_geometry() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uq(-1.0, 1.0), ux(-0.5, 0.5), scale(0.2, 3.0), w(0.05, 1.0);
  std::size_t agree = 0, total = 0, members = 0;
  std::size_t deflators = 0;
  for (const Scenario& s : tiny_trees()) {
    const std::vector<Eigen::VectorXd> vs = oracle::vertices(oracle::normalized_deflators(s));
    for (int i = 0; i < 200; ++i) {
      TimeSeries q = zero_series(s);
      for (std::size_t t = 1; t < q.size(); ++t) q[t] = uq(rng);
      const double x = oracle::price(s, vs, q) + ux(rng);
      bool polar = true;
      for (const Eigen::VectorXd& v : vs) polar = polar && x + oracle::income_pairing(s, v, q) >= -1e-9;
      const bool member = k_membership(s, x, q).member;
      agree += member == polar;
      members += member;
      ++total;
    }
    for (int i = 0; i < 20; ++i) {
      Eigen::VectorXd xi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.tree.size()));
      double sum = 0.0;
      for (const Eigen::VectorXd& v : vs) {
        const double a = w(rng);
        xi += a * v;
        sum += a;
      }
      xi *= scale(rng) / sum;
      const DualPair pair = income_functional(s, as_process(xi));
      const bool ok = l_membership(s, pair.y, pair.r).member && dual_membership(s, as_process(xi), pair.y, pair.r).member;
      o.require(ok, s.name + ": sampled deflator rejected");
      ++deflators;
    }
  }
  o.require(agree == total, "bipolarity disagreements " + std::to_string(total - agree));

  std::size_t price_checks = 0;
  for (const SuiteCase& c : random_cases(kSuiteSeed, kSuiteCount)) {
    const Scenario& s = c.scenario;
    for (int i = 0; i < 3; ++i) {
      const AdaptedProcess xi = random_deflator(s, rng);
      const double y = scale(rng);
      AdaptedProcess scaled = xi;
      for (double& v : scaled) v *= y;
      const DualPair pair = income_functional(s, scaled);
      o.require(dual_membership(s, scaled, pair.y, pair.r).member, s.name + ": sampled deflator rejected");
      ++deflators;
    }
    TimeSeries q1 = zero_series(s), q2 = q1, sum = q1, lq = q1;
    const double lambda = scale(rng);
    for (std::size_t t = 1; t < q1.size(); ++t) {
      q1[t] = uq(rng);
      q2[t] = uq(rng);
      sum[t] = q1[t] + q2[t];
      lq[t] = lambda * q1[t];
    }
    const double p1 = superreplication_price(s, q1), p2 = superreplication_price(s, q2);
    o.require(superreplication_price(s, sum) <= p1 + p2 + 1e-9, s.name + ": subadditivity");
    o.require(near(superreplication_price(s, lq), lambda * p1, 1e-9 * (1.0 + std::abs(lambda * p1))),
              s.name + ": homogeneity");
    const double p_terminal = superreplication_price(with_theta0(s, terminal_region(s.tree)), q1);
    const double p_root = superreplication_price(with_theta0(s, root_region(s.tree)), q1);
    o.require(p_terminal <= p1 + 1e-9 && p1 <= p_root + 1e-9, s.name + ": theta0 monotonicity");
    ++price_checks;
  }
  o.note("bipolarity " + std::to_string(agree) + "/" + std::to_string(total) + " (" + std::to_string(members) +
         " in K), " + std::to_string(deflators) + " deflators accepted, " + std::to_string(price_checks) +
         " scenarios sublinear and theta0-monotone");
  return o;
}

Outcome analytic_invariants() {
  Outcome o;
  double worst_scaling = 0.0;
  std::size_t scaled = 0;
  for (const SuiteCase& c : random_cases(kSuiteSeed, kSuiteCount)) {
    const Scenario& s = c.scenario;
    if (s.utility.family() != UtilityFamily::Log || !s.utility.weights().empty()) continue;
    const double base = solve_primal(s, c.x, c.q).value;
    const double mass = deterministic_clock(s).total;
    for (double lambda : {0.5, 2.0, 10.0}) {
      TimeSeries q = c.q;
      for (double& v : q) v *= lambda;
      const double err = std::abs(solve_primal(s, lambda * c.x, q).value - base - std::log(lambda) * mass);
      worst_scaling = std::max(worst_scaling, err);
    }
    ++scaled;
  }
  o.require(scaled > 0, "no unweighted log scenario in the suite");
  o.require(worst_scaling <= 1e-8, "scaling law error " + fmt("%.2e", worst_scaling));

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> e(-3.0, 3.0);
  double worst_tangent = 0.0, worst_inequality = -1e300;
  const std::vector<UtilityField> fields = {UtilityField::log_utility(), UtilityField::log_utility({2.5}),
                                            UtilityField::power_utility(0.5), UtilityField::power_utility(2.0),
                                            UtilityField::power_utility(0.3, {0.4}), UtilityField::power_utility(3.0)};
  for (const UtilityField& u : fields) {
    for (int i = 0; i < 1000; ++i) {
      const double x = std::pow(10.0, e(rng)), y = std::pow(10.0, e(rng));
      const double scale = 1.0 + std::abs(u.value(0, x));
      worst_inequality = std::max(worst_inequality, (u.value(0, x) - u.conjugate(0, y) - x * y) / scale);
      const double yt = u.marginal(0, x);
      worst_tangent = std::max(worst_tangent, std::abs(u.conjugate(0, yt) + x * yt - u.value(0, x)) / scale);
    }
  }
  o.require(worst_inequality <= 1e-12, "Fenchel-Young violated by " + fmt("%.2e", worst_inequality));
  o.require(worst_tangent <= 1e-10, "tangency gap " + fmt("%.2e", worst_tangent));
  o.note(std::to_string(scaled) + " log scenarios x 3 scalings, worst " + fmt("%.1e", worst_scaling) +
         "; Fenchel-Young tangency gap " + fmt("%.1e", worst_tangent));
  return o;
}

Outcome fault_injection() {
  Outcome o;
  // Subgradient check against a deflator bumped by 1% at one node.
  const Scenario det = fix_det2();
  const TimeSeries q = constant_series(det, 1.0);
  const SolvedPair pd = solve_pair(det, 0.1, q);
  AdaptedProcess bumped = pd.dual.deflator.values;
  bumped[2] *= 1.01;
  const SubgradientReport sg = subgradient_check(det, 0.1, q, pd.primal, bumped);
  o.require(!sg.passed, "bumped deflator passed the subgradient check");
  const double y2 = pd.dual.deflator.values[2];
  o.require(near(sg.first_order_residual, 0.01 * y2 / (1.0 + 1.01 * y2), 1e-8),
            "first-order residual " + fmt("%.3e", sg.first_order_residual));
  o.require(sg.worst_node && *sg.worst_node == 2, "worst node not the bumped one");

  // Slackness with D forced to drop where wealth is 0.05.
  const SolvedPair pl = solve_pair(det, 0.05, q);
  Decomposition forced = pl.dual.decomposition;
  forced.decreasing = {1.0, 0.5, 0.5};
  const SlacknessCertificate sl = slackness_report(det, pl.primal, forced, 1e-5);
  o.require(!sl.passed, "forced drop passed the slackness certificate");
  o.require(sl.offending.size() == 1 && sl.offending[0] == det.tree.index_of("t0"), "offending node not listed");

  // Validation.
  Scenario root_clock = fix_bin1();
  root_clock.clock[0] = 0.5;
  o.require(!validate(root_clock).ok(), "clock at the root accepted");
  Scenario hole = fix_bin1();
  hole.clock[hole.tree.index_of("d")] = 0.0;
  o.require(!validate(hole).ok(), "node without clock mass accepted");
  bool tree_rejected = false;
  try {
    build_tree({{"root", std::nullopt, 1.0, std::nullopt}, {"u", "root", 0.7, std::nullopt}, {"d", "root", 0.4, std::nullopt}});
  } catch (const MalformedTree& e) {
    tree_rejected = std::string(e.what()).find("sum 1.1") != std::string::npos;
  }
  o.require(tree_rejected, "probability sum 1.1 accepted");
  o.note("subgradient residual " + fmt("%.2e", sg.first_order_residual) + ", slackness flags t0 (V = " +
         fmt("%.3f", sl.max_wealth_at_drops) + "), 3 validation faults rejected");
  return o;
}

}  // namespace

int main() {
  criterion(1, "binomial fixture", binomial_fixture);
  criterion(2, "deterministic fixture, both stopping regions", deterministic_fixture);
  criterion(3, "randomized suite", randomized_suite);
  criterion(4, "oracle equivalence", oracle_equivalence);
  criterion(5, "cone geometry", cone_geometry);
  criterion(6, "analytic invariants", analytic_invariants);
  criterion(7, "fault injection", fault_injection);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
