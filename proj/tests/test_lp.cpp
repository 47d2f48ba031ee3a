#include <doctest.h>

#include <random>

#include "lidual/lp.hpp"
#include "oracles.hpp"

using namespace lidual;

namespace {

LinearProgram from_random(const oracle::RandomLp& r) {
  LinearProgram lp;
  for (Eigen::Index j = 0; j < r.c.size(); ++j) lp.add_variable(r.c[j]);
  for (Eigen::Index i = 0; i < r.A.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(r.A.cols()));
    for (Eigen::Index j = 0; j < r.A.cols(); ++j) row[static_cast<std::size_t>(j)] = r.A(i, j);
    lp.add_row(row, RowType::LessEqual, r.b[i]);
  }
  return lp;
}

}  // namespace

TEST_CASE("small LPs") {
  LinearProgram a;
  a.add_variable(1.0);
  a.add_row({1.0}, RowType::LessEqual, 1.0);
  const LpOutcome oa = solve_lp(a);
  REQUIRE(is_optimal(oa));
  CHECK(std::get<LpOptimal>(oa).value == doctest::Approx(1.0));
  CHECK(std::get<LpOptimal>(oa).point[0] == doctest::Approx(1.0));

  LinearProgram b;
  b.add_variable(1.0);
  b.add_row({1.0}, RowType::LessEqual, -1.0);
  const LpOutcome ob = solve_lp(b);
  REQUIRE(is_infeasible(ob));
  const auto& y = std::get<LpInfeasible>(ob).certificate;
  CHECK(y[0] <= 0.0);
  CHECK(y[0] * -1.0 > 0.0);

  LinearProgram c;
  c.add_variable(1.0);
  c.add_variable(1.0);
  c.add_row({1.0, 2.0}, RowType::LessEqual, 4.0);
  c.add_row({3.0, 1.0}, RowType::LessEqual, 6.0);
  const LpOutcome oc = solve_lp(c);
  REQUIRE(is_optimal(oc));
  // Vertices (0, 2), (2, 0), (1.6, 1.2): the last one, with value 2.8.
  CHECK(std::get<LpOptimal>(oc).value == doctest::Approx(2.8).epsilon(1e-12));
  CHECK(std::get<LpOptimal>(oc).point[0] == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(std::get<LpOptimal>(oc).point[1] == doctest::Approx(1.2).epsilon(1e-12));

  LinearProgram d;
  d.add_variable(1.0);
  d.add_row({-1.0}, RowType::LessEqual, 1.0);
  const LpOutcome od = solve_lp(d);
  REQUIRE(is_unbounded(od));
  CHECK(std::get<LpUnbounded>(od).ray[0] > 0.0);
}

TEST_CASE("equality rows, free variables, minimisation") {
  LinearProgram lp;
  lp.sense = Sense::Minimize;
  lp.add_variable(1.0, -LinearProgram::kInfinity, LinearProgram::kInfinity);
  lp.add_variable(2.0, 0.0, 3.0);
  lp.add_row({1.0, 1.0}, RowType::Equal, 2.0);
  lp.add_row({1.0, -1.0}, RowType::GreaterEqual, -5.0);
  const LpOutcome o = solve_lp(lp);
  REQUIRE(is_optimal(o));
  // x0 = 2 - x1 costs 2 + x1, so x1 = 0.
  CHECK(std::get<LpOptimal>(o).value == doctest::Approx(2.0));
}

TEST_CASE("random LPs agree with vertex enumeration; duals certify the value") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> vars(1, 8), rows(1, 5);
  for (int trial = 0; trial < 150; ++trial) {
    const oracle::RandomLp r = oracle::random_lp(rng, vars(rng), rows(rng));
    const double expected = oracle::vertex_lp_value(r);
    for (PivotRule rule : {PivotRule::Bland, PivotRule::DantzigWithBlandFallback}) {
      const LpOutcome o = solve_lp(from_random(r), {1e-9, 200000, rule});
      REQUIRE(is_optimal(o));
      const LpOptimal& opt = std::get<LpOptimal>(o);
      CHECK(opt.value == doctest::Approx(expected).epsilon(1e-8));

      Eigen::VectorXd y(r.A.rows());
      for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = opt.duals.at(static_cast<std::size_t>(i));
      CHECK(y.minCoeff() >= -1e-9);
      CHECK((r.A.transpose() * y - r.c).minCoeff() >= -1e-8);
      CHECK(r.b.dot(y) == doctest::Approx(opt.value).epsilon(1e-8));
    }
  }
}

TEST_CASE("degenerate LP terminates under Bland") {
  // Klee-Minty style cube of dimension 6.
  const int n = 6;
  LinearProgram lp;
  for (int j = 0; j < n; ++j) lp.add_variable(std::pow(2.0, n - 1 - j));
  for (int i = 0; i < n; ++i) {
    std::vector<double> row(n, 0.0);
    for (int j = 0; j < i; ++j) row[j] = std::pow(2.0, i - j + 1);
    row[i] = 1.0;
    lp.add_row(row, RowType::LessEqual, std::pow(5.0, i + 1));
  }
  lp.add_row(std::vector<double>(n, 0.0), RowType::LessEqual, 0.0);
  const LpOutcome o = solve_lp(lp);
  REQUIRE(is_optimal(o));
  CHECK(std::get<LpOptimal>(o).value == doctest::Approx(std::pow(5.0, n)));
}
