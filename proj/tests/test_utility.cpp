#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lidual/errors.hpp"
#include "lidual/utility.hpp"
#include "oracles.hpp"

using namespace lidual;

TEST_CASE("log utility evaluations") {
  const UtilityField u = UtilityField::log_utility();
  CHECK(u.marginal(0, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u.inverse_marginal(0, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(u.value(0, 0.0) == -std::numeric_limits<double>::infinity());
  CHECK(u.conjugate(0, 1.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(u.minus_infinity_at_zero());
  CHECK_THROWS_AS(u.value(0, -1.0), DomainError);
  CHECK_THROWS_AS(u.conjugate(0, 0.0), DomainError);
}

TEST_CASE("square-root utility evaluations") {
  const UtilityField u = UtilityField::power_utility(0.5);
  CHECK(u.marginal(0, 0.1) == doctest::Approx(3.16228).epsilon(1e-6));
  CHECK(u.value(0, 0.0) == 0.0);
  CHECK_FALSE(u.minus_infinity_at_zero());
  CHECK(u.conjugate(0, std::sqrt(10.0)) == doctest::Approx(0.31623).epsilon(1e-5));
  for (double y : {0.3, 1.0, 4.0}) CHECK(u.conjugate(0, y) == doctest::Approx(1.0 / y).epsilon(1e-14));
}

TEST_CASE("power utility parameters") {
  CHECK_THROWS_AS(UtilityField::power_utility(1.0), DomainError);
  CHECK_THROWS_AS(UtilityField::power_utility(-2.0), DomainError);
  CHECK(UtilityField::power_utility(2.0).value(0, 0.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("Fenchel-Young on a random grid, tight at tangency") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> e(-3.0, 3.0), w(0.2, 3.0);
  for (int family = 0; family < 4; ++family) {
    const std::vector<double> weights = {1.0, w(rng)};
    const UtilityField u = family == 0   ? UtilityField::log_utility(weights)
                           : family == 1 ? UtilityField::power_utility(0.5, weights)
                           : family == 2 ? UtilityField::power_utility(2.0, weights)
                                         : UtilityField::power_utility(0.3, weights);
    for (NodeId n : {NodeId{0}, NodeId{1}}) {
      double worst_tangent = 0.0;
      for (int i = 0; i < 200; ++i) {
        const double x = std::pow(10.0, e(rng)), y = std::pow(10.0, e(rng));
        CHECK(u.value(n, x) <= u.conjugate(n, y) + x * y + 1e-12 * (1.0 + std::abs(u.value(n, x))));
        const double yt = u.marginal(n, x);
        const double gap = std::abs(u.conjugate(n, yt) + x * yt - u.value(n, x));
        worst_tangent = std::max(worst_tangent, gap / (1.0 + std::abs(u.value(n, x))));
      }
      CHECK(worst_tangent <= 1e-10);
    }
  }
}

TEST_CASE("closed-form conjugates match a numeric supremum") {
  for (const UtilityField& u : {UtilityField::log_utility(), UtilityField::power_utility(0.5),
                                UtilityField::power_utility(2.0), UtilityField::power_utility(0.3),
                                UtilityField::power_utility(3.0)}) {
    for (double y : {0.05, 0.4, 1.0, 2.5, 20.0}) {
      const double numeric = oracle::numeric_conjugate([&](double x) { return u.value(0, x); }, y);
      CHECK(u.conjugate(0, y) == doctest::Approx(numeric).epsilon(1e-6));
    }
  }
}

TEST_CASE("marginal utility: decreasing, inverse, derivatives") {
  for (const UtilityField& u : {UtilityField::log_utility({2.0}), UtilityField::power_utility(0.5, {0.7}),
                                UtilityField::power_utility(2.5)}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double e = -4.0; e <= 4.0; e += 0.05) {
      const double x = std::pow(10.0, e);
      const double m = u.marginal(0, x);
      CHECK(m < prev);
      prev = m;
      CHECK(u.inverse_marginal(0, m) == doctest::Approx(x).epsilon(1e-12));
      const double h = 1e-6 * x;
      CHECK(u.marginal_derivative(0, x) ==
            doctest::Approx((u.marginal(0, x + h) - u.marginal(0, x - h)) / (2 * h)).epsilon(1e-6));
      const double y = m, k = 1e-6 * y;
      CHECK(u.conjugate_derivative(0, y) == doctest::Approx(-x).epsilon(1e-12));
      CHECK(u.conjugate_derivative(0, y) ==
            doctest::Approx((u.conjugate(0, y + k) - u.conjugate(0, y - k)) / (2 * k)).epsilon(1e-5));
      CHECK(u.conjugate_second_derivative(0, y) == doctest::Approx(-1.0 / u.marginal_derivative(0, x)).epsilon(1e-10));
    }
  }
}
