#include "lidual/random_suite.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lidual/cones.hpp"
#include "lidual/errors.hpp"

namespace lidual {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::vector<double> simplex_point(std::mt19937_64& rng, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (double& v : w) sum += (v = uniform(rng, 0.2, 1.0));
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) partial += (w[i] /= sum);
  w.back() = 1.0 - partial;
  return w;
}

std::uint64_t case_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Scenario random_scenario(std::mt19937_64& rng, const RandomScenarioOptions& options, int family, std::string name) {
  const int depth = uniform_int(rng, 1, options.max_depth);
  std::vector<NodeSpec> specs;
  std::vector<int> branching;
  while (true) {
    specs.clear();
    specs.push_back({"n0", std::nullopt, 1.0, 0});
    std::vector<std::size_t> frontier{0};
    for (int t = 1; t <= depth; ++t) {
      std::vector<std::size_t> next;
      for (std::size_t parent : frontier) {
        const int b = uniform_int(rng, 1, options.max_branching);
        const std::vector<double> p = simplex_point(rng, b);
        for (int k = 0; k < b; ++k) {
          next.push_back(specs.size());
          specs.push_back({"n" + std::to_string(specs.size()), specs[parent].name, p[static_cast<std::size_t>(k)], t});
        }
      }
      frontier = std::move(next);
    }
    if (specs.size() <= options.max_nodes) break;
  }

  Scenario s;
  s.name = std::move(name);
  s.tree = build_tree(specs);
  const EventTree& tree = s.tree;
  const std::size_t n = tree.size();
  const auto d = static_cast<std::size_t>(uniform_int(rng, 0, options.max_assets));

  s.prices = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (NodeId id = 0; id < n; ++id) {
    const auto& kids = tree.children(id);
    if (kids.empty() || d == 0) continue;
    const std::vector<double> q = simplex_point(rng, static_cast<int>(kids.size()));
    for (std::size_t a = 0; a < d; ++a) {
      std::vector<double> ret(kids.size(), 0.0);
      if (kids.size() > 1) {
        double mean = 0.0;
        for (std::size_t k = 0; k + 1 < kids.size(); ++k) mean += q[k] * (ret[k] = uniform(rng, -0.4, 0.4));
        ret.back() = -mean / q.back();
        const double worst = std::abs(ret.back());
        if (worst > 0.6)
          for (double& r : ret) r *= 0.6 / worst;
      }
      const auto col = static_cast<Eigen::Index>(a);
      for (std::size_t k = 0; k < kids.size(); ++k)
        s.prices(static_cast<Eigen::Index>(kids[k]), col) = s.prices(static_cast<Eigen::Index>(id), col) * (1.0 + ret[k]);
    }
  }

  std::vector<bool> dated(static_cast<std::size_t>(depth) + 1, false);
  bool any = false;
  for (int t = 1; t <= depth; ++t) any |= (dated[static_cast<std::size_t>(t)] = uniform(rng, 0.0, 1.0) < options.clock_date_probability);
  if (!any) dated[static_cast<std::size_t>(uniform_int(rng, 1, depth))] = true;
  s.clock.assign(n, 0.0);
  s.income_rate.assign(n, 0.0);
  for (NodeId id = 1; id < n; ++id) {
    if (dated[static_cast<std::size_t>(tree.time(id))]) s.clock[id] = uniform(rng, 0.5, 1.5);
    s.income_rate[id] = uniform(rng, 0.0, 1.0);
  }
  std::vector<double> path(n, 0.0);
  double bound = 0.0;
  for (NodeId id = 1; id < n; ++id) {
    path[id] = path[*tree.node(id).parent] + s.clock[id];
    bound = std::max(bound, path[id]);
  }
  s.clock_bound = bound;

  std::function<void(NodeId)> place = [&](NodeId id) {
    if (tree.is_leaf(id) || uniform(rng, 0.0, 1.0) < options.stop_probability) {
      s.theta0.stop_nodes.push_back(id);
      return;
    }
    for (NodeId c : tree.children(id)) place(c);
  };
  place(tree.root());

  std::vector<double> weights;
  if (uniform(rng, 0.0, 1.0) < 0.5) {
    weights.resize(n);
    for (double& w : weights) w = uniform(rng, 0.5, 1.5);
  }
  if (family == 0) {
    s.utility = UtilityField::log_utility(std::move(weights));
  } else {
    double R = uniform(rng, 0.3, 3.0);
    if (std::abs(R - 1.0) < 0.2) R += 0.4;
    s.utility = UtilityField::power_utility(R, std::move(weights));
  }

  s.income_units.assign(static_cast<std::size_t>(depth) + 1, 0.0);
  for (int t = 1; t <= depth; ++t) s.income_units[static_cast<std::size_t>(t)] = uniform(rng, -0.5, 1.0);
  s.initial_wealth = superreplication_price(s, s.income_units) + uniform(rng, 0.2, 1.5);
  return s;
}

std::vector<SuiteCase> random_cases(std::uint64_t seed, std::size_t count, const RandomScenarioOptions& options) {
  std::vector<SuiteCase> cases;
  for (std::size_t i = 0; i < count; ++i) {
    SuiteCase c;
    c.index = i;
    c.seed = case_seed(seed, i);
    std::mt19937_64 rng(c.seed);
    c.scenario = random_scenario(rng, options, static_cast<int>(i % 2), "random-" + std::to_string(i));
    c.x = c.scenario.initial_wealth;
    c.q = c.scenario.income_units;
    cases.push_back(std::move(c));
  }
  return cases;
}

std::size_t SuiteSummary::passed_count() const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const SuiteEntry& e) { return e.passed; }));
}

SuiteSummary run_suite(std::uint64_t seed, const std::vector<SuiteCase>& cases, const VerifyOptions& options) {
  SuiteSummary out;
  out.seed = seed;
  for (const SuiteCase& c : cases) {
    SuiteEntry e;
    e.index = c.index;
    e.name = c.scenario.name;
    e.seed = c.seed;
    e.nodes = c.scenario.tree.size();
    e.assets = c.scenario.assets();
    e.utility = c.scenario.utility.family() == UtilityFamily::Log
                    ? "log"
                    : "power(" + std::to_string(c.scenario.utility.risk_aversion()) + ")";
    e.x = c.x;
    try {
      VerifyOptions local = options;
      local.prices.seed = c.seed;
      const DualityReport r = verify(c.scenario, c.x, c.q, local);
      e.primal_value = r.primal_value;
      e.dual_value = r.dual_value;
      e.gap = r.gap;
      e.budget_residual = r.subgradient.budget_residual;
      e.first_order_residual = r.subgradient.first_order_residual;
      e.slackness_passed = r.slackness.passed;
      e.drop_edges = r.slackness.drops.size();
      if (r.prices) {
        e.worst_inequality_excess = r.prices->worst_inequality_excess;
        e.max_derivative_error = r.prices->max_derivative_error;
      } else if (options.marginal_prices) {
        e.error = r.price_skip_reason;
      }
      e.passed = r.passed() && (r.prices || !options.marginal_prices);
    } catch (const NumericalFailure& err) {
      e.error = err.what();
      e.error_class = 3;
    } catch (const MalformedTree& err) {
      e.error = err.what();
      e.error_class = 2;
    } catch (const MalformedScenario& err) {
      e.error = err.what();
      e.error_class = 2;
    } catch (const Error& err) {
      e.error = err.what();
      e.error_class = 1;
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

}  // namespace lidual
