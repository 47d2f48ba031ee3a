// Command-line front end: validate, solve, verify, price, slackness,
// oracle-compare and suite.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lidual/cones.hpp"
#include "lidual/errors.hpp"
#include "lidual/fixtures.hpp"
#include "lidual/oracle.hpp"
#include "lidual/random_suite.hpp"
#include "lidual/report.hpp"
#include "lidual/scenario_io.hpp"
#include "lidual/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lidual;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kInputError = 2, kNumericalFailure = 3 };

struct RunConfig {
  std::string scenario;
  std::optional<double> x;
  std::vector<std::string> q_overrides;
  std::string out_dir;
  double solver_tolerance = 1e-9;
  double gap_tolerance = 1e-6;
  double residual_tolerance = 1e-6;
  double epsilon = 1e-5;
  double step = 1e-4;
  double derivative_tolerance = 1e-4;
  int directions = 100;
  std::uint64_t seed = 7;
  std::size_t count = 50;
  double oracle_tolerance = 1e-4;
  int refinement_rounds = 2;
  bool no_prices = false;
};

Scenario resolve_scenario(const std::string& ref) {
  if (fs::exists(ref)) return load_scenario(ref);
  try {
    return fixture_by_name(ref);
  } catch (const DomainError&) {
    throw MalformedScenario("'" + ref + "' is neither a readable scenario file nor a built-in fixture");
  }
}

TimeSeries income_units(const Scenario& s, const RunConfig& cfg) {
  TimeSeries q = s.income_units;
  for (const std::string& item : cfg.q_overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw MalformedScenario("--q expects t=value, got '" + item + "'");
    int t = 0;
    double v = 0.0;
    try {
      std::size_t used = 0;
      t = std::stoi(item.substr(0, eq), &used);
      if (used != eq) throw std::invalid_argument("t");
      v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("value");
    } catch (const std::exception&) {
      throw MalformedScenario("--q expects t=value, got '" + item + "'");
    }
    if (t < 1 || t > s.horizon()) throw MalformedScenario("--q time " + std::to_string(t) + " outside 1.." + std::to_string(s.horizon()));
    q[static_cast<std::size_t>(t)] = v;
  }
  return q;
}

VerifyOptions verify_options(const RunConfig& cfg) {
  VerifyOptions o;
  o.solve.primal.barrier.gap_tolerance = cfg.solver_tolerance;
  o.solve.dual.barrier.gap_tolerance = cfg.solver_tolerance;
  o.gap_tolerance = cfg.gap_tolerance;
  o.residual_tolerance = cfg.residual_tolerance;
  o.slackness_epsilon = cfg.epsilon;
  o.marginal_prices = !cfg.no_prices;
  o.prices.step = cfg.step;
  o.prices.derivative_tolerance = cfg.derivative_tolerance;
  o.prices.directions = cfg.directions;
  o.prices.seed = cfg.seed;
  return o;
}

void emit(const RunConfig& cfg, const std::string& command, std::optional<std::uint64_t> seed, json body,
          const std::vector<std::pair<std::string, std::string>>& tables = {}) {
  const json doc = wrap_report(command, seed, std::move(body));
  std::cout << doc.dump(2) << std::endl;
  if (cfg.out_dir.empty()) return;
  fs::create_directories(cfg.out_dir);
  write_text((fs::path(cfg.out_dir) / (command + ".json")).string(), doc.dump(2) + "\n");
  for (const auto& [name, text] : tables) write_text((fs::path(cfg.out_dir) / name).string(), text);
}

int run_validate(const RunConfig& cfg) {
  const Scenario s = resolve_scenario(cfg.scenario);
  const ValidationReport report = validate(s);
  json body = {{"scenario", s.name}, {"validation", validation_json(report)}};
  if (report.ok()) {
    const ClockProfile clock = deterministic_clock(s);
    json dk = json::object();
    for (int t = 1; t <= s.horizon(); ++t) dk[std::to_string(t)] = clock.increments[static_cast<std::size_t>(t)];
    body["clock"] = dk;
  }
  emit(cfg, "validate", std::nullopt, body);
  return report.ok() ? kPass : kCheckFailed;
}

int run_solve(const RunConfig& cfg) {
  const Scenario s = resolve_scenario(cfg.scenario);
  require_valid(s);
  const double x = cfg.x.value_or(s.initial_wealth);
  const TimeSeries q = income_units(s, cfg);
  SolveOptions options = verify_options(cfg).solve;
  const SolvedPair pair = solve_pair(s, x, q, options);
  json body = {{"scenario", s.name},
               {"x", x},
               {"superreplication_price", number_json(superreplication_price(s, q))},
               {"primal", plan_json(s, pair.primal)},
               {"dual", dual_json(s, pair.dual)},
               {"gap", number_json(pair.gap)}};
  emit(cfg, "solve", std::nullopt, body,
       {{"nodes.csv", node_table_csv(s, &pair.primal, &pair.dual)}, {"dates.csv", date_table_csv(s, q, pair.dual)}});
  return kPass;
}

int run_verify(const RunConfig& cfg) {
  const Scenario s = resolve_scenario(cfg.scenario);
  require_valid(s);
  const double x = cfg.x.value_or(s.initial_wealth);
  const TimeSeries q = income_units(s, cfg);
  const VerifyOptions options = verify_options(cfg);
  const DualityReport report = verify(s, x, q, options);
  emit(cfg, "verify", cfg.seed, duality_report_json(s, report, options),
       {{"nodes.csv", node_table_csv(s, &report.plan, &report.dual)}, {"dates.csv", date_table_csv(s, q, report.dual)}});
  return report.passed() ? kPass : kCheckFailed;
}

int run_price(const RunConfig& cfg) {
  const Scenario s = resolve_scenario(cfg.scenario);
  require_valid(s);
  const double x = cfg.x.value_or(s.initial_wealth);
  const TimeSeries q = income_units(s, cfg);
  const VerifyOptions options = verify_options(cfg);
  const DualSolution dual = solve_composite_dual(s, x, q, options.solve.dual);
  const PriceCheck check = marginal_price_check(s, x, q, dual.pair.y, dual.pair.r, options.prices, options.solve);
  const ClockProfile clock = deterministic_clock(s);
  json table = json::array();
  for (int t = 1; t <= s.horizon(); ++t) {
    const auto i = static_cast<std::size_t>(t);
    table.push_back({{"t", t}, {"dK", clock.increments[i]}, {"r", number_json(dual.pair.r[i])},
                     {"r_dK", number_json(dual.pair.r[i] * clock.increments[i])}});
  }
  json body = {{"scenario", s.name}, {"x", x}, {"y", number_json(dual.pair.y)}, {"r", table},
               {"check", price_json(check, options.prices)}};
  emit(cfg, "price", cfg.seed, body, {{"dates.csv", date_table_csv(s, q, dual)}});
  return check.inequality_passed && check.derivatives_passed ? kPass : kCheckFailed;
}

int run_slackness(const RunConfig& cfg) {
  const Scenario s = resolve_scenario(cfg.scenario);
  require_valid(s);
  const double x = cfg.x.value_or(s.initial_wealth);
  const TimeSeries q = income_units(s, cfg);
  const SolvedPair pair = solve_pair(s, x, q, verify_options(cfg).solve);
  const SlacknessCertificate cert = slackness_report(s, pair.primal, pair.dual, cfg.epsilon);
  json body = {{"scenario", s.name}, {"x", x}, {"slackness", slackness_json(s, cert)},
               {"decomposition", dual_json(s, pair.dual)["decomposition"]}};
  emit(cfg, "slackness", std::nullopt, body, {{"nodes.csv", node_table_csv(s, &pair.primal, &pair.dual)}});
  return cert.passed ? kPass : kCheckFailed;
}

int run_oracle_compare(const RunConfig& cfg) {
  const Scenario s = resolve_scenario(cfg.scenario);
  require_valid(s);
  const double x = cfg.x.value_or(s.initial_wealth);
  const TimeSeries q = income_units(s, cfg);
  const PrimalPlan plan = solve_primal(s, x, q, verify_options(cfg).solve.primal);
  GridSpec grid;
  grid.refinement_rounds = cfg.refinement_rounds;
  const OracleResult oracle = brute_force_primal(s, x, q, grid);
  const double diff = std::abs(plan.value - oracle.value);
  const bool passed = diff <= cfg.oracle_tolerance && oracle.value <= plan.value + 1e-9;
  json body = {{"scenario", s.name},
               {"x", x},
               {"solver_value", number_json(plan.value)},
               {"oracle_value", number_json(oracle.value)},
               {"difference", number_json(diff)},
               {"tolerance", cfg.oracle_tolerance},
               {"grid_points", oracle.points},
               {"feasibility_checks", oracle.feasibility_lps},
               {"passed", passed}};
  emit(cfg, "oracle-compare", std::nullopt, body);
  return passed ? kPass : kCheckFailed;
}

int run_suite_command(const RunConfig& cfg) {
  const std::vector<SuiteCase> cases = random_cases(cfg.seed, cfg.count);
  const SuiteSummary summary = run_suite(cfg.seed, cases, verify_options(cfg));
  emit(cfg, "suite", cfg.seed, suite_json(summary), {{"suite.csv", suite_table_csv(summary)}});
  if (summary.passed()) return kPass;
  for (const SuiteEntry& e : summary.entries)
    if (!e.passed && e.error_class == kNumericalFailure) return kNumericalFailure;
  return kCheckFailed;
}

int fail(const std::string& type, const std::string& message, int code) {
  const json err = {{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
  std::cout << err.dump(2) << std::endl;
  std::cerr << "lidual: " << type << ": " << message << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primal/dual consumption-investment laboratory on event trees"};
  app.require_subcommand(1);
  RunConfig cfg;
  if (const char* env = std::getenv("LIDUAL_OUT_DIR")) cfg.out_dir = env;

  auto common = [&](CLI::App* sub, bool needs_scenario) {
    if (needs_scenario) sub->add_option("scenario", cfg.scenario, "Scenario file or fixture name")->required();
    sub->add_option("--out", cfg.out_dir, "Output directory (default $LIDUAL_OUT_DIR)");
  };
  auto point = [&](CLI::App* sub) {
    sub->add_option("--x", cfg.x, "Initial wealth, overrides the file");
    sub->add_option("--q", cfg.q_overrides, "Income units as t=value, applied over the file profile");
    sub->add_option("--solver-tol", cfg.solver_tolerance, "Interior-point gap tolerance")->check(CLI::PositiveNumber);
  };
  auto checks = [&](CLI::App* sub) {
    sub->add_option("--gap-tol", cfg.gap_tolerance, "Duality gap tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--residual-tol", cfg.residual_tolerance, "Budget and first-order tolerance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--epsilon", cfg.epsilon, "Slackness epsilon")->check(CLI::PositiveNumber);
    sub->add_option("--step", cfg.step, "Finite-difference step")->check(CLI::PositiveNumber);
    sub->add_option("--fd-tol", cfg.derivative_tolerance, "Finite-difference tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--directions", cfg.directions, "Random subgradient directions")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", cfg.seed, "Seed for random directions and the suite");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "Check scenario structure");
  common(validate_cmd, true);
  CLI::App* solve_cmd = app.add_subcommand("solve", "Primal plan, composite dual and decomposition");
  common(solve_cmd, true);
  point(solve_cmd);
  CLI::App* verify_cmd = app.add_subcommand("verify", "Full duality report");
  common(verify_cmd, true);
  point(verify_cmd);
  checks(verify_cmd);
  verify_cmd->add_flag("--no-prices", cfg.no_prices, "Skip the finite-difference pricing check");
  CLI::App* price_cmd = app.add_subcommand("price", "Marginal prices y and r by date");
  common(price_cmd, true);
  point(price_cmd);
  checks(price_cmd);
  CLI::App* slack_cmd = app.add_subcommand("slackness", "Complementary slackness certificate");
  common(slack_cmd, true);
  point(slack_cmd);
  slack_cmd->add_option("--epsilon", cfg.epsilon, "Slackness epsilon")->check(CLI::PositiveNumber);
  CLI::App* oracle_cmd = app.add_subcommand("oracle-compare", "Solver against the brute-force grid");
  common(oracle_cmd, true);
  point(oracle_cmd);
  oracle_cmd->add_option("--tol", cfg.oracle_tolerance, "Allowed |solver - oracle|")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--rounds", cfg.refinement_rounds, "Grid refinement rounds")->check(CLI::NonNegativeNumber);
  CLI::App* suite_cmd = app.add_subcommand("suite", "Randomized acceptance run");
  common(suite_cmd, false);
  checks(suite_cmd);
  suite_cmd->add_option("--count", cfg.count, "Number of scenarios");
  suite_cmd->add_option("--solver-tol", cfg.solver_tolerance, "Interior-point gap tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*validate_cmd) return run_validate(cfg);
    if (*solve_cmd) return run_solve(cfg);
    if (*verify_cmd) return run_verify(cfg);
    if (*price_cmd) return run_price(cfg);
    if (*slack_cmd) return run_slackness(cfg);
    if (*oracle_cmd) return run_oracle_compare(cfg);
    if (*suite_cmd) return run_suite_command(cfg);
  } catch (const MalformedTree& e) {
    return fail("MalformedTree", e.what(), kInputError);
  } catch (const MalformedScenario& e) {
    return fail("MalformedScenario", e.what(), kInputError);
  } catch (const InfeasibleProblem& e) {
    return fail("InfeasibleProblem", e.what(), kInputError);
  } catch (const DomainError& e) {
    return fail("DomainError", e.what(), kInputError);
  } catch (const StepTooLarge& e) {
    return fail("StepTooLarge", e.what(), kInputError);
  } catch (const GridGuard& e) {
    return fail("GridGuard", e.what(), kInputError);
  } catch (const NumericalFailure& e) {
    return fail("NumericalFailure", e.what(), kNumericalFailure);
  } catch (const ExtensionFailure& e) {
    return fail("ExtensionFailure", e.what(), kNumericalFailure);
  } catch (const DegenerateValue& e) {
    return fail("DegenerateValue", e.what(), kCheckFailed);
  } catch (const Error& e) {
    return fail("Error", e.what(), kCheckFailed);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), kNumericalFailure);
  }
  return kInputError;
}
