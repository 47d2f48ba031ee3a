#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "lidual/oracle.hpp"
#include "lidual/random_suite.hpp"
#include "lidual/scenario.hpp"
#include "lidual/verify.hpp"

namespace lidual {

/// Finite doubles as numbers, non-finite ones as "inf", "-inf" or "nan".
nlohmann::json number_json(double v);

nlohmann::json validation_json(const ValidationReport& report);
nlohmann::json plan_json(const Scenario& scenario, const PrimalPlan& plan);
nlohmann::json dual_json(const Scenario& scenario, const DualSolution& dual);
nlohmann::json subgradient_json(const SubgradientReport& report);
nlohmann::json slackness_json(const Scenario& scenario, const SlacknessCertificate& certificate);
nlohmann::json price_json(const PriceCheck& check, const PriceCheckOptions& options);
nlohmann::json duality_report_json(const Scenario& scenario, const DualityReport& report, const VerifyOptions& options);
nlohmann::json suite_json(const SuiteSummary& summary);

/// {"header": {tool, command, seed, timestamp}, "body": body}. Only the header
/// varies between identical runs.
nlohmann::json wrap_report(const std::string& command, std::optional<std::uint64_t> seed, nlohmann::json body);

/// Per-node table: id, name, t, P, clock, c, V, lambda, xi, Z, D.
std::string node_table_csv(const Scenario& scenario, const PrimalPlan* plan, const DualSolution* dual);
/// Per-date table: t, dK, q, r, r dK.
std::string date_table_csv(const Scenario& scenario, const TimeSeries& q, const DualSolution& dual);
std::string suite_table_csv(const SuiteSummary& summary);

void write_text(const std::string& path, const std::string& text);

}  // namespace lidual
