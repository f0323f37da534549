#pragma once

#include "refauction/outcome.hpp"
#include "refauction/profile.hpp"
#include "refauction/strategy.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refauction {

using Json = nlohmann::ordered_json;

/// Parses a network file:
///
///   {"schema_version": 1, "seller": "s",
///    "agents": [{"id": "a", "valuation": "3", "children": ["b"]}, ...]}
///
/// The seller must be listed among the agents. Errors carry the line/column
/// for syntax problems and the JSON path (e.g. agents[2].valuation) for
/// everything else; they are thrown as ValidationError.
Profile parse_network_file(std::string_view text);
Profile load_network_file(const std::string& path);

/// Canonical rendering: agents in id order, children sorted, two-space indent,
/// trailing newline. parse_network_file(serialize_network_file(p)) == p.
std::string serialize_network_file(const Profile& profile);
Json profile_to_json(const Profile& profile);
Profile profile_from_json(const Json& doc);

/// {"mechanism", "winner", "payments", "revenue", "social_welfare", "path"}.
Json outcome_to_json(const Outcome& outcome);

Json deviation_to_json(const DeviationResult& result);

/// Aligned text table with the columns Mechanism | Winner | Rewarded agents |
/// Social Welfare | Revenue. Agents with zero payment are left out. The
/// footnote names the mechanisms of the original comparison that are not
/// executable here.
std::string render_table(const std::vector<Outcome>& outcomes);

/// One row per (outcome, agent with a payment entry):
/// mechanism,winner,social_welfare,revenue,agent,payment.
/// Amounts are exact unless `scale` asks for fixed-point digits.
std::string render_csv(const std::vector<Outcome>& outcomes, std::optional<int> scale = std::nullopt);

}  // namespace refauction
