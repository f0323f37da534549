#pragma once

#include "refauction/money.hpp"
#include "refauction/network.hpp"
#include "refauction/profile.hpp"

#include <map>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace refauction {

enum class MechanismKind { trdm, vcg_referral, spa_direct, idm_reconstructed, custom };

/// Stable display name: TRDM, VCG_REFERRAL, SPA_DIRECT, IDM_RECON, CUSTOM.
std::string_view mechanism_name(MechanismKind kind);
/// Short CLI name: trdm, vcg, spa, idm.
std::string_view mechanism_short_name(MechanismKind kind);
std::optional<MechanismKind> parse_mechanism(std::string_view text);

/// Result of one mechanism run. Payments are positive when the agent pays and
/// negative for a referral reward; agents without an entry pay 0.
///
/// Construction enforces revenue == sum of payments and throws
/// ConsistencyError otherwise.
class Outcome {
public:
    Outcome(MechanismKind mechanism, std::optional<AgentId> winner, std::vector<std::pair<AgentId, Money>> payments,
            Money declared_revenue, Money social_welfare, std::optional<WinningPath> path);

    MechanismKind mechanism() const { return mechanism_; }
    const std::optional<AgentId>& winner() const { return winner_; }
    /// Sorted by AgentId.
    const std::vector<std::pair<AgentId, Money>>& payments() const { return payments_; }
    Money payment(const AgentId& id) const;
    const Money& revenue() const { return revenue_; }
    /// Reported valuation of the winner.
    const Money& social_welfare() const { return social_welfare_; }
    const std::optional<WinningPath>& winning_path() const { return path_; }

    /// -sum of negative payments.
    Money total_reward() const;

private:
    MechanismKind mechanism_;
    std::optional<AgentId> winner_;
    std::vector<std::pair<AgentId, Money>> payments_;
    Money revenue_;
    Money social_welfare_;
    std::optional<WinningPath> path_;
};

using UtilityVector = std::map<AgentId, Money>;

/// u_i = x_i * v_i - p_i against true valuations, for every non-seller agent
/// of `truth`. Throws ValidationError if the outcome names an unknown agent.
UtilityVector utilities(const Outcome& outcome, const Profile& truth);

/// Winner's true valuation (0 when nobody wins).
Money true_social_welfare(const Outcome& outcome, const Profile& truth);

}  // namespace refauction
