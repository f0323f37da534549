#pragma once

#include "refauction/mechanisms.hpp"
#include "refauction/money.hpp"
#include "refauction/profile.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace refauction {

/// Parameters shared by the equilibrium bid function and the deviation
/// searches. All searches are bounded by these numbers and report them.
struct StrategyConfig {
    Money delta;                  // overbidding margin in the equilibrium bid
    Money epsilon;                // tolerated unilateral gain
    std::vector<Money> bid_grid;  // ascending, unique, non-negative
    int max_fakes = 2;            // extra identities per Sybil attacker
    int max_group = 3;            // largest collusion group
    std::uint64_t evaluation_budget = 50'000'000;

    /// Throws ValidationError: delta > 0, 0 <= epsilon < delta, non-empty
    /// ascending grid, non-negative bounds.
    void validate() const;
    /// Also requires the grid to contain 0 and every true valuation.
    void validate_for(const Profile& truth) const;

    /// Grid plus every grid point shifted by +-delta (negative values dropped).
    std::vector<Money> expanded_grid() const;
    std::string describe_bounds() const;
};

/// 1/100 of the smallest nonzero gap between distinct agent valuations.
Money default_delta(const Profile& truth);

/// 0, every true valuation, midpoints of consecutive distinct values, and
/// each of those values shifted by +-delta. Utilities here are piecewise
/// constant between consecutive order statistics of the bids, so the grid
/// visits every region plus the points just inside each boundary.
std::vector<Money> default_bid_grid(const Profile& truth, const Money& delta);

/// delta and grid as above, epsilon = delta / 2.
StrategyConfig default_strategy_config(const Profile& truth);

/// Equilibrium reports: everyone refers all children and bids
/// max(v_i, v*_{D_i} - delta), with D_i taken on the true network.
Profile equilibrium_reports(const Profile& truth, const StrategyConfig& config);

enum class DeviationKind { bid, referral, sybil, collusion };
std::string_view deviation_kind_name(DeviationKind kind);

enum class ReferralMode {
    fixed_bid,     // keep the baseline bid, vary only the reported children
    co_optimized,  // best bid with any proper subset vs best bid with full referral
};

/// Best manipulation found by a bounded search.
///
/// `deviated_reports` is exactly what was fed to the mechanism; summing
/// x_j * item_value - p_j over `owned` on a replay reproduces
/// `deviated_utility`. When nothing beats the baseline, the deviated side is
/// the baseline itself and gain is 0.
struct DeviationResult {
    DeviationKind kind = DeviationKind::bid;
    bool found = false;
    std::vector<AgentId> deviators;
    std::string description;
    Profile deviated_reports;
    std::vector<AgentId> owned;
    Money item_value;
    Money baseline_utility;
    Money deviated_utility;
    Money gain;
    std::uint64_t evaluations = 0;
    bool truncated = false;
    std::string bounds;
};

/// Sum of x_j * item_value - p_j over the owned identities.
Money owned_utility(const Outcome& outcome, const std::vector<AgentId>& owned, const Money& item_value);

/// Re-runs the mechanism on the recorded reports and returns the owned utility.
Money replay_deviation(const MechanismFn& mech, const DeviationResult& result);

/// Varies agent i's bid over the expanded grid; others keep their baseline reports.
DeviationResult bid_deviation_search(const MechanismFn& mech, const Profile& truth, const Profile& baseline,
                                     const AgentId& i, const StrategyConfig& config, const Money& tolerance = {});

/// Withholds every subset of i's true children.
DeviationResult referral_deviation_search(const MechanismFn& mech, const Profile& truth, const Profile& baseline,
                                          const AgentId& i, const StrategyConfig& config, ReferralMode mode,
                                          const Money& tolerance = {});

/// Adds up to config.max_fakes fake identities below i (each fake's parent is
/// i or an earlier fake), re-parents i's children among {i} and the fakes, and
/// searches bids for i and every fake. An item won by a fake is valued at i's
/// true valuation.
DeviationResult sybil_deviation_search(const MechanismFn& mech, const Profile& truth, const Profile& baseline,
                                       const AgentId& i, const StrategyConfig& config, const Money& tolerance = {});

/// Merges `group` (root first; every member reachable from the root inside
/// the group) into one identity that keeps the root's id, refers every
/// outside child of any member, and bids from the expanded grid. The group
/// values the item at its members' highest true valuation.
DeviationResult collusion_group_search(const MechanismFn& mech, const Profile& truth, const Profile& baseline,
                                       const std::vector<AgentId>& group, const StrategyConfig& config,
                                       const Money& tolerance = {});

/// Connected groups of size 2..max_group rooted anywhere in the baseline network.
std::vector<std::vector<AgentId>> rooted_groups(const Profile& baseline, int max_group);

/// Best collusion_group_search over rooted_groups(baseline, config.max_group).
DeviationResult collusion_deviation_search(const MechanismFn& mech, const Profile& truth, const Profile& baseline,
                                           const StrategyConfig& config, const Money& tolerance = {});

}  // namespace refauction
