#pragma once

#include "refauction/network.hpp"
#include "refauction/outcome.hpp"

#include <functional>

namespace refauction {

/// Truthful referral diffusion mechanism.
///
/// The highest bidder w wins and pays v*_{V_{-w}}. Every intermediate agent i
/// on the winning path pays v*_{V_{-i}} - v*_{V_{-r_i^*}} (a reward, since the
/// second term is never smaller), everybody else pays nothing, and the payments
/// telescope to the seller's revenue v*_{V_{-r_s^*}}.
Outcome run_trdm(const DiffusionNetwork& net, const TieBreak& tie = {});

/// VCG extended to referrals: same allocation and path as TRDM, but each path
/// agent is paid its full marginal contribution v_w - v*_{V_{-i}}. Revenue can
/// be negative.
Outcome run_vcg_referral(const DiffusionNetwork& net, const TieBreak& tie = {});

/// Second-price auction among the seller's direct children only.
Outcome run_spa_direct(const DiffusionNetwork& net, const TieBreak& tie = {});

/// Information-diffusion baseline rebuilt from its published revenue formula:
/// the item goes to the top bidder's predecessor on the winning path (or the
/// top bidder itself when it is a seller child), who pays v*_{V_{-w'}}; path
/// agents before it receive the same difference rewards as in TRDM.
Outcome run_idm_reconstructed(const DiffusionNetwork& net, const TieBreak& tie = {});

Outcome run_mechanism(MechanismKind kind, const DiffusionNetwork& net, const TieBreak& tie = {});

using MechanismFn = std::function<Outcome(const DiffusionNetwork&)>;

MechanismFn mechanism_fn(MechanismKind kind, TieBreak tie = {});

/// v*_{V_{-S}}: highest bid among agents outside `removed` and everything they reach.
Money max_excluding_all(const DiffusionNetwork& net, std::span<const NodeIndex> removed);

}  // namespace refauction
