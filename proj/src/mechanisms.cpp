#include "refauction/mechanisms.hpp"

#include "refauction/errors.hpp"

#include <stdexcept>

namespace refauction {

namespace {

WinningPath to_path(const DiffusionNetwork& net, std::span<const NodeIndex> indices) {
    WinningPath path;
    path.agents.reserve(indices.size());
    for (NodeIndex i : indices) {
        path.agents.push_back(net.id(i));
    }
    return path;
}

// excluded[k] = v*_{V_{-path[k]}} for k >= 1; excluded[0] is unused.
std::vector<Money> exclusion_maxima(const DiffusionNetwork& net, std::span<const NodeIndex> path) {
    std::vector<Money> excluded(path.size());
    for (std::size_t k = 1; k < path.size(); ++k) {
        excluded[k] = net.max_excluding(path[k]);
    }
    return excluded;
}

}  // namespace

Money max_excluding_all(const DiffusionNetwork& net, std::span<const NodeIndex> removed) {
    std::vector<std::uint8_t> gone(net.size(), 0);
    for (NodeIndex r : removed) {
        gone[r] = 1;
        const auto mark = net.descendant_mask(r);
        for (NodeIndex u = 0; u < net.size(); ++u) {
            gone[u] |= mark[u];
        }
    }
    Money best;
    for (NodeIndex u = 1; u < net.size(); ++u) {
        if (!gone[u] && best < net.bid(u)) {
            best = net.bid(u);
        }
    }
    return best;
}

Outcome run_trdm(const DiffusionNetwork& net, const TieBreak& tie) {
    const NodeIndex w = resolve_winner_index(net, tie);
    const auto path = resolve_winning_path_indices(net, w, tie);
    const auto excluded = exclusion_maxima(net, path);
    const std::size_t last = path.size() - 1;

    std::vector<std::pair<AgentId, Money>> payments;
    payments.reserve(last);
    payments.emplace_back(net.id(w), excluded[last]);
    for (std::size_t k = 1; k < last; ++k) {
        payments.emplace_back(net.id(path[k]), excluded[k] - excluded[k + 1]);
    }
    return Outcome(MechanismKind::trdm, net.id(w), std::move(payments), excluded[1], net.bid(w), to_path(net, path));
}

Outcome run_vcg_referral(const DiffusionNetwork& net, const TieBreak& tie) {
    const NodeIndex w = resolve_winner_index(net, tie);
    const auto path = resolve_winning_path_indices(net, w, tie);
    const auto excluded = exclusion_maxima(net, path);
    const std::size_t last = path.size() - 1;

    std::vector<std::pair<AgentId, Money>> payments;
    payments.reserve(last);
    Money revenue = excluded[last];
    payments.emplace_back(net.id(w), excluded[last]);
    for (std::size_t k = 1; k < last; ++k) {
        Money p = excluded[k] - net.bid(w);
        revenue += p;
        payments.emplace_back(net.id(path[k]), std::move(p));
    }
    return Outcome(MechanismKind::vcg_referral, net.id(w), std::move(payments), std::move(revenue), net.bid(w),
                   to_path(net, path));
}

Outcome run_spa_direct(const DiffusionNetwork& net, const TieBreak&) {
    const auto direct = net.children(DiffusionNetwork::seller_index());
    if (direct.empty()) {
        throw NoBiddersError("the seller has no direct invitees");
    }
    // children are stored in index (= id) order, so strict comparison keeps the smaller id on ties
    NodeIndex winner = direct[0];
    for (NodeIndex c : direct.subspan(1)) {
        if (net.bid(winner) < net.bid(c)) {
            winner = c;
        }
    }
    Money second;
    for (NodeIndex c : direct) {
        if (c != winner && second < net.bid(c)) {
            second = net.bid(c);
        }
    }
    std::vector<std::pair<AgentId, Money>> payments;
    payments.emplace_back(net.id(winner), second);
    WinningPath path;
    path.agents = {net.seller(), net.id(winner)};
    return Outcome(MechanismKind::spa_direct, net.id(winner), std::move(payments), second, net.bid(winner),
                   std::move(path));
}

Outcome run_idm_reconstructed(const DiffusionNetwork& net, const TieBreak& tie) {
    const NodeIndex top = resolve_winner_index(net, tie);
    auto path = resolve_winning_path_indices(net, top, tie);
    if (path.size() > 2) {
        path.pop_back();
    }
    const auto excluded = exclusion_maxima(net, path);
    const std::size_t last = path.size() - 1;
    const NodeIndex w = path[last];

    std::vector<std::pair<AgentId, Money>> payments;
    payments.emplace_back(net.id(w), excluded[last]);
    for (std::size_t k = 1; k < last; ++k) {
        payments.emplace_back(net.id(path[k]), excluded[k] - excluded[k + 1]);
    }

    // Revenue must also equal the max outside every path agent and its descendants.
    const std::vector<NodeIndex> full(path.begin() + 1, path.end());
    const Money appendix_revenue = max_excluding_all(net, full);
    if (appendix_revenue != excluded[1]) {
        throw ConsistencyError("IDM_RECON: telescoped revenue " + excluded[1].to_string() +
                               " differs from path-exclusion revenue " + appendix_revenue.to_string());
    }
    return Outcome(MechanismKind::idm_reconstructed, net.id(w), std::move(payments), excluded[1], net.bid(w),
                   to_path(net, path));
}

Outcome run_mechanism(MechanismKind kind, const DiffusionNetwork& net, const TieBreak& tie) {
    switch (kind) {
        case MechanismKind::trdm: return run_trdm(net, tie);
        case MechanismKind::vcg_referral: return run_vcg_referral(net, tie);
        case MechanismKind::spa_direct: return run_spa_direct(net, tie);
        case MechanismKind::idm_reconstructed: return run_idm_reconstructed(net, tie);
        case MechanismKind::custom: break;
    }
    throw std::invalid_argument("run_mechanism: no built-in implementation for CUSTOM");
}

MechanismFn mechanism_fn(MechanismKind kind, TieBreak tie) {
    if (kind == MechanismKind::custom) {
        throw std::invalid_argument("mechanism_fn: CUSTOM mechanisms are supplied by the caller");
    }
    return [kind, tie](const DiffusionNetwork& net) { return run_mechanism(kind, net, tie); };
}

}  // namespace refauction
