#include "refauction/strategy.hpp"

#include "refauction/errors.hpp"
#include "refauction/network.hpp"

#include <algorithm>
#include <sstream>

namespace refauction {

namespace {

void sort_unique(std::vector<Money>& values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
}

std::string join_ids(const std::vector<AgentId>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) {
            out += ",";
        }
        out += id.str();
    }
    return out;
}

// Outcome of running the mechanism; an empty market means nobody pays or wins.
Money evaluate(const MechanismFn& mech, const DiffusionNetwork& net, const std::vector<AgentId>& owned,
               const Money& item_value) {
    try {
        return owned_utility(mech(net), owned, item_value);
    } catch (const NoBiddersError&) {
        return Money{};
    }
}

Money evaluate(const MechanismFn& mech, const Profile& reports, const std::vector<AgentId>& owned,
               const Money& item_value) {
    return evaluate(mech, build_network(reports), owned, item_value);
}

// Odometer over `slots` positions, each ranging over `choices` values.
bool advance(std::vector<std::size_t>& counters, std::size_t choices) {
    for (std::size_t k = 0; k < counters.size(); ++k) {
        if (++counters[k] < choices) {
            return true;
        }
        counters[k] = 0;
    }
    return false;
}

DeviationResult make_result(DeviationKind kind, std::vector<AgentId> deviators, const StrategyConfig& config) {
    DeviationResult r;
    r.kind = kind;
    r.deviators = std::move(deviators);
    r.bounds = config.describe_bounds();
    return r;
}

void finish(DeviationResult& r, const Money& tolerance) {
    r.gain = r.deviated_utility - r.baseline_utility;
    r.found = r.gain > tolerance;
}

std::string fresh_id(const Profile& p, const AgentId& owner, int k) {
    std::string base = owner.str() + "~f" + std::to_string(k);
    while (p.contains(AgentId(base))) {
        base += "~";
    }
    return base;
}

}  // namespace

void StrategyConfig::validate() const {
    if (!delta.is_positive()) {
        throw ValidationError("strategy config: delta must be positive");
    }
    if (epsilon.is_negative() || !(epsilon < delta)) {
        throw ValidationError("strategy config: epsilon must satisfy 0 <= epsilon < delta");
    }
    if (bid_grid.empty()) {
        throw ValidationError("strategy config: bid grid is empty");
    }
    for (std::size_t k = 0; k < bid_grid.size(); ++k) {
        if (bid_grid[k].is_negative()) {
            throw ValidationError("strategy config: negative bid " + bid_grid[k].to_string() + " in grid");
        }
        if (k > 0 && !(bid_grid[k - 1] < bid_grid[k])) {
            throw ValidationError("strategy config: bid grid must be strictly ascending");
        }
    }
    if (max_fakes < 0 || max_group < 1) {
        throw ValidationError("strategy config: max_fakes >= 0 and max_group >= 1 required");
    }
}

void StrategyConfig::validate_for(const Profile& truth) const {
    validate();
    auto has = [&](const Money& m) { return std::binary_search(bid_grid.begin(), bid_grid.end(), m); };
    if (!has(Money{})) {
        throw ValidationError("strategy config: bid grid must contain 0");
    }
    for (const auto& [id, type] : truth.entries) {
        if (!has(type.valuation)) {
            throw ValidationError("strategy config: bid grid misses the true valuation of '" + id.str() + "'");
        }
    }
}

std::vector<Money> StrategyConfig::expanded_grid() const {
    std::vector<Money> out;
    out.reserve(bid_grid.size() * 3);
    for (const Money& g : bid_grid) {
        out.push_back(g);
        out.push_back(g + delta);
        if (!(g - delta).is_negative()) {
            out.push_back(g - delta);
        }
    }
    sort_unique(out);
    return out;
}

std::string StrategyConfig::describe_bounds() const {
    std::ostringstream os;
    os << "grid=" << bid_grid.size() << " bids, delta=" << delta << ", epsilon=" << epsilon
       << ", max_fakes=" << max_fakes << ", max_group=" << max_group << ", budget=" << evaluation_budget;
    return os.str();
}

Money default_delta(const Profile& truth) {
    std::vector<Money> values;
    for (const auto& [id, type] : truth.entries) {
        if (id != truth.seller) {
            values.push_back(type.valuation);
        }
    }
    sort_unique(values);
    Money gap;
    for (std::size_t k = 1; k < values.size(); ++k) {
        const Money d = values[k] - values[k - 1];
        if (gap.is_zero() || d < gap) {
            gap = d;
        }
    }
    if (gap.is_zero()) {
        gap = values.empty() || values.back().is_zero() ? Money{1} : values.back();
    }
    return gap / Money{100};
}

std::vector<Money> default_bid_grid(const Profile& truth, const Money& delta) {
    std::vector<Money> values{Money{}};
    for (const auto& [id, type] : truth.entries) {
        values.push_back(type.valuation);
    }
    sort_unique(values);
    std::vector<Money> grid = values;
    for (std::size_t k = 1; k < values.size(); ++k) {
        grid.push_back((values[k - 1] + values[k]) / Money{2});
    }
    for (const Money& v : values) {
        grid.push_back(v + delta);
        if (!(v - delta).is_negative()) {
            grid.push_back(v - delta);
        }
    }
    sort_unique(grid);
    return grid;
}

StrategyConfig default_strategy_config(const Profile& truth) {
    StrategyConfig config;
    config.delta = default_delta(truth);
    config.epsilon = config.delta / Money{2};
    config.bid_grid = default_bid_grid(truth, config.delta);
    return config;
}

Profile equilibrium_reports(const Profile& truth, const StrategyConfig& config) {
    const DiffusionNetwork net = build_network(truth);
    Profile out = truth;
    out.kind = ProfileKind::reported;
    for (NodeIndex u = 1; u < net.size(); ++u) {
        const auto mark = net.descendant_mask(u);
        Money best_below;
        for (NodeIndex x = 1; x < net.size(); ++x) {
            if (mark[x] && best_below < net.bid(x)) {
                best_below = net.bid(x);
            }
        }
        auto& entry = out.entries.at(net.id(u));
        entry.valuation = max_of(entry.valuation, best_below - config.delta);
    }
    return out;
}

std::string_view deviation_kind_name(DeviationKind kind) {
    switch (kind) {
        case DeviationKind::bid: return "bid";
        case DeviationKind::referral: return "referral";
        case DeviationKind::sybil: return "sybil";
        case DeviationKind::collusion: return "collusion";
    }
    return "unknown";
}

Money owned_utility(const Outcome& outcome, const std::vector<AgentId>& owned, const Money& item_value) {
    Money u;
    for (const AgentId& id : owned) {
        u -= outcome.payment(id);
        if (outcome.winner() == id) {
            u += item_value;
        }
    }
    return u;
}

Money replay_deviation(const MechanismFn& mech, const DeviationResult& result) {
    return evaluate(mech, result.deviated_reports, result.owned, result.item_value);
}

DeviationResult bid_deviation_search(const MechanismFn& mech, const Profile& truth, const Profile& baseline,
                                     const AgentId& i, const StrategyConfig& config, const Money& tolerance) {
    config.validate();
    if (i == truth.seller) {
        throw std::invalid_argument("bid_deviation_search: the seller does not bid");
    }
    DeviationResult r = make_result(DeviationKind::bid, {i}, config);
    r.owned = {i};
    r.item_value = truth.at(i).valuation;
    r.deviated_reports = baseline;

    const DiffusionNetwork net = build_network(baseline);
    r.baseline_utility = evaluate(mech, net, r.owned, r.item_value);
    r.deviated_utility = r.baseline_utility;
    r.description = "baseline report";
    const auto idx = net.find(i);
    if (!idx) {
        finish(r, tolerance);
        return r;
    }
    const Money* best_bid = nullptr;
    for (const Money& b : config.expanded_grid()) {
        const std::pair<NodeIndex, Money> change{*idx, b};
        const Money u = evaluate(mech, net.with_bids({&change, 1}), r.owned, r.item_value);
        ++r.evaluations;
        if (r.deviated_utility < u) {
            r.deviated_utility = u;
            best_bid = &b;
        }
    }
    if (best_bid) {
        r.deviated_reports.entries.at(i).valuation = *best_bid;
        r.description = "bid " + best_bid->to_string() + " instead of " + baseline.at(i).valuation.to_string();
    }
    finish(r, tolerance);
    return r;
}

DeviationResult referral_deviation_search(const MechanismFn& mech, const Profile& truth, const Profile& baseline,
                                          const AgentId& i, const StrategyConfig& config, ReferralMode mode,
                                          const Money& tolerance) {
    config.validate();
    if (i == truth.seller) {
        throw std::invalid_argument("referral_deviation_search: the seller is not an agent");
    }
    DeviationResult r = make_result(DeviationKind::referral, {i}, config);
    r.owned = {i};
    r.item_value = truth.at(i).valuation;

    const std::vector<AgentId> children(truth.at(i).children.begin(), truth.at(i).children.end());
    const std::size_t subsets = std::size_t{1} << children.size();
    const std::vector<Money> bids =
        mode == ReferralMode::fixed_bid ? std::vector<Money>{baseline.at(i).valuation} : config.expanded_grid();

    auto reports_for = [&](std::size_t mask) {
        Profile p = baseline;
        auto& entry = p.entries.at(i);
        entry.children.clear();
        for (std::size_t k = 0; k < children.size(); ++k) {
            if (mask >> k & 1U) {
                entry.children.insert(children[k]);
            }
        }
        return p;
    };
    // best utility over `bids` for a given reported child subset
    auto best_over_bids = [&](const Profile& reports, Money& best, const Money*& best_bid) {
        const DiffusionNetwork net = build_network(reports);
        const auto idx = net.find(i);
        best_bid = nullptr;
        if (!idx) {
            best = Money{};
            ++r.evaluations;
            return;
        }
        bool first = true;
        for (const Money& b : bids) {
            const std::pair<NodeIndex, Money> change{*idx, b};
            const Money u = evaluate(mech, net.with_bids({&change, 1}), r.owned, r.item_value);
            ++r.evaluations;
            if (first || best < u) {
                best = u;
                best_bid = &b;
                first = false;
            }
        }
    };

    const std::size_t full = subsets - 1;
    Profile best_reports;
    if (mode == ReferralMode::fixed_bid) {
        best_reports = baseline;
        r.baseline_utility = evaluate(mech, baseline, r.owned, r.item_value);
        ++r.evaluations;
        r.description = "baseline report";
    } else {
        const Money* bid = nullptr;
        best_reports = reports_for(full);
        best_over_bids(best_reports, r.baseline_utility, bid);
        if (bid) {
            best_reports.entries.at(i).valuation = *bid;
        }
        r.description = "full referral, best bid " + best_reports.at(i).valuation.to_string();
    }
    r.deviated_utility = r.baseline_utility;

    for (std::size_t mask = 0; mask < subsets; ++mask) {
        if (mask == full) {
            continue;
        }
        Profile reports = reports_for(mask);
        Money u;
        const Money* bid = nullptr;
        best_over_bids(reports, u, bid);
        if (r.deviated_utility < u) {
            r.deviated_utility = u;
            if (bid) {
                reports.entries.at(i).valuation = *bid;
            }
            std::vector<AgentId> withheld;
            for (std::size_t k = 0; k < children.size(); ++k) {
                if (!(mask >> k & 1U)) {
                    withheld.push_back(children[k]);
                }
            }
            r.description = "withhold {" + join_ids(withheld) + "}, bid " + reports.at(i).valuation.to_string();
            best_reports = std::move(reports);
        }
    }
    r.deviated_reports = std::move(best_reports);
    finish(r, tolerance);
    return r;
}

DeviationResult sybil_deviation_search(const MechanismFn& mech, const Profile& truth, const Profile& baseline,
                                       const AgentId& i, const StrategyConfig& config, const Money& tolerance) {
    config.validate();
    if (i == truth.seller) {
        throw std::invalid_argument("sybil_deviation_search: the seller cannot run fake accounts");
    }
    DeviationResult r = make_result(DeviationKind::sybil, {i}, config);
    r.item_value = truth.at(i).valuation;
    r.owned = {i};
    r.baseline_utility = evaluate(mech, baseline, r.owned, r.item_value);
    r.deviated_utility = r.baseline_utility;
    r.deviated_reports = baseline;
    r.description = "baseline report";
    if (!build_network(baseline).contains(i)) {
        finish(r, tolerance);
        return r;
    }

    const std::vector<AgentId> real_children(baseline.at(i).children.begin(), baseline.at(i).children.end());
    const std::vector<Money> expanded = config.expanded_grid();

    for (int fakes = 0; fakes <= config.max_fakes && !r.truncated; ++fakes) {
        const std::size_t owners = static_cast<std::size_t>(fakes) + 1;
        std::vector<AgentId> owned{i};
        for (int k = 1; k <= fakes; ++k) {
            owned.emplace_back(fresh_id(baseline, i, k));
        }
        const std::vector<Money>& bids = fakes == 0 ? expanded : config.bid_grid;

        // fake k (1-based) hangs below owner parent[k-1] < k
        std::vector<std::size_t> parent(static_cast<std::size_t>(fakes), 0);
        bool more_shapes = true;
        while (more_shapes && !r.truncated) {
            std::vector<std::size_t> assign(real_children.size(), 0);
            bool more_assignments = true;
            while (more_assignments && !r.truncated) {
                Profile reports = baseline;
                reports.entries.at(i).children.clear();
                for (int k = 1; k <= fakes; ++k) {
                    reports.entries[owned[static_cast<std::size_t>(k)]] = AgentType{};
                }
                for (int k = 1; k <= fakes; ++k) {
                    reports.entries.at(owned[parent[static_cast<std::size_t>(k) - 1]])
                        .children.insert(owned[static_cast<std::size_t>(k)]);
                }
                for (std::size_t c = 0; c < real_children.size(); ++c) {
                    reports.entries.at(owned[assign[c]]).children.insert(real_children[c]);
                }
                const DiffusionNetwork net = build_network(reports);
                std::vector<NodeIndex> idx;
                for (const auto& id : owned) {
                    idx.push_back(net.index_of(id));
                }

                std::vector<std::size_t> pick(owners, 0);
                std::vector<std::pair<NodeIndex, Money>> changes(owners);
                do {
                    if (r.evaluations >= config.evaluation_budget) {
                        r.truncated = true;
                        break;
                    }
                    for (std::size_t k = 0; k < owners; ++k) {
                        changes[k] = {idx[k], bids[pick[k]]};
                    }
                    const Money u = evaluate(mech, net.with_bids(changes), owned, r.item_value);
                    ++r.evaluations;
                    if (r.deviated_utility < u) {
                        r.deviated_utility = u;
                        r.deviated_reports = reports;
                        r.owned = owned;
                        std::ostringstream os;
                        os << fakes << " fake(s);";
                        for (std::size_t k = 0; k < owners; ++k) {
                            r.deviated_reports.entries.at(owned[k]).valuation = bids[pick[k]];
                            os << " " << owned[k] << " bids " << bids[pick[k]];
                            if (k > 0) {
                                os << " under " << owned[parent[k - 1]];
                            }
                            os << ";";
                        }
                        for (std::size_t c = 0; c < real_children.size(); ++c) {
                            os << " " << real_children[c] << " invited by " << owned[assign[c]] << ";";
                        }
                        r.description = os.str();
                    }
                } while (advance(pick, bids.size()));

                more_assignments = advance(assign, owners);
            }
            // advance the parent vector: parent[k-1] ranges over 0..k-1
            more_shapes = false;
            for (std::size_t k = 0; k < parent.size(); ++k) {
                if (++parent[k] <= k) {
                    more_shapes = true;
                    break;
                }
                parent[k] = 0;
            }
        }
    }
    finish(r, tolerance);
    return r;
}

DeviationResult collusion_group_search(const MechanismFn& mech, const Profile& truth, const Profile& baseline,
                                       const std::vector<AgentId>& group, const StrategyConfig& config,
                                       const Money& tolerance) {
    config.validate();
    if (group.empty()) {
        throw std::invalid_argument("collusion_group_search: empty group");
    }
    const AgentId& root = group.front();
    const std::set<AgentId> members(group.begin(), group.end());
    if (members.count(truth.seller)) {
        throw std::invalid_argument("collusion_group_search: the seller cannot collude");
    }
    DeviationResult r = make_result(DeviationKind::collusion, group, config);

    {
        const Outcome base = mech(build_network(baseline));
        for (const AgentId& m : group) {
            r.baseline_utility += owned_utility(base, {m}, truth.at(m).valuation);
            r.item_value = max_of(r.item_value, truth.at(m).valuation);
        }
    }
    r.deviated_utility = r.baseline_utility;
    r.deviated_reports = baseline;
    r.owned = group;
    r.description = "baseline report";

    Profile merged = baseline;
    std::set<AgentId> outside_children;
    for (const AgentId& m : group) {
        for (const AgentId& c : baseline.at(m).children) {
            if (!members.count(c)) {
                outside_children.insert(c);
            }
        }
    }
    for (const AgentId& m : group) {
        if (m != root) {
            merged.entries.erase(m);
        }
    }
    merged.entries.at(root).children = outside_children;
    for (auto& [id, type] : merged.entries) {
        if (members.count(id)) {
            continue;
        }
        bool points_inside = false;
        for (auto it = type.children.begin(); it != type.children.end();) {
            if (members.count(*it) && *it != root) {
                it = type.children.erase(it);
                points_inside = true;
            } else {
                ++it;
            }
        }
        if (points_inside) {
            type.children.insert(root);
        }
    }

    const DiffusionNetwork net = build_network(merged);
    const auto idx = net.find(root);
    if (idx) {
        const std::vector<AgentId> owned{root};
        const Money* best_bid = nullptr;
        for (const Money& b : config.expanded_grid()) {
            const std::pair<NodeIndex, Money> change{*idx, b};
            const Money u = evaluate(mech, net.with_bids({&change, 1}), owned, r.item_value);
            ++r.evaluations;
            if (r.deviated_utility < u) {
                r.deviated_utility = u;
                best_bid = &b;
            }
        }
        if (best_bid) {
            merged.entries.at(root).valuation = *best_bid;
            r.deviated_reports = std::move(merged);
            r.owned = owned;
            r.description = "group {" + join_ids(group) + "} acts as " + root.str() + " bidding " +
                            best_bid->to_string();
        }
    }
    finish(r, tolerance);
    return r;
}

std::vector<std::vector<AgentId>> rooted_groups(const Profile& baseline, int max_group) {
    const DiffusionNetwork net = build_network(baseline);
    std::set<std::vector<NodeIndex>> seen;
    std::vector<std::vector<AgentId>> out;

    // key = root followed by the other members in index order
    auto key_of = [](NodeIndex root, std::vector<NodeIndex> rest) {
        std::sort(rest.begin(), rest.end());
        rest.insert(rest.begin(), root);
        return rest;
    };
    std::function<void(NodeIndex, std::vector<NodeIndex>&)> grow = [&](NodeIndex root,
                                                                        std::vector<NodeIndex>& rest) {
        if (!rest.empty()) {
            auto key = key_of(root, rest);
            if (!seen.insert(key).second) {
                return;
            }
            std::vector<AgentId> ids;
            for (NodeIndex u : key) {
                ids.push_back(net.id(u));
            }
            out.push_back(std::move(ids));
        }
        if (static_cast<int>(rest.size()) + 1 >= max_group) {
            return;
        }
        std::vector<NodeIndex> members = rest;
        members.push_back(root);
        for (NodeIndex m : members) {
            for (NodeIndex c : net.children(m)) {
                if (c == root || std::find(rest.begin(), rest.end(), c) != rest.end()) {
                    continue;
                }
                rest.push_back(c);
                grow(root, rest);
                rest.pop_back();
            }
        }
    };
    for (NodeIndex root = 1; root < net.size(); ++root) {
        std::vector<NodeIndex> rest;
        grow(root, rest);
    }
    return out;
}

DeviationResult collusion_deviation_search(const MechanismFn& mech, const Profile& truth, const Profile& baseline,
                                           const StrategyConfig& config, const Money& tolerance) {
    config.validate();
    DeviationResult best = make_result(DeviationKind::collusion, {}, config);
    best.deviated_reports = baseline;
    best.description = "no group";
    std::uint64_t evaluations = 0;
    bool have = false;
    for (const auto& group : rooted_groups(baseline, config.max_group)) {
        if (evaluations >= config.evaluation_budget) {
            best.truncated = true;
            break;
        }
        DeviationResult r = collusion_group_search(mech, truth, baseline, group, config, tolerance);
        evaluations += r.evaluations;
        if (!have || best.gain < r.gain) {
            best = std::move(r);
            have = true;
        }
    }
    const bool truncated = best.truncated;
    best.evaluations = evaluations;
    best.truncated = truncated;
    best.found = best.gain > tolerance;
    return best;
}

}  // namespace refauction
