#include "refauction/network.hpp"

#include "refauction/errors.hpp"
#include "refauction/random.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <stdexcept>

namespace refauction {

std::optional<NodeIndex> DiffusionNetwork::find(const AgentId& id) const {
    const auto& ids = topo_->ids;
    if (id == ids[0]) {
        return 0;
    }
    auto it = std::lower_bound(ids.begin() + 1, ids.end(), id);
    if (it == ids.end() || *it != id) {
        return std::nullopt;
    }
    return static_cast<NodeIndex>(it - ids.begin());
}

NodeIndex DiffusionNetwork::index_of(const AgentId& id) const {
    if (auto i = find(id)) {
        return *i;
    }
    throw std::invalid_argument("agent '" + id.str() + "' is not in the network");
}

std::span<const NodeIndex> DiffusionNetwork::children(NodeIndex i) const {
    const auto& t = *topo_;
    return {t.child_list.data() + t.child_offsets[i], t.child_offsets[i + 1] - t.child_offsets[i]};
}

std::span<const NodeIndex> DiffusionNetwork::parents(NodeIndex i) const {
    const auto& t = *topo_;
    return {t.parent_list.data() + t.parent_offsets[i], t.parent_offsets[i + 1] - t.parent_offsets[i]};
}

std::set<AgentId> DiffusionNetwork::nodes() const { return {topo_->ids.begin(), topo_->ids.end()}; }

std::set<std::pair<AgentId, AgentId>> DiffusionNetwork::edges() const {
    std::set<std::pair<AgentId, AgentId>> out;
    for (NodeIndex u = 0; u < size(); ++u) {
        for (NodeIndex v : children(u)) {
            out.emplace(id(u), id(v));
        }
    }
    return out;
}

std::map<AgentId, std::uint32_t> DiffusionNetwork::depths() const {
    std::map<AgentId, std::uint32_t> out;
    for (NodeIndex u = 0; u < size(); ++u) {
        out.emplace(id(u), depth(u));
    }
    return out;
}

DiffusionNetwork DiffusionNetwork::with_bids(std::span<const std::pair<NodeIndex, Money>> changes) const {
    DiffusionNetwork copy = *this;
    for (const auto& [i, bid] : changes) {
        if (i == seller_index() || i >= size()) {
            throw std::invalid_argument("with_bids: invalid node index");
        }
        copy.bids_[i] = bid;
    }
    return copy;
}

std::vector<std::uint8_t> DiffusionNetwork::descendant_mask(NodeIndex i) const {
    std::vector<std::uint8_t> mark(size(), 0);
    std::vector<NodeIndex> stack{i};
    while (!stack.empty()) {
        const NodeIndex u = stack.back();
        stack.pop_back();
        for (NodeIndex v : children(u)) {
            if (!mark[v] && v != i) {
                mark[v] = 1;
                stack.push_back(v);
            }
        }
    }
    return mark;
}

Money DiffusionNetwork::max_excluding(NodeIndex i) const {
    const auto mark = descendant_mask(i);
    const Money* best = nullptr;
    for (NodeIndex u = 1; u < size(); ++u) {
        if (u == i || mark[u]) {
            continue;
        }
        if (!best || *best < bids_[u]) {
            best = &bids_[u];
        }
    }
    return best ? *best : Money{};
}

DiffusionNetwork build_network(const Profile& profile) {
    profile.validate();

    std::map<AgentId, std::uint32_t> depth_of;
    std::deque<const AgentId*> queue;
    depth_of.emplace(profile.seller, 0);
    queue.push_back(&profile.seller);
    while (!queue.empty()) {
        const AgentId& u = *queue.front();
        queue.pop_front();
        const std::uint32_t du = depth_of.at(u);
        for (const AgentId& v : profile.at(u).children) {
            auto [it, inserted] = depth_of.emplace(v, du + 1);
            if (inserted) {
                queue.push_back(&it->first);
            }
        }
    }

    auto topo = std::make_shared<DiffusionNetwork::Topology>();
    DiffusionNetwork net;
    topo->ids.reserve(depth_of.size());
    topo->depth.reserve(depth_of.size());
    net.bids_.reserve(depth_of.size());
    topo->ids.push_back(profile.seller);
    topo->depth.push_back(0);
    net.bids_.push_back(Money{});
    for (const auto& [id, d] : depth_of) {
        if (id == profile.seller) {
            continue;
        }
        topo->ids.push_back(id);
        topo->depth.push_back(d);
        net.bids_.push_back(profile.at(id).valuation);
    }

    auto index = [&](const AgentId& id) -> NodeIndex {
        if (id == topo->ids[0]) {
            return 0;
        }
        auto it = std::lower_bound(topo->ids.begin() + 1, topo->ids.end(), id);
        return static_cast<NodeIndex>(it - topo->ids.begin());
    };

    const std::size_t n = topo->ids.size();
    std::vector<std::vector<NodeIndex>> parents(n);
    topo->child_offsets.reserve(n + 1);
    topo->child_offsets.push_back(0);
    for (NodeIndex u = 0; u < n; ++u) {
        for (const AgentId& c : profile.at(topo->ids[u]).children) {
            const NodeIndex v = index(c);
            topo->child_list.push_back(v);
            parents[v].push_back(u);
        }
        auto first = topo->child_list.begin() + topo->child_offsets.back();
        std::sort(first, topo->child_list.end());
        topo->child_offsets.push_back(static_cast<std::uint32_t>(topo->child_list.size()));
    }
    topo->parent_offsets.reserve(n + 1);
    topo->parent_offsets.push_back(0);
    for (NodeIndex v = 0; v < n; ++v) {
        topo->parent_list.insert(topo->parent_list.end(), parents[v].begin(), parents[v].end());
        topo->parent_offsets.push_back(static_cast<std::uint32_t>(topo->parent_list.size()));
    }

    net.topo_ = std::move(topo);
    return net;
}

std::set<AgentId> reachable_excluding(const DiffusionNetwork& net, const AgentId& i) {
    const NodeIndex idx = net.index_of(i);
    if (idx == DiffusionNetwork::seller_index()) {
        throw std::invalid_argument("reachable_excluding: cannot exclude the seller");
    }
    const auto mark = net.descendant_mask(idx);
    std::set<AgentId> out;
    for (NodeIndex u = 1; u < net.size(); ++u) {
        if (u != idx && !mark[u]) {
            out.insert(net.id(u));
        }
    }
    return out;
}

std::set<AgentId> descendants(const DiffusionNetwork& net, const AgentId& i) {
    const NodeIndex idx = net.index_of(i);
    const auto mark = net.descendant_mask(idx);
    std::set<AgentId> out;
    for (NodeIndex u = 0; u < net.size(); ++u) {
        if (mark[u]) {
            out.insert(net.id(u));
        }
    }
    return out;
}

Money max_valuation(const DiffusionNetwork& net, const std::set<AgentId>& subset) {
    Money best;
    for (const AgentId& id : subset) {
        const Money& v = net.valuation(id);
        if (best < v) {
            best = v;
        }
    }
    return best;
}

namespace {

NodeIndex pick(std::vector<NodeIndex>& tied, const TieBreak& tie, std::uint64_t salt) {
    if (tied.size() == 1 || !tie.seed) {
        return tied.front();
    }
    std::mt19937_64 rng(splitmix64(*tie.seed ^ salt));
    return tied[uniform_below(rng, tied.size())];
}

}  // namespace

NodeIndex resolve_winner_index(const DiffusionNetwork& net, const TieBreak& tie) {
    if (net.size() < 2) {
        throw NoBiddersError("no agent besides the seller joined the market");
    }
    std::vector<NodeIndex> tied{1};
    for (NodeIndex u = 2; u < net.size(); ++u) {
        const NodeIndex b = tied.front();
        const auto cmp = net.bid(u) <=> net.bid(b);
        if (cmp > 0 || (cmp == 0 && net.depth(u) < net.depth(b))) {
            tied.assign(1, u);
        } else if (cmp == 0 && net.depth(u) == net.depth(b)) {
            tied.push_back(u);
        }
    }
    return pick(tied, tie, 0x77696e6e6572ULL);
}

AgentId resolve_winner(const DiffusionNetwork& net, const TieBreak& tie) {
    return net.id(resolve_winner_index(net, tie));
}

std::vector<NodeIndex> resolve_winning_path_indices(const DiffusionNetwork& net, NodeIndex w, const TieBreak& tie) {
    const std::size_t n = net.size();
    // on_path[x]: x lies on some shortest seller -> w path.
    std::vector<std::uint8_t> on_path(n, 0);
    std::vector<NodeIndex> stack{w};
    on_path[w] = 1;
    while (!stack.empty()) {
        const NodeIndex x = stack.back();
        stack.pop_back();
        for (NodeIndex p : net.parents(x)) {
            if (!on_path[p] && net.depth(p) + 1 == net.depth(x)) {
                on_path[p] = 1;
                stack.push_back(p);
            }
        }
    }

    auto score = [&](NodeIndex c) {
        // Delete c's shortest continuations towards w, then look at what c still reaches.
        std::vector<std::uint8_t> removed(n, 0);
        std::vector<NodeIndex> work{c};
        while (!work.empty()) {
            const NodeIndex x = work.back();
            work.pop_back();
            for (NodeIndex y : net.children(x)) {
                if (on_path[y] && !removed[y] && net.depth(y) == net.depth(x) + 1) {
                    removed[y] = 1;
                    work.push_back(y);
                }
            }
        }
        std::vector<std::uint8_t> seen(n, 0);
        seen[c] = 1;
        work.push_back(c);
        const Money* best = nullptr;
        while (!work.empty()) {
            const NodeIndex x = work.back();
            work.pop_back();
            for (NodeIndex y : net.children(x)) {
                if (seen[y] || removed[y] || y == DiffusionNetwork::seller_index()) {
                    continue;
                }
                seen[y] = 1;
                if (!best || *best < net.bid(y)) {
                    best = &net.bid(y);
                }
                work.push_back(y);
            }
        }
        return best ? *best : Money{};
    };

    std::vector<NodeIndex> path{DiffusionNetwork::seller_index()};
    NodeIndex u = DiffusionNetwork::seller_index();
    while (u != w) {
        std::vector<NodeIndex> candidates;
        for (NodeIndex c : net.children(u)) {
            if (on_path[c] && net.depth(c) == net.depth(u) + 1) {
                candidates.push_back(c);
            }
        }
        if (candidates.empty()) {
            throw ConsistencyError("winning path lost its way at '" + net.id(u).str() + "'");
        }
        if (candidates.size() > 1) {
            std::vector<NodeIndex> tied;
            Money best_score;
            for (NodeIndex c : candidates) {
                Money s = score(c);
                if (tied.empty() || best_score < s) {
                    best_score = std::move(s);
                    tied.assign(1, c);
                } else if (s == best_score) {
                    tied.push_back(c);
                }
            }
            candidates = std::move(tied);
        }
        u = pick(candidates, tie, 0x70617468ULL + u);
        path.push_back(u);
    }
    return path;
}

WinningPath resolve_winning_path(const DiffusionNetwork& net, const AgentId& w, const TieBreak& tie) {
    WinningPath out;
    for (NodeIndex i : resolve_winning_path_indices(net, net.index_of(w), tie)) {
        out.agents.push_back(net.id(i));
    }
    return out;
}

std::optional<AgentId> WinningPath::next_on_path(const AgentId& id) const {
    for (std::size_t k = 0; k + 1 < agents.size(); ++k) {
        if (agents[k] == id) {
            return agents[k + 1];
        }
    }
    return std::nullopt;
}

std::map<AgentId, AgentId> WinningPath::next_map() const {
    std::map<AgentId, AgentId> out;
    for (std::size_t k = 0; k + 1 < agents.size(); ++k) {
        out.emplace(agents[k], agents[k + 1]);
    }
    return out;
}

bool WinningPath::contains(const AgentId& id) const {
    return std::find(agents.begin(), agents.end(), id) != agents.end();
}

}  // namespace refauction
