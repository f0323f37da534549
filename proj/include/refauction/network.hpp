#pragma once

#include "refauction/money.hpp"
#include "refauction/profile.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace refauction {

using NodeIndex = std::uint32_t;

/// Tie-breaking policy for winner selection and path splitting. Without a
/// seed, ties go to the shallower agent and then to the smaller AgentId;
/// with a seed, remaining ties are drawn from a generator seeded per call.
struct TieBreak {
    std::optional<std::uint64_t> seed;
};

/// The invitation graph G(theta') restricted to agents reachable from the
/// seller. Immutable; copies share the topology.
///
/// Node 0 is always the seller; the remaining nodes are numbered in AgentId
/// order, so index order doubles as the deterministic tie-break order.
class DiffusionNetwork {
public:
    std::size_t size() const { return topo_->ids.size(); }
    static constexpr NodeIndex seller_index() { return 0; }
    const AgentId& seller() const { return topo_->ids[0]; }

    const AgentId& id(NodeIndex i) const { return topo_->ids[i]; }
    std::optional<NodeIndex> find(const AgentId& id) const;
    /// Throws std::invalid_argument when `id` is not in V.
    NodeIndex index_of(const AgentId& id) const;
    bool contains(const AgentId& id) const { return find(id).has_value(); }

    const Money& bid(NodeIndex i) const { return bids_[i]; }
    const Money& valuation(const AgentId& id) const { return bids_[index_of(id)]; }
    std::uint32_t depth(NodeIndex i) const { return topo_->depth[i]; }
    std::uint32_t depth(const AgentId& id) const { return topo_->depth[index_of(id)]; }

    std::span<const NodeIndex> children(NodeIndex i) const;
    std::span<const NodeIndex> parents(NodeIndex i) const;

    std::set<AgentId> nodes() const;
    std::set<std::pair<AgentId, AgentId>> edges() const;
    std::map<AgentId, std::uint32_t> depths() const;

    /// Same topology, some reported valuations replaced.
    DiffusionNetwork with_bids(std::span<const std::pair<NodeIndex, Money>> changes) const;

    /// Marks every node reachable from `i` (excluding `i` itself): D_i^V.
    std::vector<std::uint8_t> descendant_mask(NodeIndex i) const;

    /// v*_{V_{-i}}: the highest bid among agents that are neither the seller,
    /// `i`, nor reachable from `i`. Zero for an empty set.
    Money max_excluding(NodeIndex i) const;

    friend DiffusionNetwork build_network(const Profile& profile);

private:
    DiffusionNetwork() = default;

    struct Topology {
        std::vector<AgentId> ids;
        std::vector<std::uint32_t> depth;
        std::vector<std::uint32_t> child_offsets;
        std::vector<NodeIndex> child_list;
        std::vector<std::uint32_t> parent_offsets;
        std::vector<NodeIndex> parent_list;
    };

    std::shared_ptr<const Topology> topo_;
    std::vector<Money> bids_;
};

/// Seller -> winner path after both tie-break rules.
struct WinningPath {
    std::vector<AgentId> agents;  // seller first, winner last

    const AgentId& winner() const { return agents.back(); }
    /// r_i^*: the successor of `id` on the path, if `id` is a non-winner path node.
    std::optional<AgentId> next_on_path(const AgentId& id) const;
    std::map<AgentId, AgentId> next_map() const;
    bool contains(const AgentId& id) const;

    friend bool operator==(const WinningPath&, const WinningPath&) = default;
};

/// Builds G(theta') from a profile. Unreachable agents are dropped; a child id
/// without an entry raises ValidationError naming the edge.
DiffusionNetwork build_network(const Profile& profile);

/// V_{-i}: agents other than the seller that remain once `i` and every agent
/// reachable from `i` are removed. Throws std::invalid_argument for the seller.
std::set<AgentId> reachable_excluding(const DiffusionNetwork& net, const AgentId& i);

/// D_i^V: every agent reachable from `i`, excluding `i`.
std::set<AgentId> descendants(const DiffusionNetwork& net, const AgentId& i);

/// v*_S, with the empty set mapping to 0.
Money max_valuation(const DiffusionNetwork& net, const std::set<AgentId>& subset);

/// Highest bidder; ties go to the smallest depth, then the TieBreak policy.
/// Throws NoBiddersError when only the seller is in V.
AgentId resolve_winner(const DiffusionNetwork& net, const TieBreak& tie = {});
NodeIndex resolve_winner_index(const DiffusionNetwork& net, const TieBreak& tie = {});

/// Shortest seller -> w path. Where several shortest continuations exist, each
/// candidate next hop c is scored by the highest bid reachable from c once the
/// nodes lying on shortest c -> w continuations are deleted (c excluded); the
/// higher score wins.
WinningPath resolve_winning_path(const DiffusionNetwork& net, const AgentId& w, const TieBreak& tie = {});
std::vector<NodeIndex> resolve_winning_path_indices(const DiffusionNetwork& net, NodeIndex w,
                                                    const TieBreak& tie = {});

}  // namespace refauction
