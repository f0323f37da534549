#pragma once

#include "refauction/profile.hpp"

#include <cstdint>
#include <string_view>

namespace refauction {

enum class Topology { tree, dag };

std::string_view topology_name(Topology t);

struct NetworkGenConfig {
    std::uint64_t seed = 0;
    int min_agents = 1;
    int max_agents = 12;
    Topology topology = Topology::tree;
    int branching = 3;  // max out-degree, seller included
    std::int64_t valuation_lo = 0;
    std::int64_t valuation_hi = 20;
    bool distinct_valuations = false;
    int cross_edge_percent = 30;  // dag mode: chance of each eligible extra edge

    /// Throws ValidationError when no profile can satisfy the config.
    void validate() const;
};

/// Random connected profile rooted at "s" with agents a01, a02, ...
///
/// Trees attach each new agent below a uniformly chosen node with spare
/// out-degree. DAG mode then adds extra edges from depth d to depth d + 1,
/// so agents can have several shortest paths but depths never change.
/// Same config, same bytes.
Profile gen_random_network(const NetworkGenConfig& config);

}  // namespace refauction
