#include "refauction/generator.hpp"

#include "refauction/errors.hpp"
#include "refauction/random.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace refauction {

std::string_view topology_name(Topology t) { return t == Topology::tree ? "tree" : "dag"; }

void NetworkGenConfig::validate() const {
    if (min_agents < 0 || max_agents < min_agents) {
        throw ValidationError("generator: agent range [" + std::to_string(min_agents) + ", " +
                              std::to_string(max_agents) + "] is empty or negative");
    }
    if (max_agents > 9999) {
        throw ValidationError("generator: at most 9999 agents");
    }
    if (branching < 1 && max_agents > 0) {
        throw ValidationError("generator: branching must be >= 1 when agents are requested");
    }
    if (valuation_lo < 0 || valuation_hi < valuation_lo) {
        throw ValidationError("generator: valuation range must satisfy 0 <= lo <= hi");
    }
    if (distinct_valuations && valuation_hi - valuation_lo + 1 < max_agents) {
        throw ValidationError("generator: valuation range too small for " + std::to_string(max_agents) +
                              " distinct valuations");
    }
    if (cross_edge_percent < 0 || cross_edge_percent > 100) {
        throw ValidationError("generator: cross_edge_percent must be within 0..100");
    }
}

Profile gen_random_network(const NetworkGenConfig& config) {
    config.validate();
    std::mt19937_64 rng(splitmix64(config.seed));

    const auto span = static_cast<std::uint64_t>(config.max_agents - config.min_agents) + 1;
    const int n = config.min_agents + static_cast<int>(uniform_below(rng, span));
    const int width = n >= 1000 ? 4 : n >= 100 ? 3 : 2;

    // node 0 is the seller
    std::vector<std::string> names{"s"};
    for (int k = 1; k <= n; ++k) {
        std::string digits = std::to_string(k);
        names.push_back("a" + std::string(static_cast<std::size_t>(width) - digits.size(), '0') + digits);
    }
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n) + 1);
    std::vector<int> depth(static_cast<std::size_t>(n) + 1, 0);

    for (int k = 1; k <= n; ++k) {
        std::vector<int> open;
        for (int p = 0; p < k; ++p) {
            if (static_cast<int>(children[static_cast<std::size_t>(p)].size()) < config.branching) {
                open.push_back(p);
            }
        }
        const int parent = open[uniform_below(rng, open.size())];
        children[static_cast<std::size_t>(parent)].push_back(k);
        depth[static_cast<std::size_t>(k)] = depth[static_cast<std::size_t>(parent)] + 1;
    }

    if (config.topology == Topology::dag) {
        for (int u = 1; u <= n; ++u) {
            for (int p = 1; p <= n; ++p) {
                auto& kids = children[static_cast<std::size_t>(p)];
                if (depth[static_cast<std::size_t>(p)] + 1 != depth[static_cast<std::size_t>(u)] ||
                    std::find(kids.begin(), kids.end(), u) != kids.end() ||
                    static_cast<int>(kids.size()) >= config.branching) {
                    continue;
                }
                if (static_cast<int>(uniform_below(rng, 100)) < config.cross_edge_percent) {
                    kids.push_back(u);
                }
            }
        }
    }

    std::vector<std::int64_t> values;
    const auto range = static_cast<std::uint64_t>(config.valuation_hi - config.valuation_lo) + 1;
    if (config.distinct_valuations) {
        // partial Fisher-Yates over the value range without materializing it
        std::vector<std::pair<std::uint64_t, std::uint64_t>> swapped;
        auto lookup = [&](std::uint64_t pos) {
            for (const auto& [k, v] : swapped) {
                if (k == pos) {
                    return v;
                }
            }
            return pos;
        };
        auto store = [&](std::uint64_t pos, std::uint64_t v) {
            for (auto& [k, w] : swapped) {
                if (k == pos) {
                    w = v;
                    return;
                }
            }
            swapped.emplace_back(pos, v);
        };
        for (std::uint64_t k = 0; k < static_cast<std::uint64_t>(n); ++k) {
            const std::uint64_t pick = k + uniform_below(rng, range - k);
            const std::uint64_t chosen = lookup(pick);
            store(pick, lookup(k));
            values.push_back(config.valuation_lo + static_cast<std::int64_t>(chosen));
        }
    } else {
        for (int k = 0; k < n; ++k) {
            values.push_back(config.valuation_lo + static_cast<std::int64_t>(uniform_below(rng, range)));
        }
    }

    Profile profile;
    profile.seller = AgentId("s");
    for (int k = 0; k <= n; ++k) {
        AgentType type;
        for (int c : children[static_cast<std::size_t>(k)]) {
            type.children.insert(AgentId(names[static_cast<std::size_t>(c)]));
        }
        if (k > 0) {
            type.valuation = Money(values[static_cast<std::size_t>(k) - 1]);
        }
        profile.entries.emplace(AgentId(names[static_cast<std::size_t>(k)]), std::move(type));
    }
    profile.validate();
    return profile;
}

}  // namespace refauction
