#pragma once

#include "refauction/io.hpp"
#include "refauction/profile.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace testsupport {

using refauction::AgentId;
using refauction::Money;
using refauction::Profile;

inline std::string fixture_path(const std::string& name) { return std::string(REFAUCTION_FIXTURE_DIR) + "/" + name; }

inline Profile load_fixture(const std::string& name) { return refauction::load_network_file(fixture_path(name)); }

// ---- straight-line oracles over the raw profile maps ----

inline std::set<AgentId> oracle_reachable(const Profile& p) {
    std::set<AgentId> seen{p.seller};
    std::deque<AgentId> queue{p.seller};
    while (!queue.empty()) {
        AgentId u = queue.front();
        queue.pop_front();
        for (const AgentId& c : p.at(u).children) {
            if (seen.insert(c).second) {
                queue.push_back(c);
            }
        }
    }
    seen.erase(p.seller);
    return seen;
}

inline std::map<AgentId, int> oracle_depths(const Profile& p) {
    std::map<AgentId, int> depth{{p.seller, 0}};
    std::deque<AgentId> queue{p.seller};
    while (!queue.empty()) {
        AgentId u = queue.front();
        queue.pop_front();
        for (const AgentId& c : p.at(u).children) {
            if (!depth.count(c)) {
                depth[c] = depth[u] + 1;
                queue.push_back(c);
            }
        }
    }
    return depth;
}

/// Everything reachable from i by following children (i excluded).
inline std::set<AgentId> oracle_below(const Profile& p, const AgentId& i) {
    std::set<AgentId> out;
    std::vector<AgentId> stack(p.at(i).children.begin(), p.at(i).children.end());
    while (!stack.empty()) {
        AgentId u = stack.back();
        stack.pop_back();
        if (u == i || !out.insert(u).second) {
            continue;
        }
        for (const AgentId& c : p.at(u).children) {
            stack.push_back(c);
        }
    }
    return out;
}

/// max reported value over reachable agents outside `removed` and everything below them.
inline Money oracle_vstar_without(const Profile& p, const std::vector<AgentId>& removed) {
    std::set<AgentId> gone(removed.begin(), removed.end());
    for (const AgentId& r : removed) {
        auto below = oracle_below(p, r);
        gone.insert(below.begin(), below.end());
    }
    Money best;
    for (const AgentId& a : oracle_reachable(p)) {
        if (!gone.count(a) && best < p.at(a).valuation) {
            best = p.at(a).valuation;
        }
    }
    return best;
}

inline std::optional<AgentId> oracle_winner(const Profile& p) {
    const auto depth = oracle_depths(p);
    std::optional<AgentId> w;
    for (const AgentId& a : oracle_reachable(p)) {
        if (!w) {
            w = a;
            continue;
        }
        const Money& va = p.at(a).valuation;
        const Money& vw = p.at(*w).valuation;
        if (vw < va || (va == vw && depth.at(a) < depth.at(*w))) {
            w = a;
        }
    }
    return w;
}

/// All shortest seller -> w paths, by exhaustive DFS over simple paths.
inline std::vector<std::vector<AgentId>> oracle_shortest_paths(const Profile& p, const AgentId& w) {
    std::vector<std::vector<AgentId>> all;
    std::vector<AgentId> cur{p.seller};
    std::set<AgentId> on{p.seller};
    auto dfs = [&](auto&& self, const AgentId& u) -> void {
        if (u == w) {
            all.push_back(cur);
            return;
        }
        for (const AgentId& c : p.at(u).children) {
            if (on.count(c)) {
                continue;
            }
            on.insert(c);
            cur.push_back(c);
            self(self, c);
            cur.pop_back();
            on.erase(c);
        }
    };
    dfs(dfs, p.seller);
    std::size_t best = SIZE_MAX;
    for (const auto& path : all) {
        best = std::min(best, path.size());
    }
    std::vector<std::vector<AgentId>> out;
    for (auto& path : all) {
        if (path.size() == best) {
            out.push_back(path);
        }
    }
    return out;
}

struct OracleOutcome {
    AgentId winner;
    std::map<AgentId, Money> payments;
    Money revenue;
};

/// TRDM computed directly from the definitions along a given path.
inline OracleOutcome oracle_trdm(const Profile& p, const std::vector<AgentId>& path) {
    OracleOutcome o;
    o.winner = path.back();
    o.payments[o.winner] = oracle_vstar_without(p, {o.winner});
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        o.payments[path[k]] = oracle_vstar_without(p, {path[k]}) - oracle_vstar_without(p, {path[k + 1]});
    }
    for (const auto& [id, pay] : o.payments) {
        o.revenue += pay;
    }
    return o;
}

inline OracleOutcome oracle_vcg(const Profile& p, const std::vector<AgentId>& path) {
    OracleOutcome o;
    o.winner = path.back();
    o.payments[o.winner] = oracle_vstar_without(p, {o.winner});
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        o.payments[path[k]] = oracle_vstar_without(p, {path[k]}) - p.at(o.winner).valuation;
    }
    for (const auto& [id, pay] : o.payments) {
        o.revenue += pay;
    }
    return o;
}

/// max(v_i, max below i - delta) on the true profile.
inline Money oracle_equilibrium_bid(const Profile& p, const AgentId& i, const Money& delta) {
    Money below;
    for (const AgentId& d : oracle_below(p, i)) {
        below = refauction::max_of(below, p.at(d).valuation);
    }
    return refauction::max_of(p.at(i).valuation, below - delta);
}

}  // namespace testsupport
