#include "refauction/audit.hpp"

#include "refauction/errors.hpp"
#include "refauction/mechanisms.hpp"
#include "refauction/network.hpp"
#include "refauction/random.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <sstream>
#include <thread>

namespace refauction {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

PropertyReport start_report(std::string property, bool asserted = true) {
    PropertyReport r;
    r.property = std::move(property);
    r.asserted = asserted;
    r.instances_checked = 1;
    return r;
}

void add_failure(PropertyReport& r, const Profile& truth, std::string mechanism, std::string check,
                 std::string expected, std::string actual) {
    r.failures.push_back(Failure{r.property, std::move(mechanism), std::move(check), std::move(expected),
                                 std::move(actual), std::nullopt, profile_to_json(truth)});
}

void add_finding(PropertyReport& r, const Profile& truth, std::string note, Json detail = nullptr) {
    r.findings.push_back(Finding{r.property, std::move(note), std::nullopt, profile_to_json(truth), std::move(detail)});
}

std::string name_of(MechanismKind kind) { return std::string(mechanism_name(kind)); }

bool is_tree(const DiffusionNetwork& net) {
    for (NodeIndex u = 1; u < net.size(); ++u) {
        if (net.parents(u).size() != 1) {
            return false;
        }
    }
    return true;
}

bool distinct_valuations(const Profile& truth) {
    std::vector<Money> values;
    for (const auto& [id, type] : truth.entries) {
        if (id != truth.seller) {
            values.push_back(type.valuation);
        }
    }
    std::sort(values.begin(), values.end());
    return std::adjacent_find(values.begin(), values.end()) == values.end();
}

std::string join_deviators(const DeviationResult& d) {
    std::string out;
    for (const AgentId& id : d.deviators) {
        out += (out.empty() ? "" : ",") + id.str();
    }
    return out.size() > 1 && d.deviators.size() > 1 ? "{" + out + "}" : out;
}

std::vector<AgentId> reachable_agents(const DiffusionNetwork& net) {
    std::vector<AgentId> out;
    for (NodeIndex u = 1; u < net.size(); ++u) {
        out.push_back(net.id(u));
    }
    return out;
}

}  // namespace

void PropertyReport::absorb(PropertyReport&& other) {
    instances_checked += other.instances_checked;
    for (auto& f : other.failures) {
        failures.push_back(std::move(f));
    }
    for (auto& f : other.findings) {
        findings.push_back(std::move(f));
    }
    if (bounds.empty()) {
        bounds = std::move(other.bounds);
    }
    elapsed_seconds += other.elapsed_seconds;
}

Json PropertyReport::to_json() const {
    Json fails = Json::array();
    for (const Failure& f : failures) {
        fails.push_back(Json{{"property", f.property},
                             {"mechanism", f.mechanism},
                             {"check", f.check},
                             {"expected", f.expected},
                             {"actual", f.actual},
                             {"seed", f.seed ? Json(*f.seed) : Json(nullptr)},
                             {"instance", f.instance}});
    }
    Json finds = Json::array();
    for (const Finding& f : findings) {
        finds.push_back(Json{{"property", f.property},
                             {"note", f.note},
                             {"seed", f.seed ? Json(*f.seed) : Json(nullptr)},
                             {"detail", f.detail},
                             {"instance", f.instance}});
    }
    return Json{{"property", property},
                {"asserted", asserted},
                {"passed", passed()},
                {"instances_checked", instances_checked},
                {"bounds", bounds},
                {"failures", fails},
                {"findings", finds},
                {"elapsed_seconds", elapsed_seconds}};
}

PropertyReport check_core(MechanismKind kind, const Profile& truth) {
    const auto start = Clock::now();
    PropertyReport r = start_report("core");
    const DiffusionNetwork net = build_network(truth);
    if (net.size() < 2) {
        r.elapsed_seconds = seconds_since(start);
        return r;
    }
    const Outcome o = run_mechanism(kind, net);
    const std::string mech = name_of(kind);

    if (kind == MechanismKind::trdm) {
        for (const auto& [id, u] : utilities(o, truth)) {
            if (u.is_negative()) {
                add_failure(r, truth, mech, "individual_rationality", "u_" + id.str() + " >= 0", u.to_string());
            }
        }
    }
    if (o.revenue().is_negative()) {
        if (kind == MechanismKind::trdm) {
            add_failure(r, truth, mech, "budget_balance", "revenue >= 0", o.revenue().to_string());
        } else {
            add_finding(r, truth, mech + " revenue " + o.revenue().to_string() + " < 0 (budget balance violated)");
        }
    }
    if (kind == MechanismKind::trdm || kind == MechanismKind::vcg_referral) {
        Money top;
        for (NodeIndex u = 1; u < net.size(); ++u) {
            top = max_of(top, net.bid(u));
        }
        if (o.social_welfare() != top) {
            add_failure(r, truth, mech, "efficiency", "winner bid " + top.to_string(),
                        "winner " + o.winner()->str() + " bid " + o.social_welfare().to_string());
        }
    }
    r.elapsed_seconds = seconds_since(start);
    return r;
}

PropertyReport check_upper_bound(MechanismKind kind, const Profile& truth) {
    const auto start = Clock::now();
    PropertyReport r = start_report("upper_bound");
    const DiffusionNetwork net = build_network(truth);
    if (net.size() < 2) {
        r.elapsed_seconds = seconds_since(start);
        return r;
    }
    const std::string mech = name_of(kind);
    const auto path = resolve_winning_path_indices(net, resolve_winner_index(net));
    const Money bound = net.max_excluding(path[1]);
    const Outcome o = run_mechanism(kind, net);

    if (bound < o.revenue()) {
        add_failure(r, truth, mech, "revenue_bound", "revenue <= " + bound.to_string(), o.revenue().to_string());
    }
    if (kind == MechanismKind::trdm && o.revenue() != bound) {
        add_failure(r, truth, mech, "revenue_reaches_bound", bound.to_string(), o.revenue().to_string());
    }

    const std::vector<NodeIndex> whole(path.begin() + 1, path.end());
    const Money outside_path = max_excluding_all(net, whole);
    if (outside_path != bound) {
        if (is_tree(net)) {
            add_failure(r, truth, mech, "path_bound_identity", bound.to_string(), outside_path.to_string());
        } else {
            add_finding(r, truth,
                        "path_bound_identity: v* without r_s^* is " + bound.to_string() + " but v* without the path is " +
                            outside_path.to_string());
        }
    }
    r.elapsed_seconds = seconds_since(start);
    return r;
}

PropertyReport check_comparisons(const Profile& truth) {
    const auto start = Clock::now();
    PropertyReport r = start_report("comparisons");
    const DiffusionNetwork net = build_network(truth);
    if (net.size() < 2) {
        r.elapsed_seconds = seconds_since(start);
        return r;
    }
    const Outcome trdm = run_trdm(net);
    const Outcome idm = run_idm_reconstructed(net);
    const Outcome vcg = run_vcg_referral(net);
    const Outcome spa = run_spa_direct(net);

    if (trdm.revenue() != idm.revenue()) {
        add_failure(r, truth, "TRDM/IDM_RECON", "revenue_equal", trdm.revenue().to_string(), idm.revenue().to_string());
    }
    if (trdm.total_reward() < idm.total_reward()) {
        add_failure(r, truth, "TRDM/IDM_RECON", "reward_not_lower", ">= " + idm.total_reward().to_string(),
                    trdm.total_reward().to_string());
    }
    if (trdm.revenue() < vcg.revenue()) {
        add_failure(r, truth, "TRDM/VCG_REFERRAL", "revenue_not_lower", ">= " + vcg.revenue().to_string(),
                    trdm.revenue().to_string());
    }
    if (trdm.revenue() < spa.revenue()) {
        add_failure(r, truth, "TRDM/SPA_DIRECT", "revenue_not_lower", ">= " + spa.revenue().to_string(),
                    trdm.revenue().to_string());
    }
    r.elapsed_seconds = seconds_since(start);
    return r;
}

PropertyReport check_epsilon_nash(const Profile& truth, const StrategyConfig& config) {
    const auto start = Clock::now();
    PropertyReport r = start_report("epsilon_nash");
    config.validate_for(truth);
    r.bounds = config.describe_bounds();
    const DiffusionNetwork truth_net = build_network(truth);
    if (truth_net.size() < 2) {
        r.elapsed_seconds = seconds_since(start);
        return r;
    }
    const Profile eq = equilibrium_reports(truth, config);
    const DiffusionNetwork eq_net = build_network(eq);
    const MechanismFn mech = mechanism_fn(MechanismKind::trdm);
    const Outcome eq_outcome = mech(eq_net);
    const Outcome truth_outcome = mech(truth_net);
    if (eq_outcome.revenue() != truth_outcome.revenue()) {
        // On a DAG an agent outside r_s^*'s descendants can still reach a high
        // bidder inside them, so its overbid lands in v*_{V_{-r_s^*}}.
        if (is_tree(truth_net)) {
            add_failure(r, truth, "TRDM", "equilibrium_revenue", truth_outcome.revenue().to_string(),
                        eq_outcome.revenue().to_string());
        } else {
            add_finding(r, truth,
                        "TRDM equilibrium revenue " + eq_outcome.revenue().to_string() + " differs from truthful " +
                            truth_outcome.revenue().to_string() + " on a DAG");
        }
    }

    std::optional<AgentId> top;
    if (distinct_valuations(truth)) {
        top = resolve_winner(truth_net);
    }
    for (const AgentId& i : reachable_agents(truth_net)) {
        const DeviationResult bid = bid_deviation_search(mech, truth, eq, i, config, config.epsilon);
        const DeviationResult ref =
            referral_deviation_search(mech, truth, eq, i, config, ReferralMode::fixed_bid, config.epsilon);
        for (const DeviationResult* d : {&bid, &ref}) {
            if (d->found) {
                add_failure(r, truth, "TRDM", std::string(deviation_kind_name(d->kind)) + "_deviation",
                            "gain <= " + config.epsilon.to_string(),
                            "agent " + i.str() + " gains " + d->gain.to_string() + " by " + d->description);
            }
            if (top == i && d->gain.is_positive()) {
                add_failure(r, truth, "TRDM", "top_bidder_deviation", "gain 0",
                            "top bidder " + i.str() + " gains " + d->gain.to_string() + " by " + d->description);
            }
        }
        const DeviationResult joint =
            referral_deviation_search(mech, truth, eq, i, config, ReferralMode::co_optimized, config.epsilon);
        const Money joint_gain = max_of(joint.deviated_utility, bid.deviated_utility) - bid.baseline_utility;
        if (config.epsilon < joint_gain) {
            add_finding(r, truth, "joint referral+bid deviation by " + i.str() + " gains " + joint_gain.to_string(),
                        deviation_to_json(joint));
        }
    }

    // r_s^* should end up with the highest utility at the equilibrium profile
    if (eq_outcome.winning_path() && eq_outcome.winning_path()->agents.size() >= 2) {
        const AgentId& first = eq_outcome.winning_path()->agents[1];
        const UtilityVector u = utilities(eq_outcome, truth);
        for (const auto& [id, value] : u) {
            if (u.at(first) < value) {
                add_finding(r, truth,
                            "top_utility: " + id.str() + " has utility " + value.to_string() + " above r_s^* " +
                                first.str() + " (" + u.at(first).to_string() + ")");
                break;
            }
        }
    }
    r.elapsed_seconds = seconds_since(start);
    return r;
}

PropertyReport check_truthful_referral(const Profile& truth, const StrategyConfig& config) {
    const auto start = Clock::now();
    PropertyReport r = start_report("referral");
    config.validate_for(truth);
    r.bounds = config.describe_bounds() + ", mode=co_optimized";
    const MechanismFn mech = mechanism_fn(MechanismKind::trdm);
    for (const AgentId& i : reachable_agents(build_network(truth))) {
        const DeviationResult d = referral_deviation_search(mech, truth, truth, i, config, ReferralMode::co_optimized);
        if (d.found) {
            add_failure(r, truth, "TRDM", "truthful_referral", "gain <= 0",
                        "agent " + i.str() + " gains " + d.gain.to_string() + " by " + d.description);
        }
    }
    r.elapsed_seconds = seconds_since(start);
    return r;
}

PropertyReport check_attack_resistance(const Profile& truth, const StrategyConfig& config, bool include_idm) {
    const auto start = Clock::now();
    PropertyReport r = start_report("attack");
    config.validate_for(truth);
    r.bounds = config.describe_bounds();
    const DiffusionNetwork net = build_network(truth);
    if (net.size() < 2) {
        r.elapsed_seconds = seconds_since(start);
        return r;
    }
    const Profile eq = equilibrium_reports(truth, config);
    const MechanismFn trdm = mechanism_fn(MechanismKind::trdm);
    auto assert_result = [&](const DeviationResult& d) {
        if (d.truncated) {
            add_failure(r, truth, "TRDM", std::string(deviation_kind_name(d.kind)) + "_search_truncated",
                        "search completes within budget", std::to_string(d.evaluations) + " evaluations");
        }
        if (d.found) {
            add_failure(r, truth, "TRDM", std::string(deviation_kind_name(d.kind)) + "_attack",
                        "gain <= " + config.delta.to_string(),
                        join_deviators(d) + " gains " + d.gain.to_string() + " by " + d.description);
        } else if (d.gain.is_positive()) {
            // a deeper fake can tie the top descendant's bid and lose the tie,
            // recovering the delta that the equilibrium bid leaves on the table
            add_finding(r, truth,
                        std::string(deviation_kind_name(d.kind)) + " gain " + d.gain.to_string() +
                            " within the delta margin for " + join_deviators(d),
                        deviation_to_json(d));
        }
    };
    for (const AgentId& i : reachable_agents(net)) {
        assert_result(sybil_deviation_search(trdm, truth, eq, i, config, config.delta));
    }
    if (config.max_group >= 2) {
        assert_result(collusion_deviation_search(trdm, truth, eq, config, config.delta));
    }

    if (include_idm) {
        const MechanismFn idm = mechanism_fn(MechanismKind::idm_reconstructed);
        for (const AgentId& i : reachable_agents(net)) {
            const DeviationResult d = sybil_deviation_search(idm, truth, truth, i, config);
            if (d.found) {
                add_finding(r, truth, "IDM_RECON sybil: " + i.str() + " gains " + d.gain.to_string(),
                            deviation_to_json(d));
            }
        }
    }
    r.elapsed_seconds = seconds_since(start);
    return r;
}

PropertyReport check_vcg_budget_balance(const Profile& truth) {
    const auto start = Clock::now();
    PropertyReport r = start_report("vcg_bb");
    const DiffusionNetwork net = build_network(truth);
    if (net.size() >= 2) {
        const Outcome o = run_vcg_referral(net);
        if (o.revenue().is_negative()) {
            add_failure(r, truth, "VCG_REFERRAL", "budget_balance", "revenue >= 0", o.revenue().to_string());
        }
    }
    r.elapsed_seconds = seconds_since(start);
    return r;
}

const std::vector<std::string>& known_properties() {
    static const std::vector<std::string> names{"core",         "upper_bound", "comparisons", "referral",
                                                "epsilon_nash", "attack",      "vcg_bb"};
    return names;
}

const std::vector<std::string>& default_properties() {
    static const std::vector<std::string> names{"core", "upper_bound", "comparisons", "referral", "epsilon_nash"};
    return names;
}

void SuiteConfig::validate() const {
    generator.validate();
    if (topologies.empty()) {
        throw ValidationError("suite: no topology selected");
    }
    if (mechanisms.empty()) {
        throw ValidationError("suite: no mechanism selected");
    }
    for (const auto& p : properties) {
        if (std::find(known_properties().begin(), known_properties().end(), p) == known_properties().end()) {
            throw ValidationError("suite: unknown property '" + p + "'");
        }
    }
    for (MechanismKind kind : mechanisms) {
        if (kind == MechanismKind::custom) {
            throw ValidationError("suite: CUSTOM mechanisms cannot be audited by name");
        }
    }
}

std::uint64_t instance_seed(std::uint64_t base, std::uint64_t k) { return splitmix64(base ^ splitmix64(k)); }

NetworkGenConfig instance_config(const SuiteConfig& config, std::uint64_t k) {
    NetworkGenConfig g = config.generator;
    g.seed = instance_seed(config.generator.seed, k);
    g.topology = config.topologies[k % config.topologies.size()];
    return g;
}

StrategyConfig instance_strategy(const SuiteConfig& config, const Profile& truth) {
    StrategyConfig s = default_strategy_config(truth);
    if (config.delta) {
        s.delta = *config.delta;
        s.epsilon = s.delta / Money{2};
        s.bid_grid = default_bid_grid(truth, s.delta);
    }
    if (config.epsilon) {
        s.epsilon = *config.epsilon;
    }
    s.max_fakes = config.max_fakes;
    s.max_group = config.max_group;
    return s;
}

PropertyReport run_property(const std::string& property, const Profile& truth, const SuiteConfig& config) {
    try {
        if (property == "core" || property == "upper_bound") {
            PropertyReport r;
            r.property = property;
            for (MechanismKind kind : config.mechanisms) {
                PropertyReport one = property == "core" ? check_core(kind, truth) : check_upper_bound(kind, truth);
                r.absorb(std::move(one));
            }
            r.instances_checked = 1;
            return r;
        }
        if (property == "comparisons") {
            return check_comparisons(truth);
        }
        if (property == "referral") {
            return check_truthful_referral(truth, instance_strategy(config, truth));
        }
        if (property == "epsilon_nash") {
            return check_epsilon_nash(truth, instance_strategy(config, truth));
        }
        if (property == "attack") {
            return check_attack_resistance(truth, instance_strategy(config, truth), config.include_idm_attacks);
        }
        if (property == "vcg_bb") {
            return check_vcg_budget_balance(truth);
        }
    } catch (const ConsistencyError& e) {
        PropertyReport r = start_report(property);
        add_failure(r, truth, "", "consistency_error", "accounting identities hold", e.what());
        return r;
    }
    throw ValidationError("unknown property '" + property + "'");
}

bool SuiteReport::passed() const {
    return std::all_of(properties.begin(), properties.end(), [](const PropertyReport& p) { return p.passed(); });
}

std::uint64_t SuiteReport::consistency_errors() const {
    std::uint64_t n = 0;
    for (const auto& p : properties) {
        n += static_cast<std::uint64_t>(std::count_if(p.failures.begin(), p.failures.end(),
                                                      [](const Failure& f) { return f.check == "consistency_error"; }));
    }
    return n;
}

Json SuiteReport::to_json() const {
    Json topo = Json::array();
    for (Topology t : config.topologies) {
        topo.push_back(std::string(topology_name(t)));
    }
    Json mechs = Json::array();
    for (MechanismKind k : config.mechanisms) {
        mechs.push_back(std::string(mechanism_name(k)));
    }
    Json props = Json::array();
    for (const auto& p : properties) {
        props.push_back(p.to_json());
    }
    const NetworkGenConfig& g = config.generator;
    return Json{{"passed", passed()},
                {"suite",
                 Json{{"seed", g.seed},
                      {"instances", config.instances},
                      {"agents", Json::array({g.min_agents, g.max_agents})},
                      {"topologies", topo},
                      {"branching", g.branching},
                      {"valuation_range", Json::array({g.valuation_lo, g.valuation_hi})},
                      {"distinct_valuations", g.distinct_valuations},
                      {"mechanisms", mechs},
                      {"max_fakes", config.max_fakes},
                      {"max_group", config.max_group},
                      {"delta", config.delta ? Json(config.delta->to_string()) : Json("default")},
                      {"epsilon", config.epsilon ? Json(config.epsilon->to_string()) : Json("default")}}},
                {"properties", props},
                {"elapsed_seconds", elapsed_seconds}};
}

std::string SuiteReport::to_text() const {
    std::ostringstream os;
    for (const auto& p : properties) {
        os << (p.passed() ? "PASS " : "FAIL ") << p.property << (p.asserted ? "" : " (recorded)")
           << ": instances=" << p.instances_checked << " failures=" << p.failures.size()
           << " findings=" << p.findings.size();
        if (!p.bounds.empty()) {
            os << " bounds[" << p.bounds << "]";
        }
        os << "\n";
        for (std::size_t k = 0; k < p.failures.size() && k < 3; ++k) {
            const Failure& f = p.failures[k];
            os << "  " << f.check << " (" << f.mechanism << "): expected " << f.expected << ", got " << f.actual;
            if (f.seed) {
                os << " [seed " << *f.seed << "]";
            }
            os << "\n";
        }
    }
    os << (passed() ? "suite passed" : "suite FAILED") << "\n";
    return os.str();
}

SuiteReport run_suite(const SuiteConfig& config) {
    config.validate();
    const auto start = Clock::now();
    SuiteReport report;
    report.config = config;

    const std::size_t count = static_cast<std::size_t>(config.instances);
    std::vector<std::vector<PropertyReport>> per_instance(count);
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= count) {
                return;
            }
            try {
                const NetworkGenConfig g = instance_config(config, k);
                const Profile truth = gen_random_network(g);
                auto& slot = per_instance[k];
                for (const auto& property : config.properties) {
                    PropertyReport r = run_property(property, truth, config);
                    for (auto& f : r.failures) {
                        f.seed = g.seed;
                    }
                    for (auto& f : r.findings) {
                        f.seed = g.seed;
                    }
                    slot.push_back(std::move(r));
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next = count;
            }
        }
    };

    unsigned threads = config.threads ? config.threads : std::max(1U, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    for (const auto& property : config.properties) {
        PropertyReport merged;
        merged.property = property;
        merged.asserted = true;
        report.properties.push_back(std::move(merged));
    }
    for (auto& slot : per_instance) {
        for (std::size_t p = 0; p < slot.size(); ++p) {
            report.properties[p].absorb(std::move(slot[p]));
        }
    }
    for (auto& p : report.properties) {
        if (p.bounds.empty() && (p.property == "attack" || p.property == "epsilon_nash" || p.property == "referral")) {
            p.bounds = "per-instance default grid";
        }
    }
    report.elapsed_seconds = seconds_since(start);
    return report;
}

PropertyReport replay_failure(const Failure& failure, const SuiteConfig& config) {
    const Profile truth = profile_from_json(failure.instance);
    SuiteConfig c = config;
    if (auto kind = parse_mechanism(failure.mechanism)) {
        c.mechanisms = {*kind};
    }
    return run_property(failure.property, truth, c);
}

}  // namespace refauction
