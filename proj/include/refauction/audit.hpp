#pragma once

#include "refauction/generator.hpp"
#include "refauction/io.hpp"
#include "refauction/outcome.hpp"
#include "refauction/strategy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace refauction {

/// One asserted check that did not hold. `instance` is the network file of
/// the true profile, so replay_failure() can rerun the check.
struct Failure {
    std::string property;
    std::string mechanism;
    std::string check;
    std::string expected;
    std::string actual;
    std::optional<std::uint64_t> seed;
    Json instance;
};

/// Something recorded but not asserted (VCG deficits, Sybil gains against
/// IDM_RECON, DAG counterexamples to the revenue-bound identity, ...).
struct Finding {
    std::string property;
    std::string note;
    std::optional<std::uint64_t> seed;
    Json instance;
    Json detail;
};

struct PropertyReport {
    std::string property;
    bool asserted = true;
    std::uint64_t instances_checked = 0;
    std::vector<Failure> failures;
    std::vector<Finding> findings;
    std::string bounds;
    double elapsed_seconds = 0;

    bool passed() const { return !asserted || failures.empty(); }
    void absorb(PropertyReport&& other);
    Json to_json() const;
};

/// Truthful run: utilities >= 0 and revenue >= 0 are asserted for TRDM
/// (recorded for VCG_REFERRAL), and the winner must be a reported argmax for
/// TRDM and VCG_REFERRAL.
PropertyReport check_core(MechanismKind kind, const Profile& truth);

/// Revenue <= v*_{V_{-r_s^*}} for every mechanism, equality for TRDM. Also
/// compares the bound with v* outside the whole winning path: must agree on
/// trees, recorded as a finding otherwise.
PropertyReport check_upper_bound(MechanismKind kind, const Profile& truth);

/// Rev TRDM = Rev IDM_RECON, Reward TRDM >= Reward IDM_RECON,
/// Rev TRDM >= Rev VCG_REFERRAL, Rev TRDM >= Rev SPA_DIRECT.
PropertyReport check_comparisons(const Profile& truth);

/// At the equilibrium profile: every agent's bid and fixed-bid referral
/// deviation gains at most epsilon, the top bidder gains nothing, and TRDM
/// revenue matches the truthful revenue (on trees; a DAG mismatch is a
/// finding). Joint referral+bid deviations and
/// the r_s^*-has-highest-utility claim are recorded as findings.
PropertyReport check_epsilon_nash(const Profile& truth, const StrategyConfig& config);

/// Co-optimized referral search for every agent against TRDM on truthful
/// reports; asserts no positive gain.
PropertyReport check_truthful_referral(const Profile& truth, const StrategyConfig& config);

/// Sybil (config.max_fakes) and collusion (config.max_group) searches
/// against TRDM from the equilibrium profile. Gains above delta fail; gains in
/// (0, delta] are recorded as findings, since a fake identity can close the
/// delta gap left by the equilibrium bid through tie-breaking. With
/// `include_idm`, the Sybil search is repeated against IDM_RECON from
/// truthful reports and profitable attacks are recorded.
PropertyReport check_attack_resistance(const Profile& truth, const StrategyConfig& config, bool include_idm = true);

/// Asserts VCG_REFERRAL revenue >= 0. Expected to fail on many networks.
PropertyReport check_vcg_budget_balance(const Profile& truth);

/// Property names accepted by run_suite and the CLI.
const std::vector<std::string>& known_properties();
const std::vector<std::string>& default_properties();

struct SuiteConfig {
    NetworkGenConfig generator;
    std::uint64_t instances = 100;
    std::vector<Topology> topologies{Topology::tree, Topology::dag};  // cycled per instance
    std::vector<std::string> properties = default_properties();
    std::vector<MechanismKind> mechanisms{MechanismKind::trdm};  // for core and upper_bound
    std::optional<Money> delta;                                   // per-instance default when unset
    std::optional<Money> epsilon;
    int max_fakes = 2;
    int max_group = 3;
    bool include_idm_attacks = false;
    unsigned threads = 0;  // 0 = hardware concurrency

    /// Throws ValidationError for unknown properties or bad generator settings.
    void validate() const;
};

struct SuiteReport {
    SuiteConfig config;
    std::vector<PropertyReport> properties;
    double elapsed_seconds = 0;

    bool passed() const;
    std::uint64_t consistency_errors() const;
    Json to_json() const;
    std::string to_text() const;
};

/// Seed of the k-th generated instance.
std::uint64_t instance_seed(std::uint64_t base, std::uint64_t k);
NetworkGenConfig instance_config(const SuiteConfig& config, std::uint64_t k);
StrategyConfig instance_strategy(const SuiteConfig& config, const Profile& truth);

/// Generates config.instances profiles and runs every selected property on
/// each, spread over worker threads. Reports are merged in instance order, so
/// the result does not depend on scheduling.
SuiteReport run_suite(const SuiteConfig& config);

/// Runs one named property on one profile.
PropertyReport run_property(const std::string& property, const Profile& truth, const SuiteConfig& config);

/// Re-runs the check that produced `failure` on its embedded instance.
PropertyReport replay_failure(const Failure& failure, const SuiteConfig& config = {});

}  // namespace refauction
