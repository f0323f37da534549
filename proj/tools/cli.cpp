#include "cli.hpp"

#include "refauction/audit.hpp"
#include "refauction/errors.hpp"
#include "refauction/generator.hpp"
#include "refauction/io.hpp"
#include "refauction/mechanisms.hpp"
#include "refauction/network.hpp"
#include "refauction/strategy.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>

namespace refauction::cli {

namespace {

std::optional<std::uint64_t> env_seed() {
    const char* text = std::getenv("REFAUCTION_SEED");
    if (!text || !*text) {
        return std::nullopt;
    }
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text, &end, 10);
    if (*end != '\0') {
        throw ValidationError(std::string("REFAUCTION_SEED is not an unsigned integer: ") + text);
    }
    return v;
}

MechanismKind mechanism_arg(const std::string& text) {
    if (auto kind = parse_mechanism(text)) {
        return *kind;
    }
    throw ValidationError("unknown mechanism '" + text + "' (expected trdm, vcg, spa or idm)");
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << data) || !f.flush()) {
        throw ValidationError(path + ": cannot write file");
    }
}

struct RunArgs {
    std::string file;
    std::string mechanism = "trdm";
    std::vector<std::string> mechanisms{"vcg", "idm", "trdm", "spa"};
    std::string reports = "truthful";
    std::string delta;
    std::string format = "table";
    std::optional<int> scale;
};

std::string render(const std::vector<Outcome>& outcomes, const RunArgs& a, bool single) {
    if (a.format == "json") {
        if (single) {
            return outcome_to_json(outcomes.front()).dump(2) + "\n";
        }
        Json all = Json::array();
        for (const Outcome& o : outcomes) {
            all.push_back(outcome_to_json(o));
        }
        return all.dump(2) + "\n";
    }
    if (a.format == "csv") {
        return render_csv(outcomes, a.scale);
    }
    return render_table(outcomes);
}

Profile reports_for(const Profile& truth, const RunArgs& a) {
    if (a.reports == "truthful") {
        if (!a.delta.empty()) {
            throw ValidationError("--delta only applies to --reports equilibrium");
        }
        return truth;
    }
    StrategyConfig config = default_strategy_config(truth);
    if (!a.delta.empty()) {
        try {
            config.delta = Money::parse(a.delta);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(std::string("--delta: ") + e.what());
        }
        if (!config.delta.is_positive()) {
            throw ValidationError("--delta must be positive");
        }
    }
    return equilibrium_reports(truth, config);
}

int cmd_run(const RunArgs& a, std::ostream& out) {
    const Profile truth = load_network_file(a.file);
    const Profile reports = reports_for(truth, a);
    const Outcome o = run_mechanism(mechanism_arg(a.mechanism), build_network(reports));
    out << render({o}, a, true);
    return kOk;
}

int cmd_compare(const RunArgs& a, std::ostream& out) {
    const Profile truth = load_network_file(a.file);
    const DiffusionNetwork net = build_network(reports_for(truth, a));
    std::vector<Outcome> outcomes;
    for (const auto& m : a.mechanisms) {
        outcomes.push_back(run_mechanism(mechanism_arg(m), net));
    }
    out << render(outcomes, a, false);
    return kOk;
}

struct AuditArgs {
    std::uint64_t seed = 1;
    std::uint64_t instances = 100;
    int min_n = 1;
    int max_n = 12;
    std::string topology = "mixed";
    int branching = 3;
    std::int64_t value_max = 100;
    bool allow_ties = false;
    std::vector<std::string> properties = default_properties();
    std::vector<std::string> mechanisms{"trdm"};
    int max_fakes = 2;
    int max_group = 3;
    bool idm_attacks = false;
    unsigned threads = 0;
    std::string out;
    bool json = false;
};

int cmd_audit(const AuditArgs& a, std::ostream& out) {
    SuiteConfig config;
    config.generator.seed = env_seed().value_or(a.seed);
    config.generator.min_agents = a.min_n;
    config.generator.max_agents = a.max_n;
    config.generator.branching = a.branching;
    config.generator.valuation_lo = 1;
    config.generator.valuation_hi = a.value_max;
    config.generator.distinct_valuations = !a.allow_ties;
    config.instances = a.instances;
    if (a.topology == "tree") {
        config.topologies = {Topology::tree};
    } else if (a.topology == "dag") {
        config.topologies = {Topology::dag};
    }
    config.properties = a.properties;
    config.mechanisms.clear();
    for (const auto& m : a.mechanisms) {
        config.mechanisms.push_back(mechanism_arg(m));
    }
    config.max_fakes = a.max_fakes;
    config.max_group = a.max_group;
    config.include_idm_attacks = a.idm_attacks;
    config.threads = a.threads;
    config.validate();

    const SuiteReport report = run_suite(config);
    if (!a.out.empty()) {
        write_file(a.out, report.to_json().dump(2) + "\n");
    }
    if (a.json) {
        out << report.to_json().dump(2) << "\n";
    } else {
        out << report.to_text();
    }
    return report.passed() ? kOk : kFailed;
}

struct GenArgs {
    std::uint64_t seed = 0;
    int n = 8;
    std::string topology = "tree";
    int branching = 3;
    std::int64_t value_lo = 0;
    std::int64_t value_hi = 20;
    bool distinct = false;
    int cross_edges = 30;
    std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
    NetworkGenConfig g;
    g.seed = env_seed().value_or(a.seed);
    g.min_agents = g.max_agents = a.n;
    g.topology = a.topology == "dag" ? Topology::dag : Topology::tree;
    g.branching = a.branching;
    g.valuation_lo = a.value_lo;
    g.valuation_hi = a.value_hi;
    g.distinct_valuations = a.distinct;
    g.cross_edge_percent = a.cross_edges;
    const std::string text = serialize_network_file(gen_random_network(g));
    if (a.out.empty() || a.out == "-") {
        out << text;
    } else {
        write_file(a.out, text);
    }
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Referral diffusion auctions: run mechanisms, compare outcomes, audit properties", "refauction"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run one mechanism on a network file");
    run_cmd->add_option("file", run.file, "Network file (JSON)")->required();
    run_cmd->add_option("--mechanism,-m", run.mechanism, "trdm | vcg | spa | idm")
        ->check(CLI::IsMember({"trdm", "vcg", "spa", "idm"}));
    run_cmd->add_option("--reports", run.reports, "truthful | equilibrium")
        ->check(CLI::IsMember({"truthful", "equilibrium"}));
    run_cmd->add_option("--delta", run.delta, "Overbidding margin for equilibrium reports (e.g. 1/2)");
    run_cmd->add_option("--format,-f", run.format, "table | json | csv")->check(CLI::IsMember({"table", "json", "csv"}));
    run_cmd->add_option("--scale", run.scale, "Fixed-point digits for csv amounts")->check(CLI::Range(0, 30));

    RunArgs cmp;
    auto* cmp_cmd = app.add_subcommand("compare", "Run several mechanisms side by side");
    cmp_cmd->add_option("file", cmp.file, "Network file (JSON)")->required();
    cmp_cmd->add_option("--mechanisms", cmp.mechanisms, "Mechanisms in row order")
        ->delimiter(',')
        ->check(CLI::IsMember({"trdm", "vcg", "spa", "idm"}));
    cmp_cmd->add_option("--reports", cmp.reports, "truthful | equilibrium")
        ->check(CLI::IsMember({"truthful", "equilibrium"}));
    cmp_cmd->add_option("--delta", cmp.delta, "Overbidding margin for equilibrium reports");
    cmp_cmd->add_option("--format,-f", cmp.format, "table | json | csv")->check(CLI::IsMember({"table", "json", "csv"}));
    cmp_cmd->add_option("--scale", cmp.scale, "Fixed-point digits for csv amounts")->check(CLI::Range(0, 30));

    AuditArgs aud;
    auto* aud_cmd = app.add_subcommand("audit", "Check mechanism properties on generated networks");
    aud_cmd->add_option("--seed", aud.seed, "Base seed (REFAUCTION_SEED overrides)");
    aud_cmd->add_option("--instances", aud.instances, "Number of generated networks");
    aud_cmd->add_option("--min-n", aud.min_n, "Smallest agent count")->check(CLI::NonNegativeNumber);
    aud_cmd->add_option("--max-n", aud.max_n, "Largest agent count")->check(CLI::NonNegativeNumber);
    aud_cmd->add_option("--topology", aud.topology, "tree | dag | mixed")
        ->check(CLI::IsMember({"tree", "dag", "mixed"}));
    aud_cmd->add_option("--branching", aud.branching, "Max out-degree");
    aud_cmd->add_option("--value-max", aud.value_max, "Valuations drawn from 1..value-max");
    aud_cmd->add_flag("--allow-ties", aud.allow_ties, "Allow equal valuations");
    aud_cmd->add_option("--properties", aud.properties, "Comma-separated property names")->delimiter(',');
    aud_cmd->add_option("--mechanisms", aud.mechanisms, "Mechanisms for core/upper_bound")
        ->delimiter(',')
        ->check(CLI::IsMember({"trdm", "vcg", "spa", "idm"}));
    aud_cmd->add_option("--max-fakes", aud.max_fakes, "Sybil bound")->check(CLI::Range(0, 4));
    aud_cmd->add_option("--max-group", aud.max_group, "Collusion bound")->check(CLI::Range(1, 5));
    aud_cmd->add_flag("--idm-attacks", aud.idm_attacks, "Also record Sybil attacks on IDM_RECON");
    aud_cmd->add_option("--threads", aud.threads, "Worker threads (0 = all cores)");
    aud_cmd->add_option("--out", aud.out, "Write the JSON report here");
    aud_cmd->add_flag("--json", aud.json, "Print the JSON report instead of the summary");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a random network file");
    gen_cmd->add_option("--seed", gen.seed, "Seed (REFAUCTION_SEED overrides)");
    gen_cmd->add_option("--n", gen.n, "Number of agents")->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--topology", gen.topology, "tree | dag")->check(CLI::IsMember({"tree", "dag"}));
    gen_cmd->add_option("--branching", gen.branching, "Max out-degree");
    gen_cmd->add_option("--value-lo", gen.value_lo, "Smallest valuation");
    gen_cmd->add_option("--value-hi", gen.value_hi, "Largest valuation");
    gen_cmd->add_flag("--distinct", gen.distinct, "All valuations distinct");
    gen_cmd->add_option("--cross-edges", gen.cross_edges, "Percent chance per extra DAG edge")->check(CLI::Range(0, 100));
    gen_cmd->add_option("--out,-o", gen.out, "Output path (default stdout)");

    std::vector<const char*> argv{"refauction"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (run_cmd->parsed()) {
            return cmd_run(run, out);
        }
        if (cmp_cmd->parsed()) {
            return cmd_compare(cmp, out);
        }
        if (aud_cmd->parsed()) {
            return cmd_audit(aud, out);
        }
        return cmd_gen(gen, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const NoBiddersError& e) {
        err << "error: empty market: " << e.what() << "\n";
        return kFailed;
    } catch (const ConsistencyError& e) {
        err << "internal error: " << e.what() << "\n";
        return kFailed;
    }
}

}  // namespace refauction::cli
