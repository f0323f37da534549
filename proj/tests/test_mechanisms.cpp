#include "refauction/errors.hpp"
#include "refauction/generator.hpp"
#include "refauction/mechanisms.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace refauction;
using namespace testsupport;

namespace {

Profile fixture_a() {
    return ProfileBuilder().seller_children({"a", "c"}).agent("a", 5, {"b"}).agent("b", 9).agent("c", 7).build();
}

Profile chain() { return ProfileBuilder().seller_children({"a"}).agent("a", 5, {"b"}).agent("b", 9).build(); }

using Payments = std::vector<std::pair<AgentId, Money>>;

Payments nonzero(const Outcome& o) {
    Payments out;
    for (const auto& [id, p] : o.payments()) {
        if (!p.is_zero()) {
            out.emplace_back(id, p);
        }
    }
    return out;
}

void expect_matches_oracle(const Outcome& o, const OracleOutcome& want) {
    EXPECT_EQ(o.winner(), want.winner);
    EXPECT_EQ(o.revenue(), want.revenue);
    for (const auto& [id, p] : want.payments) {
        EXPECT_EQ(o.payment(id), p) << id;
    }
    for (const auto& [id, p] : o.payments()) {
        if (!want.payments.count(id)) {
            EXPECT_TRUE(p.is_zero()) << id;
        }
    }
}

}  // namespace

TEST(Trdm, RefNet) {
    const auto o = run_trdm(build_network(load_fixture("figure4.json")));
    EXPECT_EQ(o.winner(), "l"_id);
    EXPECT_EQ(nonzero(o), (Payments{{"b"_id, -2}, {"h"_id, -3}, {"j"_id, -4}, {"l"_id, 15}}));
    EXPECT_EQ(o.social_welfare(), Money(18));
    EXPECT_EQ(o.revenue(), Money(6));
    EXPECT_EQ(o.total_reward(), Money(9));
}

TEST(Trdm, FixtureA) {
    const Profile p = fixture_a();
    const auto o = run_trdm(build_network(p));
    EXPECT_EQ(o.winner(), "b"_id);
    EXPECT_EQ(o.payment("b"_id), Money(7));
    EXPECT_EQ(o.payment("a"_id), Money(0));
    EXPECT_EQ(o.revenue(), Money(7));
    expect_matches_oracle(o, oracle_trdm(p, {"s"_id, "a"_id, "b"_id}));
}

TEST(Trdm, ChainUsesEmptySetConvention) {
    const auto o = run_trdm(build_network(chain()));
    EXPECT_EQ(o.payment("b"_id), Money(5));
    EXPECT_EQ(o.payment("a"_id), Money(-5));
    EXPECT_EQ(o.revenue(), Money(0));
}

TEST(Trdm, EmptyMarket) { EXPECT_THROW(run_trdm(build_network(ProfileBuilder().build())), NoBiddersError); }

TEST(Trdm, BranchNetRewardsFollowThePath) {
    const auto o = run_trdm(build_network(load_fixture("figure3.json")));
    EXPECT_EQ(o.winner(), "l"_id);
    EXPECT_EQ(o.payment("l"_id), Money(12));
    EXPECT_EQ(o.payment("g"_id), Money(-5));
    EXPECT_EQ(o.payment("b"_id), Money(0));
    EXPECT_EQ(o.payment("h"_id), Money(0));
    EXPECT_EQ(o.payment("j"_id), Money(0));
    EXPECT_EQ(o.revenue(), Money(7));
}

TEST(Vcg, FixtureAAndSingleChild) {
    const Profile p = fixture_a();
    const auto o = run_vcg_referral(build_network(p));
    EXPECT_EQ(o.payment("b"_id), Money(7));
    EXPECT_EQ(o.payment("a"_id), Money(-2));
    EXPECT_EQ(o.revenue(), Money(5));
    expect_matches_oracle(o, oracle_vcg(p, {"s"_id, "a"_id, "b"_id}));

    const auto single = run_vcg_referral(build_network(ProfileBuilder().seller_children({"a"}).agent("a", 10).build()));
    EXPECT_EQ(single.payment("a"_id), Money(0));
    EXPECT_EQ(single.revenue(), Money(0));
}

TEST(Vcg, RefNetPaysEveryPathAgentItsMarginalContribution) {
    const auto o = run_vcg_referral(build_network(load_fixture("figure4.json")));
    EXPECT_EQ(o.winner(), "l"_id);
    EXPECT_EQ(nonzero(o), (Payments{{"b"_id, -12}, {"h"_id, -10}, {"j"_id, -7}, {"l"_id, 15}}));
    EXPECT_EQ(o.revenue(), Money(-14));
}

TEST(Spa, FixtureAAndSingleChild) {
    const auto o = run_spa_direct(build_network(fixture_a()));
    EXPECT_EQ(o.winner(), "c"_id);
    EXPECT_EQ(o.payment("c"_id), Money(5));
    EXPECT_EQ(o.revenue(), Money(5));
    EXPECT_EQ(o.total_reward(), Money(0));
    const auto single = run_spa_direct(build_network(chain()));
    EXPECT_EQ(single.winner(), "a"_id);
    EXPECT_EQ(single.revenue(), Money(0));
}

TEST(Spa, TieGoesToSmallerId) {
    const auto o = run_spa_direct(
        build_network(ProfileBuilder().seller_children({"a", "b"}).agent("a", 4).agent("b", 4).build()));
    EXPECT_EQ(o.winner(), "a"_id);
    EXPECT_EQ(o.revenue(), Money(4));
}

TEST(Idm, RefNet) {
    const auto o = run_idm_reconstructed(build_network(load_fixture("figure4.json")));
    EXPECT_EQ(o.winner(), "j"_id);
    EXPECT_EQ(nonzero(o), (Payments{{"b"_id, -2}, {"h"_id, -3}, {"j"_id, 11}}));
    EXPECT_EQ(o.social_welfare(), Money(15));
    EXPECT_EQ(o.revenue(), Money(6));
    EXPECT_EQ(o.total_reward(), Money(5));
}

TEST(Idm, FixtureAAndChain) {
    const auto o = run_idm_reconstructed(build_network(fixture_a()));
    EXPECT_EQ(o.winner(), "a"_id);
    EXPECT_EQ(o.payment("a"_id), Money(7));
    EXPECT_EQ(o.revenue(), Money(7));
    EXPECT_EQ(o.social_welfare(), Money(5));

    const auto c = run_idm_reconstructed(build_network(chain()));
    EXPECT_EQ(c.winner(), "a"_id);
    EXPECT_EQ(c.payment("a"_id), Money(0));
    EXPECT_EQ(c.revenue(), Money(0));
    EXPECT_EQ(c.social_welfare(), Money(5));
}

TEST(Idm, TopBidderAtDepthOneKeepsTheItem) {
    const auto direct = run_idm_reconstructed(
        build_network(ProfileBuilder().seller_children({"a", "c"}).agent("a", 9).agent("c", 3).build()));
    EXPECT_EQ(direct.winner(), "a"_id);
    EXPECT_EQ(direct.payment("a"_id), Money(3));
}

TEST(Outcome, RejectsInconsistentRevenue) {
    EXPECT_THROW(Outcome(MechanismKind::custom, "a"_id, {{"a"_id, 5}}, Money(4), Money(9), std::nullopt),
                 ConsistencyError);
    EXPECT_THROW(Outcome(MechanismKind::custom, "a"_id, {{"a"_id, 5}, {"a"_id, 0}}, Money(5), Money(9), std::nullopt),
                 ConsistencyError);
}

TEST(Utilities, RefNetAndFixtureA) {
    const Profile fig4 = load_fixture("figure4.json");
    const auto u4 = utilities(run_trdm(build_network(fig4)), fig4);
    EXPECT_EQ(u4.at("l"_id), Money(3));
    EXPECT_EQ(u4.at("c"_id), Money(0));
    EXPECT_EQ(u4.at("b"_id), Money(2));

    const Profile a = fixture_a();
    const auto ua = utilities(run_trdm(build_network(a)), a);
    EXPECT_EQ(ua, (UtilityVector{{"a"_id, 0}, {"b"_id, 2}, {"c"_id, 0}}));
}

TEST(Utilities, UnknownAgentIsRejected) {
    const auto o = run_trdm(build_network(fixture_a()));
    const Profile other = ProfileBuilder().seller_children({"a"}).agent("a", 1).build();
    EXPECT_THROW(utilities(o, other), ValidationError);
}

TEST(MechanismNames, RoundTrip) {
    for (auto kind : {MechanismKind::trdm, MechanismKind::vcg_referral, MechanismKind::spa_direct,
                      MechanismKind::idm_reconstructed}) {
        EXPECT_EQ(parse_mechanism(mechanism_short_name(kind)), kind);
        EXPECT_EQ(parse_mechanism(mechanism_name(kind)), kind);
    }
    EXPECT_EQ(parse_mechanism("cdm"), std::nullopt);
}

// ---- properties over generated networks ----

class MechanismProperties : public ::testing::TestWithParam<Topology> {};

TEST_P(MechanismProperties, MatchOracleAndInvariants) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        NetworkGenConfig g;
        g.seed = seed;
        g.min_agents = 1;
        g.max_agents = 12;
        g.topology = GetParam();
        g.valuation_hi = seed % 2 ? 10 : 100;
        const Profile p = gen_random_network(g);
        const auto net = build_network(p);
        const auto trdm = run_trdm(net);
        const auto idm = run_idm_reconstructed(net);
        const auto vcg = run_vcg_referral(net);
        const auto spa = run_spa_direct(net);
        const auto& path = trdm.winning_path()->agents;

        expect_matches_oracle(trdm, oracle_trdm(p, path));
        expect_matches_oracle(vcg, oracle_vcg(p, path));
        EXPECT_EQ(trdm.revenue(), oracle_vstar_without(p, {path[1]})) << "seed " << seed;
        EXPECT_EQ(trdm.revenue(), oracle_vstar_without(p, std::vector<AgentId>(path.begin() + 1, path.end())));
        EXPECT_EQ(trdm.revenue(), idm.revenue()) << "seed " << seed;
        EXPECT_GE(trdm.total_reward(), idm.total_reward()) << "seed " << seed;
        EXPECT_GE(trdm.revenue(), vcg.revenue()) << "seed " << seed;
        EXPECT_GE(trdm.revenue(), spa.revenue()) << "seed " << seed;
        EXPECT_FALSE(trdm.revenue().is_negative());
        EXPECT_EQ(trdm.social_welfare(), p.at(*oracle_winner(p)).valuation);
        for (const auto& [id, u] : utilities(trdm, p)) {
            EXPECT_FALSE(u.is_negative()) << id << " seed " << seed;
        }
        // IDM winner is the top bidder's predecessor unless the top bidder is a seller child
        const AgentId expected_idm = path.size() > 2 ? path[path.size() - 2] : path.back();
        EXPECT_EQ(idm.winner(), expected_idm);
        // agents off the path pay nothing
        for (const auto& [id, pay] : trdm.payments()) {
            EXPECT_TRUE(trdm.winning_path()->contains(id));
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Topologies, MechanismProperties, ::testing::Values(Topology::tree, Topology::dag),
                         [](const auto& info) { return std::string(topology_name(info.param)); });

TEST(MechanismProperties, SeededTieBreakStillEfficient) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        NetworkGenConfig g;
        g.seed = seed;
        g.max_agents = 10;
        g.topology = Topology::dag;
        g.valuation_hi = 3;
        const auto net = build_network(gen_random_network(g));
        if (net.size() < 2) {
            continue;
        }
        const auto o = run_trdm(net, TieBreak{seed});
        EXPECT_EQ(o.social_welfare(), run_trdm(net).social_welfare());
        EXPECT_FALSE(o.revenue().is_negative());
    }
}
