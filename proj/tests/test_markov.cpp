#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pfpn/pfpn.hpp"
#include "support/fixtures.hpp"
#include "support/gen.hpp"

using namespace pfpn;

namespace {

Net two_state_net(double forward, double backward) {
    return make_net({"a", "b"},
                    {{"t", Bag{{{0, 1}}}, Bag{{{1, 1}}}, forward},
                     {"t_rev", Bag{{{1, 1}}}, Bag{{{0, 1}}}, backward}},
                    Marking({1, 0}));
}

} // namespace

TEST_CASE("generator of a two-state chain") {
    Net net = two_state_net(2.0, 3.0);
    auto rg = reachability_graph(net, net.initial);
    Generator gen = build_generator(net, rg);
    REQUIRE(gen.n == 2);
    CHECK(gen.at(0, 0) == doctest::Approx(-2.0));
    CHECK(gen.at(0, 1) == doctest::Approx(2.0));
    CHECK(gen.at(1, 0) == doctest::Approx(3.0));
    CHECK(gen.at(1, 1) == doctest::Approx(-3.0));
}

TEST_CASE("generator of the running example") {
    Net net = fixtures::load_net("deficiency_one.json");
    auto rg = reachability_graph(net, net.initial);
    Generator gen = build_generator(net, rg);
    REQUIRE(gen.n == 3);
    for (int i = 0; i < 3; ++i) {
        double sum = gen.diagonal[i];
        int off = 0;
        for (const auto& [j, q] : gen.rows[i]) {
            CHECK(q == doctest::Approx(1.0));
            sum += q;
            ++off;
        }
        CHECK(off == 2);
        CHECK(sum == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("parallel transitions between the same markings sum their rates") {
    Net net = parse_net(R"({
      "places": [{"name":"a","initial":2},{"name":"b"}],
      "transitions": [
        {"name":"t","rate":2.0,"input":{"a":2},"output":{"b":2}},
        {"name":"u","rate":0.5,"input":{"a":1},"output":{"b":1}},
        {"name":"t_rev","rate":1.0,"input":{"b":2},"output":{"a":2}},
        {"name":"u_rev","rate":1.0,"input":{"b":1},"output":{"a":1}}]})");
    auto rg = reachability_graph(net, net.initial);
    Generator gen = build_generator(net, rg);
    int s20 = rg.state_of(Marking({2, 0}));
    int s02 = rg.state_of(Marking({0, 2}));
    CHECK(gen.at(s20, s02) == doctest::Approx(2.0)); // only t jumps 2,0 -> 0,2 directly
    CHECK(gen.rows[s20].size() == 2);
}

TEST_CASE("single state graph has the zero generator") {
    Net net = parse_net(R"({"places":[{"name":"p","initial":1}],"transitions":[]})");
    net.rates = std::vector<double>{};
    auto rg = reachability_graph(net, net.initial);
    Generator gen = build_generator(net, rg);
    CHECK(gen.n == 1);
    CHECK(gen.diagonal[0] == 0.0);
}

TEST_CASE("steady state golden values") {
    SUBCASE("symmetric two-state chain") {
        Net net = two_state_net(1.0, 1.0);
        auto ss = steady_state(build_generator(net, reachability_graph(net, net.initial)));
        CHECK(ss.pi[0] == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(ss.pi[1] == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(ss.residual < 1e-10);
    }
    SUBCASE("running example, all rates one") {
        Net net = fixtures::load_net("deficiency_one.json");
        auto ss = steady_state(build_generator(net, reachability_graph(net, net.initial)));
        for (double p : ss.pi) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-10));
        CHECK(ss.residual < 1e-10);
    }
    SUBCASE("detailed balance of an asymmetric two-state chain") {
        Net net = two_state_net(1.0, 2.0);
        auto ss = steady_state(build_generator(net, reachability_graph(net, net.initial)));
        CHECK(ss.pi[0] == doctest::Approx(2.0 / 3).epsilon(1e-10));
        CHECK(ss.pi[1] == doctest::Approx(1.0 / 3).epsilon(1e-10));
    }
}

TEST_CASE("steady state requires a strongly connected graph") {
    Net net = parse_net(R"({
      "places": [{"name":"a","initial":1},{"name":"b"}],
      "transitions": [{"name":"t","rate":1.0,"input":{"a":1},"output":{"b":1}}]})");
    auto rg = reachability_graph(net, net.initial);
    CHECK_THROWS_AS(steady_state(build_generator(net, rg)), error);
}

TEST_CASE("steady state entries are positive and residual small on random nets") {
    std::mt19937 rng(61);
    for (int round = 0; round < 8; ++round) {
        Net net = testgen::random_pi2_net(rng, 8);
        if (net.transition_count() == 0) continue;
        auto m0 = testgen::random_bounded_marking(rng, net, 400);
        if (!m0) continue;
        net.rates = testgen::random_rates(rng, net);
        auto rg = reachability_graph(net, *m0, 500);
        REQUIRE_FALSE(rg.truncated);
        auto ss = steady_state(build_generator(net, rg));
        CHECK(ss.residual < 1e-10);
        for (double p : ss.pi) CHECK(p > 0.0);
    }
}

TEST_CASE("WR nets have strongly connected reachability graphs") {
    std::mt19937 rng(67);
    for (int round = 0; round < 8; ++round) {
        Net net = testgen::random_pi2_net(rng, 8);
        auto m0 = testgen::random_bounded_marking(rng, net, 400);
        if (!m0) continue;
        auto rg = reachability_graph(net, *m0, 500);
        REQUIRE_FALSE(rg.truncated);
        CHECK(strongly_connected_components(rg.adjacency()).count == 1);
    }
}

TEST_CASE("liveness oracle on the three-level example") {
    Net tlnet = fixtures::load_net("three_level.json");
    Marking m1 = fixtures::load_marking("live_marking.json", tlnet);
    Marking m2 = fixtures::load_marking("dead_marking.json", tlnet);
    CHECK(is_live_oracle(tlnet, reachability_graph(tlnet, m1)).live);
    CHECK_FALSE(is_live_oracle(tlnet, reachability_graph(tlnet, m2)).live);
}

TEST_CASE("a never-enabled transition makes the net not live") {
    Net net = parse_net(R"({
      "places": [{"name":"a","initial":1},{"name":"b"},{"name":"c"}],
      "transitions": [
        {"name":"t","input":{"a":1},"output":{"b":1}},
        {"name":"t_rev","input":{"b":1},"output":{"a":1}},
        {"name":"blocked","input":{"c":1},"output":{"a":1}}]})");
    auto rg = reachability_graph(net, net.initial);
    LivenessReport rep = is_live_oracle(net, rg);
    CHECK_FALSE(rep.live);
    CHECK(rep.transition_live[0]);
    CHECK_FALSE(rep.transition_live[2]);
}

TEST_CASE("home markings") {
    SUBCASE("strongly connected graph: every state is a home marking") {
        Net net = fixtures::load_net("deficiency_one.json");
        auto rg = reachability_graph(net, net.initial);
        for (const auto& m : rg.states) CHECK(is_home_marking_oracle(rg, m));
    }
    SUBCASE("two terminal components: no home marking") {
        Net net = parse_net(R"({
          "places": [{"name":"a","initial":1},{"name":"b"},{"name":"c"}],
          "transitions": [
            {"name":"t","input":{"a":1},"output":{"b":1}},
            {"name":"u","input":{"a":1},"output":{"c":1}}]})");
        auto rg = reachability_graph(net, net.initial);
        CHECK_FALSE(is_home_marking_oracle(rg, Marking({0, 1, 0})));
        CHECK_FALSE(is_home_marking_oracle(rg, Marking({0, 0, 1})));
        CHECK_FALSE(is_home_marking_oracle(rg, Marking({1, 0, 0})));
    }
    SUBCASE("WR net from a marking enabling every transition") {
        std::mt19937 rng(71);
        Net net = testgen::random_pi2_net(rng, 6);
        Marking m0(net.place_count());
        for (size_t t = 0; t < net.transition_count(); ++t)
            for (const auto& [p, k] : net.input[t].items) m0[p] = std::max(m0[p], k);
        auto rg = reachability_graph(net, m0, 200000);
        REQUIRE_FALSE(rg.truncated);
        CHECK(is_home_marking_oracle(rg, m0));
    }
}

TEST_CASE("oracle rejects truncated graphs and missing rates") {
    Net net = parse_net(R"({
      "places": [{"name":"p","initial":1}],
      "transitions": [{"name":"grow","input":{"p":1},"output":{"p":2}},
                      {"name":"shrink","input":{"p":2},"output":{"p":1}}]})");
    auto rg = reachability_graph(net, net.initial, 5);
    REQUIRE(rg.truncated);
    Net timed = net;
    timed.rates = std::vector<double>{1.0, 1.0};
    CHECK_THROWS_AS(build_generator(timed, rg), error);
    Net defone = fixtures::load_net("deficiency_one.json");
    defone.rates.reset();
    auto rg1 = reachability_graph(defone, defone.initial);
    CHECK_THROWS_AS(build_generator(defone, rg1), error);
}
