#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "pfpn/pfpn.hpp"
#include "support/fixtures.hpp"

using namespace pfpn;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(PFPN_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string data(const std::string& name) { return fixtures::data_dir() + "/" + name; }

} // namespace

TEST_CASE("classify reports the running-example goldens with exit 0") {
    auto res = run_cli("classify " + data("deficiency_one.json"));
    CHECK(res.exit_code == 0);
    json j = json::parse(res.out);
    CHECK(j["deficiency"] == 1);
    CHECK(j["weaklyReversible"] == true);
    CHECK(j["isPi2"] == false);
    CHECK(j["witnesses"].is_null());
}

TEST_CASE("reports are byte-for-byte deterministic") {
    auto a = run_cli("classify " + data("regulated.json"));
    auto b = run_cli("classify " + data("regulated.json"));
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
    auto c = run_cli("traffic " + data("regulated.json"));
    auto d = run_cli("traffic " + data("regulated.json"));
    CHECK(c.out == d.out);
}

TEST_CASE("witnesses: exit 0 when present, 1 when absent") {
    CHECK(run_cli("witnesses " + data("regulated.json")).exit_code == 0);
    CHECK(run_cli("witnesses " + data("deficiency_one.json")).exit_code == 1);
}

TEST_CASE("traffic on a non-product-form net exits 1") {
    CHECK(run_cli("traffic " + data("deficiency_one.json")).exit_code == 1);
    auto res = run_cli("traffic " + data("regulated.json"));
    CHECK(res.exit_code == 0);
    json j = json::parse(res.out);
    CHECK(j["residual"].get<double>() < 1e-10);
    CHECK(j.contains("p1")); // flat report: one entry per place plus residual
}

TEST_CASE("semiflow and deficiency reports") {
    auto defres = run_cli("deficiency " + data("deficiency_one.json"));
    CHECK(defres.exit_code == 0);
    CHECK(json::parse(defres.out)["deficiency"] == 1);
    auto sres = run_cli("semiflows " + data("three_level.json") + " --kind s");
    CHECK(sres.exit_code == 0);
    CHECK(json::parse(sres.out)["basis"].size() == 3);
    auto tres = run_cli("semiflows " + data("deficiency_one.json") + " --kind t");
    CHECK(tres.exit_code == 0);
    CHECK(json::parse(tres.out)["basis"].size() == 3);
}

TEST_CASE("unknown subcommand and malformed input exit 2") {
    CHECK(run_cli("frobnicate").exit_code == 2);
    std::ofstream("cli_bad.json") << "{ not json";
    CHECK(run_cli("classify cli_bad.json").exit_code == 2);
    CHECK(run_cli("classify no_such_file.json").exit_code == 2);
    std::remove("cli_bad.json");
}

TEST_CASE("budget exhaustion exits 3") {
    std::ofstream("cli_unbounded.json") << R"({
      "places": [{"name":"p","initial":1}],
      "transitions": [{"name":"grow","rate":1.0,"input":{"p":1},"output":{"p":2}},
                      {"name":"shrink","rate":1.0,"input":{"p":2},"output":{"p":1}}]})";
    CHECK(run_cli("dist cli_unbounded.json --budget 10").exit_code == 3);
    std::remove("cli_unbounded.json");
}

TEST_CASE("the documented reach diagnosis") {
    auto res = run_cli("pi3 reach " + data("three_level.json") + " --target " + data("dead_marking.json"));
    CHECK(res.exit_code == 1);
    json j = json::parse(res.out);
    CHECK(j["reachable"] == false);
    CHECK(j["reason"] == "fails n-condition at level 3");

    auto ok = run_cli("pi3 reach " + data("three_level.json") + " --target " + data("live_marking.json"));
    CHECK(ok.exit_code == 0);
}

TEST_CASE("pi3 live and recognize") {
    CHECK(run_cli("pi3 live " + data("three_level.json") + " --marking " + data("live_marking.json")).exit_code ==
          0);
    CHECK(run_cli("pi3 live " + data("three_level.json") + " --marking " + data("dead_marking.json")).exit_code ==
          1);
    auto rec = run_cli("pi3 recognize " + data("three_level.json"));
    CHECK(rec.exit_code == 0);
    json j = json::parse(rec.out);
    CHECK(j["recognized"] == true);
    CHECK(j["levelCount"] == 3);
    CHECK(j["potentials"]["p3"] == 2);
    CHECK(run_cli("pi3 recognize " + data("deficiency_one.json")).exit_code == 1);
}

TEST_CASE("pi3 normconst defaults to unit weights") {
    auto res = run_cli("pi3 normconst " + data("three_level.json"));
    CHECK(res.exit_code == 0);
    json j = json::parse(res.out);
    Net tlnet = fixtures::load_net("three_level.json");
    auto rg = reachability_graph(tlnet, tlnet.initial);
    CHECK(j["G"].get<double>() == doctest::Approx(static_cast<double>(rg.states.size())));
}

TEST_CASE("counter generation feeds the steady-state oracle") {
    auto gen = run_cli("gen counter -k 3 --out cli_counter.json");
    CHECK(gen.exit_code == 0);
    auto steady = run_cli("oracle steady cli_counter.json");
    CHECK(steady.exit_code == 0);
    json j = json::parse(steady.out);
    CHECK(j.size() == 8);
    double total = 0.0;
    for (const auto& [key, value] : j.items()) total += value.get<double>();
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    std::remove("cli_counter.json");
}

TEST_CASE("oracle live and home") {
    CHECK(run_cli("oracle live " + data("three_level.json") + " --marking " + data("live_marking.json"))
              .exit_code == 0);
    CHECK(run_cli("oracle live " + data("three_level.json") + " --marking " + data("dead_marking.json"))
              .exit_code == 1);
    CHECK(run_cli("oracle home " + data("deficiency_one.json") + " --marking " + data("m_deficiency_one.json"))
              .exit_code == 2); // no such marking file
}

TEST_CASE("out files round-trip through the parser") {
    auto reg = run_cli("regulate " + data("deficiency_one.json") + " --out cli_reg.json");
    CHECK(reg.exit_code == 0);
    Net regulated = parse_net(fixtures::slurp("cli_reg.json"));
    CHECK(json::parse(reg.out) == net_to_json(regulated));
    CHECK(regulated.place_count() == 6);

    auto dec = run_cli("decompose " + data("regulated.json") + " --out cli_script.json");
    CHECK(dec.exit_code == 0);
    auto rep = run_cli("replay cli_script.json --out cli_rebuilt.json");
    CHECK(rep.exit_code == 0);
    Net rebuilt = parse_net(fixtures::slurp("cli_rebuilt.json"));
    CHECK(isomorphic(rebuilt, fixtures::load_net("regulated.json")));

    auto sym = run_cli("symmetrize cli_reg.json --out cli_sym.json");
    CHECK(sym.exit_code == 0);
    CHECK(parse_net(fixtures::slurp("cli_sym.json")) ==
          symmetrize(parse_net(fixtures::slurp("cli_reg.json"))));

    std::remove("cli_reg.json");
    std::remove("cli_script.json");
    std::remove("cli_rebuilt.json");
    std::remove("cli_sym.json");
}

TEST_CASE("rate overrides") {
    auto res = run_cli("oracle steady " + data("deficiency_one.json") + " --rate t1=2.0 --rate t4=2.0");
    CHECK(res.exit_code == 0);
    json j = json::parse(res.out);
    CHECK(j.size() == 3);
    CHECK(run_cli("oracle steady " + data("deficiency_one.json") + " --rate nope=1.0").exit_code == 2);
}

TEST_CASE("rule subcommands") {
    std::ofstream("cli_machine.json") << R"({
      "places": [{"name":"ma"},{"name":"mb"}],
      "transitions": [{"name":"mt","input":{"ma":1},"output":{"mb":1}},
                      {"name":"mu","input":{"mb":1},"output":{"ma":1}}]})";
    auto sadd = run_cli("rule s-add " + data("regulated.json") +
                        " --machine cli_machine.json --out cli_sadd.json");
    CHECK(sadd.exit_code == 0);
    Net grown = parse_net(fixtures::slurp("cli_sadd.json"));
    CHECK(grown.place_count() == 8);

    auto cupd = run_cli("rule c-update cli_sadd.json --complex '{\"ma\":1}'"
                        " --place p1 --lambda 1 --out cli_cupd.json");
    CHECK(cupd.exit_code == 0);
    Net updated = parse_net(fixtures::slurp("cli_cupd.json"));
    CHECK(classify(updated).is_pi2);

    // p-delete demands isolation
    CHECK(run_cli("rule p-delete cli_sadd.json --place p1 --out cli_pdel.json").exit_code == 1);

    std::remove("cli_machine.json");
    std::remove("cli_sadd.json");
    std::remove("cli_cupd.json");
}
