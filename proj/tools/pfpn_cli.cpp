// Command-line front-end: structural classification, synthesis rules,
// regulation, product-form solving, Pi^3 analysis, and the brute-force
// Markov-chain oracle over explicit reachability graphs.
//
// Exit codes: 0 success, 1 analyzed property false, 2 input/format error,
// 3 exploration budget exceeded.

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfpn/pfpn.hpp"

namespace {

using nlohmann::json;
using namespace pfpn;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail_input("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Net load_net(const std::string& path) { return parse_net(slurp(path)); }

Marking load_marking(const std::string& path, const Net& net) {
    return marking_from_json(parse_json(slurp(path)), net);
}

void emit(const json& report) { std::cout << report.dump(2) << "\n"; }

void write_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail_input("cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_net(const std::string& path, const Net& net) {
    json j = net_to_json(net);
    if (!path.empty()) write_file(path, j);
    emit(j);
}

std::vector<double> rates_with_overrides(const Net& net,
                                         const std::vector<std::string>& overrides) {
    std::vector<std::optional<double>> r(net.transition_count());
    if (net.rates)
        for (size_t t = 0; t < net.transition_count(); ++t) r[t] = (*net.rates)[t];
    for (const std::string& o : overrides) {
        auto eq = o.find('=');
        if (eq == std::string::npos) fail_input("rate override must look like t1=2.5");
        int t = net.transition_index(o.substr(0, eq));
        if (t < 0) fail_input("unknown transition in rate override: " + o.substr(0, eq));
        double v = std::strtod(o.c_str() + eq + 1, nullptr);
        if (!(v > 0)) fail_input("rate override must be positive");
        r[t] = v;
    }
    std::vector<double> out;
    for (size_t t = 0; t < net.transition_count(); ++t) {
        if (!r[t]) fail_input("no rate for transition " + net.transitions[t]);
        out.push_back(*r[t]);
    }
    return out;
}

json structural_report(const Net& net) {
    StructuralReport rep = classify(net);
    ShapeReport shape = classify_shape(net);
    ReactionGraph g = reaction_graph(net);
    json j;
    j["weaklyReversible"] = rep.weakly_reversible;
    j["deficiency"] = rep.deficiency;
    j["rankW"] = rep.rank_w;
    j["complexCount"] = rep.complex_count;
    j["componentCount"] = rep.component_count;
    j["isPi2"] = rep.is_pi2;
    j["shape"] = {{"stateMachine", shape.is_state_machine},
                  {"markedGraph", shape.is_marked_graph},
                  {"freeChoice", shape.is_free_choice},
                  {"symmetric", shape.is_symmetric}};
    if (rep.witnesses) {
        json w = json::object();
        for (size_t c = 0; c < g.size(); ++c)
            w[complex_name(net, g.complexes[c])] = rational_vector_to_json(net, (*rep.witnesses)[c]);
        j["witnesses"] = std::move(w);
    } else {
        j["witnesses"] = nullptr;
    }
    return j;
}

json pi3_report(const Net& net, const Recognition& rec) {
    json j;
    j["recognized"] = rec.ok;
    if (!rec.ok) {
        j["reason"] = rec.reason;
        return j;
    }
    const LevelStructure& ls = rec.ls;
    j["levelCount"] = ls.n;
    json levels = json::array();
    for (int i = 1; i <= ls.n; ++i) {
        json lvl;
        lvl["level"] = i;
        for (int p : ls.level_places[i - 1]) lvl["places"].push_back(net.places[p]);
        lvl["transitions"] = json::array();
        for (int t : ls.level_transitions[i - 1]) lvl["transitions"].push_back(net.transitions[t]);
        json order = json::array();
        for (int p : ls.place_order[i - 1]) order.push_back(net.places[p]);
        lvl["placesByPotential"] = std::move(order);
        levels.push_back(std::move(lvl));
    }
    j["levels"] = std::move(levels);
    json pots = json::object();
    for (size_t p = 0; p < net.place_count(); ++p) pots[net.places[p]] = ls.potential[p];
    j["potentials"] = std::move(pots);
    json v = json::array();
    for (int i = 0; i < ls.n; ++i) {
        json row = json::object();
        for (size_t p = 0; p < net.place_count(); ++p)
            if (ls.v[i][p] != 0) row[net.places[p]] = ls.v[i][p];
        v.push_back(std::move(row));
    }
    j["V"] = std::move(v);
    j["C"] = s_invariant_values(ls, net.initial);
    return j;
}

json distribution_report(const ReachabilityGraph& rg, const std::vector<double>& pi) {
    json j = json::object();
    for (size_t s = 0; s < rg.states.size(); ++s)
        j[marking_key(rg.states[s])] = report_number(pi[s]);
    return j;
}

LevelStructure recognize_or_fail(const Net& net) {
    Recognition rec = recognize(net);
    if (!rec.ok) fail_property("not a Pi^3 net: " + rec.reason);
    return rec.ls;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Analysis and synthesis of product-form Markovian Petri nets"};
    app.require_subcommand(1);
    argv = app.ensure_utf8(argv);

    std::string net_path, out_path, marking_path, target_path, u_path, mbar0_path,
        machine_path, complex_json, place_name, kind = "s", from_path;
    long long lambda = 0;
    size_t budget = kDefaultStateBudget;
    int counter_bits = 1;
    std::vector<std::string> rate_overrides;

    auto add_net = [&](CLI::App* cmd) {
        cmd->add_option("net", net_path, "net JSON file")->required();
    };
    auto add_rates = [&](CLI::App* cmd) {
        cmd->add_option("--rate", rate_overrides, "override a rate, e.g. --rate t1=2.5");
    };

    auto* c_classify = app.add_subcommand("classify", "structural report");
    add_net(c_classify);
    auto* c_def = app.add_subcommand("deficiency", "deficiency only");
    add_net(c_def);
    auto* c_wit = app.add_subcommand("witnesses", "witness of every complex, if any");
    add_net(c_wit);
    auto* c_semi = app.add_subcommand("semiflows", "semi-flow basis");
    add_net(c_semi);
    c_semi->add_option("--kind", kind, "s or t")->check(CLI::IsMember({"s", "t"}));

    auto* c_reg = app.add_subcommand("regulate", "compose a net with its reaction net");
    add_net(c_reg);
    c_reg->add_option("--mbar0", mbar0_path, "marking file for the complex places");
    c_reg->add_option("--out", out_path, "output net file");

    auto* c_rule = app.add_subcommand("rule", "apply one synthesis rule");
    c_rule->require_subcommand(1);
    auto* r_sadd = c_rule->add_subcommand("s-add", "insert a strongly connected state machine");
    add_net(r_sadd);
    r_sadd->add_option("--machine", machine_path, "machine net file")->required();
    r_sadd->add_option("--out", out_path, "output net file");
    auto* r_cupd = c_rule->add_subcommand("c-update", "replace complex c by c + lambda p");
    add_net(r_cupd);
    r_cupd->add_option("--complex", complex_json, "complex as JSON, e.g. '{\"p1\":2}'")->required();
    r_cupd->add_option("--place", place_name, "place to add")->required();
    r_cupd->add_option("--lambda", lambda, "signed multiplicity")->required();
    r_cupd->add_option("--out", out_path, "output net file");
    auto* r_pdel = c_rule->add_subcommand("p-delete", "delete an isolated place");
    add_net(r_pdel);
    r_pdel->add_option("--place", place_name, "place to delete")->required();
    r_pdel->add_option("--out", out_path, "output net file");

    auto* c_dec = app.add_subcommand("decompose", "rule script rebuilding a Pi^2 net");
    add_net(c_dec);
    c_dec->add_option("--out", out_path, "output script file");
    auto* c_rep = app.add_subcommand("replay", "replay a rule script from the empty net");
    c_rep->add_option("script", net_path, "script JSON file")->required();
    c_rep->add_option("--out", out_path, "output net file");
    auto* c_sym = app.add_subcommand("symmetrize", "add missing reverse transitions");
    add_net(c_sym);
    c_sym->add_option("--out", out_path, "output net file");

    auto* c_traffic = app.add_subcommand("traffic", "solve the traffic equations");
    add_net(c_traffic);
    add_rates(c_traffic);
    auto* c_dist = app.add_subcommand("dist", "product-form stationary distribution");
    add_net(c_dist);
    add_rates(c_dist);
    c_dist->add_option("--budget", budget, "state budget");

    auto* c_pi3 = app.add_subcommand("pi3", "Pi^3 analysis");
    c_pi3->require_subcommand(1);
    auto* p_rec = c_pi3->add_subcommand("recognize", "level structure, potentials, invariants");
    add_net(p_rec);
    auto* p_live = c_pi3->add_subcommand("live", "liveness via the n-condition");
    add_net(p_live);
    p_live->add_option("--marking", marking_path, "marking file (default: initial marking)");
    auto* p_reach = c_pi3->add_subcommand("reach", "reachability via invariants + n-condition");
    add_net(p_reach);
    p_reach->add_option("--target", target_path, "target marking file")->required();
    p_reach->add_option("--marking", marking_path, "source marking (default: initial marking)");
    auto* p_norm = c_pi3->add_subcommand("normconst", "normalising constant by dynamic programming");
    add_net(p_norm);
    p_norm->add_option("--u", u_path, "place weights file (default: all ones)");
    p_norm->add_option("--marking", marking_path, "initial marking file (default: net marking)");

    auto* c_oracle = app.add_subcommand("oracle", "brute-force Markov-chain oracle");
    c_oracle->require_subcommand(1);
    auto* o_steady = c_oracle->add_subcommand("steady", "stationary distribution");
    add_net(o_steady);
    add_rates(o_steady);
    o_steady->add_option("--budget", budget, "state budget");
    auto* o_live = c_oracle->add_subcommand("live", "liveness on the reachability graph");
    add_net(o_live);
    o_live->add_option("--marking", marking_path, "initial marking file");
    o_live->add_option("--budget", budget, "state budget");
    auto* o_home = c_oracle->add_subcommand("home", "home-marking test");
    add_net(o_home);
    o_home->add_option("--marking", marking_path, "marking to test")->required();
    o_home->add_option("--from", from_path, "initial marking file");
    o_home->add_option("--budget", budget, "state budget");

    auto* c_gen = app.add_subcommand("gen", "benchmark generators");
    c_gen->require_subcommand(1);
    auto* g_counter = c_gen->add_subcommand("counter", "k-bit counter net");
    g_counter->add_option("-k", counter_bits, "bit count")->required();
    g_counter->add_option("--out", out_path, "output net file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // unknown subcommand or bad usage
    }

    if (app.got_subcommand(c_classify)) {
        emit(structural_report(load_net(net_path)));
    } else if (app.got_subcommand(c_def)) {
        Net net = load_net(net_path);
        StructuralReport rep = classify(net);
        emit({{"deficiency", rep.deficiency},
              {"complexCount", rep.complex_count},
              {"componentCount", rep.component_count},
              {"rankW", rep.rank_w}});
    } else if (app.got_subcommand(c_wit)) {
        Net net = load_net(net_path);
        json j = structural_report(net);
        emit({{"witnesses", j["witnesses"]}});
        return j["witnesses"].is_null() ? 1 : 0;
    } else if (app.got_subcommand(c_semi)) {
        Net net = load_net(net_path);
        auto basis = semiflow_basis(net, kind == "s" ? SemiflowKind::S : SemiflowKind::T);
        json arr = json::array();
        for (const RatVec& v : basis) {
            json row = json::object();
            for (size_t i = 0; i < v.size(); ++i) {
                if (v[i].is_zero()) continue;
                const std::string& name =
                    kind == "s" ? net.places[i] : net.transitions[i];
                row[name] = v[i].str();
            }
            arr.push_back(std::move(row));
        }
        emit({{"kind", kind}, {"basis", std::move(arr)}});
    } else if (app.got_subcommand(c_reg)) {
        Net net = load_net(net_path);
        Net result;
        if (!mbar0_path.empty()) {
            json mj = parse_json(slurp(mbar0_path));
            std::map<std::string, long long> mbar0;
            for (auto it = mj.begin(); it != mj.end(); ++it)
                mbar0[it.key()] = it.value().get<long long>();
            result = regulate(net, &mbar0);
        } else {
            result = regulate(net);
        }
        write_net(out_path, result);
    } else if (app.got_subcommand(c_rule)) {
        Net net = load_net(net_path);
        Net result;
        if (c_rule->got_subcommand(r_sadd)) {
            result = apply_s_add(net, load_net(machine_path));
        } else if (c_rule->got_subcommand(r_cupd)) {
            json cj = parse_json(complex_json);
            Bag c;
            for (auto it = cj.begin(); it != cj.end(); ++it) {
                int p = net.place_index(it.key());
                if (p < 0) fail_input("unknown place in complex: " + it.key());
                c.set(p, it.value().get<long long>());
            }
            int p = net.place_index(place_name);
            if (p < 0) fail_input("unknown place: " + place_name);
            result = apply_c_update(net, c, p, lambda);
        } else {
            int p = net.place_index(place_name);
            if (p < 0) fail_input("unknown place: " + place_name);
            result = apply_p_delete(net, p);
        }
        write_net(out_path, result);
    } else if (app.got_subcommand(c_dec)) {
        Net net = load_net(net_path);
        json j = script_to_json(decompose(net));
        if (!out_path.empty()) write_file(out_path, j);
        emit(j);
    } else if (app.got_subcommand(c_rep)) {
        RuleScript script = script_from_json(parse_json(slurp(net_path)));
        write_net(out_path, replay(script));
    } else if (app.got_subcommand(c_sym)) {
        write_net(out_path, symmetrize(load_net(net_path)));
    } else if (app.got_subcommand(c_traffic)) {
        Net net = load_net(net_path);
        ProductFormSolution sol = solve_traffic(net, rates_with_overrides(net, rate_overrides));
        json j = json::object();
        for (size_t p = 0; p < net.place_count(); ++p)
            j[net.places[p]] = report_number(sol.u[p]);
        j["residual"] = report_number(sol.residual);
        emit(j);
    } else if (app.got_subcommand(c_dist)) {
        Net net = load_net(net_path);
        auto rates = rates_with_overrides(net, rate_overrides);
        auto rg = reachability_graph(net, net.initial, budget);
        if (rg.truncated) fail_budget("state budget exceeded");
        emit(distribution_report(rg, stationary_by_product_form(net, rates, rg)));
    } else if (app.got_subcommand(c_pi3)) {
        Net net = load_net(net_path);
        if (c_pi3->got_subcommand(p_rec)) {
            Recognition rec = recognize(net);
            emit(pi3_report(net, rec));
            return rec.ok ? 0 : 1;
        } else if (c_pi3->got_subcommand(p_live)) {
            LevelStructure ls = recognize_or_fail(net);
            Marking m = marking_path.empty() ? net.initial : load_marking(marking_path, net);
            bool live = is_live(ls, m);
            emit({{"live", live}});
            return live ? 0 : 1;
        } else if (c_pi3->got_subcommand(p_reach)) {
            LevelStructure ls = recognize_or_fail(net);
            Marking m0 = marking_path.empty() ? net.initial : load_marking(marking_path, net);
            Marking target = load_marking(target_path, net);
            auto [reachable, reason] = is_reachable_explained(ls, m0, target);
            json j = {{"reachable", reachable}};
            if (!reachable) j["reason"] = reason;
            emit(j);
            return reachable ? 0 : 1;
        } else {
            LevelStructure ls = recognize_or_fail(net);
            Marking m0 = marking_path.empty() ? net.initial : load_marking(marking_path, net);
            std::vector<double> u(net.place_count(), 1.0);
            if (!u_path.empty()) {
                json uj = parse_json(slurp(u_path));
                for (auto it = uj.begin(); it != uj.end(); ++it) {
                    int p = net.place_index(it.key());
                    if (p < 0) fail_input("unknown place in u file: " + it.key());
                    double v = it.value().get<double>();
                    if (!(v > 0)) fail_input("u values must be positive");
                    u[p] = v;
                }
            }
            emit({{"G", report_number(normalising_constant<double>(ls, u, m0))}});
        }
    } else if (app.got_subcommand(c_oracle)) {
        Net net = load_net(net_path);
        if (c_oracle->got_subcommand(o_steady)) {
            auto rates = rates_with_overrides(net, rate_overrides);
            Net timed = net;
            timed.rates = rates;
            auto rg = reachability_graph(timed, timed.initial, budget);
            SteadyState ss = steady_state(build_generator(timed, rg));
            emit(distribution_report(rg, ss.pi));
        } else if (c_oracle->got_subcommand(o_live)) {
            Marking m0 = marking_path.empty() ? net.initial : load_marking(marking_path, net);
            auto rg = reachability_graph(net, m0, budget);
            LivenessReport rep = is_live_oracle(net, rg);
            json per = json::object();
            for (size_t t = 0; t < net.transition_count(); ++t)
                per[net.transitions[t]] = static_cast<bool>(rep.transition_live[t]);
            emit({{"live", rep.live}, {"transitions", std::move(per)}});
            return rep.live ? 0 : 1;
        } else {
            Marking m0 = from_path.empty() ? net.initial : load_marking(from_path, net);
            Marking m = load_marking(marking_path, net);
            auto rg = reachability_graph(net, m0, budget);
            bool home = is_home_marking_oracle(rg, m);
            emit({{"home", home}});
            return home ? 0 : 1;
        }
    } else if (app.got_subcommand(c_gen)) {
        write_net(out_path, gen_counter(counter_bits));
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const pfpn::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.kind()) {
        case pfpn::errc::property_false: return 1;
        case pfpn::errc::bad_input: return 2;
        case pfpn::errc::budget_exceeded: return 3;
        case pfpn::errc::internal: return 4;
        }
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
