#pragma once

// Seeded random-net generators shared by the property and acceptance suites.

#include <random>
#include <string>
#include <vector>

#include "pfpn/pfpn.hpp"

namespace testgen {

using pfpn::Bag;
using pfpn::Marking;
using pfpn::Net;

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double pick_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Strongly connected state machine: a cycle with a few extra chords.
inline Net random_state_machine(Rng& rng, const std::string& prefix, int min_places = 2,
                                int max_places = 4) {
    const int n = pick(rng, min_places, max_places);
    std::vector<std::string> places;
    for (int i = 0; i < n; ++i) places.push_back(prefix + "p" + std::to_string(i));
    std::vector<pfpn::TransitionSpec> specs;
    std::set<std::pair<int, int>> arcs;
    int tid = 0;
    auto add_arc = [&](int a, int b) {
        if (a == b || !arcs.insert({a, b}).second) return;
        pfpn::TransitionSpec s;
        s.name = prefix + "t" + std::to_string(tid++);
        s.input.set(a, 1);
        s.output.set(b, 1);
        specs.push_back(std::move(s));
    };
    for (int i = 0; i < n; ++i) add_arc(i, (i + 1) % n);
    const int chords = pick(rng, 0, n);
    for (int i = 0; i < chords; ++i) add_arc(pick(rng, 0, n - 1), pick(rng, 0, n - 1));
    return pfpn::make_net(std::move(places), std::move(specs));
}

/// Pi^2 net built by a random rule script (soundness keeps every step Pi^2).
inline Net random_pi2_net(Rng& rng, int steps = 14) {
    int serial = 0;
    Net net = pfpn::apply_s_add(pfpn::make_net({}, {}),
                                random_state_machine(rng, "m" + std::to_string(serial++) + "_"));
    for (int step = 0; step < steps; ++step) {
        const int roll = pick(rng, 0, 99);
        if (roll < 20) {
            if (pick(rng, 0, 2) == 0) {
                Net lone = pfpn::make_net({"s" + std::to_string(serial++)}, {});
                net = pfpn::apply_s_add(net, lone);
            } else {
                net = pfpn::apply_s_add(
                    net, random_state_machine(rng, "m" + std::to_string(serial++) + "_"));
            }
        } else if (roll < 90) {
            pfpn::ReactionGraph g = pfpn::reaction_graph(net);
            if (g.size() == 0 || net.place_count() == 0) continue;
            for (int attempt = 0; attempt < 8; ++attempt) {
                const Bag& c = g.complexes[pick(rng, 0, static_cast<int>(g.size()) - 1)];
                int p = pick(rng, 0, static_cast<int>(net.place_count()) - 1);
                long long lambda = pick(rng, 0, 1) ? pick(rng, 1, 3) : -pick(rng, 1, 2);
                auto check = pfpn::check_c_update(net, c, p, lambda);
                if (!check.ok) continue;
                net = pfpn::apply_c_update(net, c, p, lambda);
                break;
            }
        } else {
            for (size_t p = 0; p < net.place_count(); ++p) {
                bool isolated = true;
                for (size_t t = 0; t < net.transition_count() && isolated; ++t)
                    isolated = net.input[t].count(static_cast<int>(p)) == 0 &&
                               net.output[t].count(static_cast<int>(p)) == 0;
                if (isolated) {
                    net = pfpn::apply_p_delete(net, static_cast<int>(p));
                    break;
                }
            }
        }
    }
    return net;
}

inline std::vector<double> random_rates(Rng& rng, const Net& net, double lo = 0.1,
                                        double hi = 10.0) {
    std::vector<double> r;
    for (size_t t = 0; t < net.transition_count(); ++t) r.push_back(pick_real(rng, lo, hi));
    return r;
}

/// Small initial marking whose reachability graph holds between min_states
/// and max_states markings. Nets with always-enabled transitions (an emptied
/// complex) are unbounded from every marking, so this can fail.
inline std::optional<Marking> random_bounded_marking(Rng& rng, const Net& net, size_t max_states,
                                                     int max_tokens = 2, size_t min_states = 2) {
    for (int attempt = 0; attempt < 60; ++attempt) {
        Marking m(net.place_count());
        for (size_t p = 0; p < net.place_count(); ++p) m[p] = pick(rng, 0, max_tokens);
        auto rg = pfpn::reachability_graph(net, m, max_states + 1);
        if (!rg.truncated && rg.states.size() >= min_states && rg.states.size() <= max_states)
            return m;
    }
    return std::nullopt;
}

/// Connected marked graph on `transitions` nodes: spanning tree plus extra
/// edges, every edge a one-in one-out place.
inline Net random_marked_graph(Rng& rng, int transitions = 4, int extra_edges = 3) {
    std::vector<std::string> places;
    std::vector<std::pair<int, int>> edges; // produced-by -> consumed-by
    for (int i = 1; i < transitions; ++i) {
        int j = pick(rng, 0, i - 1);
        if (pick(rng, 0, 1)) edges.push_back({i, j});
        else edges.push_back({j, i});
    }
    for (int i = 0; i < extra_edges; ++i) {
        int a = pick(rng, 0, transitions - 1);
        int b = pick(rng, 0, transitions - 1);
        if (a != b) edges.push_back({a, b});
    }
    std::vector<pfpn::TransitionSpec> specs(transitions);
    for (int t = 0; t < transitions; ++t) specs[t].name = "t" + std::to_string(t);
    for (size_t e = 0; e < edges.size(); ++e) {
        places.push_back("e" + std::to_string(e));
        specs[edges[e].first].output.set(static_cast<int>(e), 1);
        specs[edges[e].second].input.set(static_cast<int>(e), 1);
    }
    Marking m0(places.size());
    for (size_t p = 0; p < places.size(); ++p) m0[p] = pick(rng, 0, 1);
    return pfpn::make_net(std::move(places), std::move(specs), std::move(m0));
}

struct Pi3Instance {
    Net net;
    pfpn::LevelStructure ls;
    Marking m0;
};

/// Random Pi^3 net: one state-machine cycle per level, each level-i complex
/// extends its place with a bag over the maximal-potential places below.
/// Retries until recognition succeeds and the reachability set fits.
inline Pi3Instance random_pi3_net(Rng& rng, size_t max_states = 10'000, size_t min_states = 2) {
    for (int attempt = 0; attempt < 400; ++attempt) {
        const int n = pick(rng, 2, 3);
        std::vector<int> width(n);
        width[0] = pick(rng, 1, 3);
        for (int i = 1; i < n; ++i) width[i] = pick(rng, 2, 3);

        std::vector<std::string> places;
        std::vector<std::vector<int>> level_places(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < width[i]; ++j) {
                level_places[i].push_back(static_cast<int>(places.size()));
                places.push_back("p" + std::to_string(i + 1) + "_" + std::to_string(j));
            }

        std::vector<pfpn::TransitionSpec> specs;
        std::vector<long long> pot(places.size(), 0);
        std::vector<int> max_pot_places = level_places[0]; // level 1: everything has pot 0
        bool ok = true;
        for (int i = 1; i < n && ok; ++i) {
            std::vector<Bag> complexes(width[i]);
            bool linked = false;
            for (int j = 0; j < width[i]; ++j) {
                int p = level_places[i][j];
                complexes[j].set(p, 1);
                long long size = pick(rng, 0, 2);
                for (long long s = 0; s < size; ++s) {
                    int q = max_pot_places[pick(rng, 0, static_cast<int>(max_pot_places.size()) - 1)];
                    complexes[j].add(q, 1);
                    ++pot[p];
                }
                if (size > 0) linked = true;
            }
            if (!linked) { ok = false; break; }
            for (int j = 0; j < width[i]; ++j) {
                pfpn::TransitionSpec s;
                s.name = "t" + std::to_string(i + 1) + "_" + std::to_string(j);
                s.input = complexes[j];
                s.output = complexes[(j + 1) % width[i]];
                specs.push_back(std::move(s));
            }
            long long best = 0;
            for (int p : level_places[i]) best = std::max(best, pot[p]);
            max_pot_places.clear();
            for (int p : level_places[i])
                if (pot[p] == best) max_pot_places.push_back(p);
        }
        if (!ok) continue;
        if (width[0] >= 2) {
            for (int j = 0; j < width[0]; ++j) {
                pfpn::TransitionSpec s;
                s.name = "t1_" + std::to_string(j);
                s.input.set(level_places[0][j], 1);
                s.output.set(level_places[0][(j + 1) % width[0]], 1);
                specs.push_back(std::move(s));
            }
        }

        Net net;
        try {
            net = pfpn::make_net(places, std::move(specs));
        } catch (const pfpn::error&) {
            continue;
        }
        auto rec = pfpn::recognize(net);
        if (!rec.ok) continue;

        // live marking built top-down along the i-condition inequalities;
        // generous slack tokens keep the reachability sets interesting
        Marking m0(net.place_count());
        long long need = 1;
        for (int i = rec.ls.n; i >= 1; --i) {
            long long total = need + pick(rng, 0, i == 1 ? 6 : 3);
            for (long long tok = 0; tok < total; ++tok) {
                const auto& lp = rec.ls.level_places[i - 1];
                m0[lp[pick(rng, 0, static_cast<int>(lp.size()) - 1)]] += 1;
            }
            if (i >= 2) need = pfpn::phi(rec.ls, m0, i);
        }
        if (!pfpn::is_live(rec.ls, m0)) continue;
        auto rg = pfpn::reachability_graph(net, m0, max_states + 1);
        if (rg.truncated || rg.states.size() > max_states || rg.states.size() < min_states)
            continue;

        Pi3Instance inst;
        inst.net = std::move(net);
        inst.ls = std::move(rec.ls);
        inst.m0 = std::move(m0);
        return inst;
    }
    throw std::runtime_error("random_pi3_net failed to produce an instance");
}

/// Closed-form witness for the k-bit counter complexes: the complex holding
/// p_i (resp. q_i) is witnessed by p_i + sum_{j>i} 2^{j-i-1} p_j (resp. q side).
inline pfpn::RatVec counter_formula_witness(const Net& net, int k, int i, bool q_side) {
    pfpn::RatVec w(net.place_count(), pfpn::Rational(0));
    const int base = q_side ? k : 0;
    w[base + i] = pfpn::Rational(1);
    long long coef = 1;
    for (int j = i + 1; j < k; ++j) {
        w[base + j] = pfpn::Rational(coef);
        coef *= 2;
    }
    return w;
}

} // namespace testgen
