#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "pfpn/structural.hpp"

namespace pfpn {

namespace detail {

/// Strong connectivity of the place/transition digraph.
inline bool net_strongly_connected(const Net& net) {
    const int np = static_cast<int>(net.place_count());
    const int nt = static_cast<int>(net.transition_count());
    if (np + nt == 0) return false;
    std::vector<std::vector<int>> adj(np + nt);
    for (int t = 0; t < nt; ++t) {
        for (const auto& [p, k] : net.input[t].items) adj[p].push_back(np + t);
        for (const auto& [p, k] : net.output[t].items) adj[np + t].push_back(p);
    }
    return strongly_connected_components(adj).count == 1;
}

inline std::string unique_name(const std::set<std::string>& taken, std::string base) {
    while (taken.count(base)) base += "_";
    return base;
}

} // namespace detail

/// S-add: disjoint union with a strongly connected state machine.
inline Net apply_s_add(const Net& net, const Net& machine) {
    if (machine.place_count() == 0) fail_input("machine has no places");
    if (!classify_shape(machine).is_state_machine)
        fail_input("machine is not a state machine");
    if (!detail::net_strongly_connected(machine))
        fail_input("machine is not strongly connected");

    std::set<std::string> taken(net.places.begin(), net.places.end());
    taken.insert(net.transitions.begin(), net.transitions.end());
    for (const auto& n : machine.places)
        if (taken.count(n)) fail_input("machine name clashes with net: " + n);
    for (const auto& n : machine.transitions)
        if (taken.count(n)) fail_input("machine name clashes with net: " + n);

    std::vector<std::string> places = net.places;
    places.insert(places.end(), machine.places.begin(), machine.places.end());
    const int offset = static_cast<int>(net.place_count());
    std::vector<TransitionSpec> specs;
    bool rates = (net.rates.has_value() || net.transition_count() == 0) &&
                 (machine.rates.has_value() || machine.transition_count() == 0) &&
                 net.transition_count() + machine.transition_count() > 0;
    for (size_t t = 0; t < net.transition_count(); ++t)
        specs.push_back({net.transitions[t], net.input[t], net.output[t],
                         rates ? std::optional<double>((*net.rates)[t]) : std::nullopt});
    for (size_t t = 0; t < machine.transition_count(); ++t) {
        Bag in, out;
        for (const auto& [p, k] : machine.input[t].items) in.set(p + offset, k);
        for (const auto& [p, k] : machine.output[t].items) out.set(p + offset, k);
        specs.push_back({machine.transitions[t], std::move(in), std::move(out),
                         rates ? std::optional<double>((*machine.rates)[t]) : std::nullopt});
    }
    Marking m0(places.size());
    for (size_t p = 0; p < net.place_count(); ++p) m0[p] = net.initial[p];
    for (size_t p = 0; p < machine.place_count(); ++p) m0[p + offset] = machine.initial[p];
    return make_net(std::move(places), std::move(specs), std::move(m0));
}

struct RuleCheck {
    bool ok = true;
    std::string reason;
};

/// Applicability of C-update(c, p, lambda) on a Pi^2 net.
inline RuleCheck check_c_update(const Net& net, const Bag& complex, int place, long long lambda) {
    if (place < 0 || place >= static_cast<int>(net.place_count()))
        fail_input("unknown place");
    if (lambda == 0) fail_input("lambda must be nonzero");
    bool is_complex = false;
    for (size_t t = 0; t < net.transition_count() && !is_complex; ++t)
        is_complex = net.input[t] == complex || net.output[t] == complex;
    if (!is_complex) fail_input("bag is not a complex of the net");

    if (complex.count(place) + lambda < 0)
        return {false, "condition 1: lambda + c(p) is negative"};
    Bag updated = complex;
    updated.add(place, lambda);
    for (size_t t = 0; t < net.transition_count(); ++t)
        if (net.input[t] == updated || net.output[t] == updated)
            return {false, "condition 2: c + lambda p is already a complex"};
    if (!witnesses_avoiding_place(net, place))
        return {false, "condition 3: some complex has no witness avoiding p"};
    return {true, ""};
}

/// C-update: every bag equal to c becomes c + lambda p.
inline Net apply_c_update(const Net& net, const Bag& complex, int place, long long lambda) {
    RuleCheck check = check_c_update(net, complex, place, lambda);
    if (!check.ok) fail_property("c-update not applicable: " + check.reason);
    Bag updated = complex;
    updated.add(place, lambda);
    std::vector<TransitionSpec> specs;
    for (size_t t = 0; t < net.transition_count(); ++t) {
        TransitionSpec s;
        s.name = net.transitions[t];
        s.input = net.input[t] == complex ? updated : net.input[t];
        s.output = net.output[t] == complex ? updated : net.output[t];
        if (net.rates) s.rate = (*net.rates)[t];
        specs.push_back(std::move(s));
    }
    return make_net(net.places, std::move(specs), net.initial);
}

/// P-delete: removes an isolated place.
inline Net apply_p_delete(const Net& net, int place) {
    if (place < 0 || place >= static_cast<int>(net.place_count()))
        fail_input("unknown place");
    for (size_t t = 0; t < net.transition_count(); ++t)
        if (net.input[t].count(place) != 0 || net.output[t].count(place) != 0)
            fail_property("place " + net.places[place] + " is not isolated");

    std::vector<std::string> places;
    Marking m0(net.place_count() - 1);
    std::vector<int> remap(net.place_count(), -1);
    for (size_t p = 0; p < net.place_count(); ++p) {
        if (static_cast<int>(p) == place) continue;
        remap[p] = static_cast<int>(places.size());
        m0[places.size()] = net.initial[p];
        places.push_back(net.places[p]);
    }
    std::vector<TransitionSpec> specs;
    for (size_t t = 0; t < net.transition_count(); ++t) {
        TransitionSpec s;
        s.name = net.transitions[t];
        for (const auto& [p, k] : net.input[t].items) s.input.set(remap[p], k);
        for (const auto& [p, k] : net.output[t].items) s.output.set(remap[p], k);
        if (net.rates) s.rate = (*net.rates)[t];
        specs.push_back(std::move(s));
    }
    return make_net(std::move(places), std::move(specs), std::move(m0));
}

/// One synthesis step. Complexes and places are stored by name so a script
/// replays independently of index layout.
struct RuleApplication {
    enum class Kind { s_add, c_update, p_delete };
    Kind kind;
    Net machine;                                  // s_add
    std::map<std::string, long long> complex;     // c_update
    std::string place;                            // c_update, p_delete
    long long lambda = 0;                         // c_update
};

using RuleScript = std::vector<RuleApplication>;

inline Net apply_rule(const Net& net, const RuleApplication& app) {
    switch (app.kind) {
    case RuleApplication::Kind::s_add:
        return apply_s_add(net, app.machine);
    case RuleApplication::Kind::c_update: {
        Bag c;
        for (const auto& [name, k] : app.complex) {
            int p = net.place_index(name);
            if (p < 0) fail_input("unknown place in complex: " + name);
            c.set(p, k);
        }
        int p = net.place_index(app.place);
        if (p < 0) fail_input("unknown place: " + app.place);
        return apply_c_update(net, c, p, app.lambda);
    }
    case RuleApplication::Kind::p_delete: {
        int p = net.place_index(app.place);
        if (p < 0) fail_input("unknown place: " + app.place);
        return apply_p_delete(net, p);
    }
    }
    fail_internal("unreachable");
}

/// Replays a script from the empty net. `on_step(net, index)` is called after
/// each application.
inline Net replay(const RuleScript& script,
                  const std::function<void(const Net&, size_t)>& on_step = nullptr) {
    Net net = make_net({}, {});
    for (size_t i = 0; i < script.size(); ++i) {
        net = apply_rule(net, script[i]);
        if (on_step) on_step(net, i);
    }
    return net;
}

/// Constructive completeness: emits a script whose replay rebuilds the given
/// Pi^2 net. Three phases: insert the reaction state machines, graft the
/// original places complex by complex, then strip the auxiliary places.
inline RuleScript decompose(const Net& net) {
    StructuralReport rep = classify(net);
    if (!rep.is_pi2) fail_property("not a Pi^2-net");

    // a strongly connected state machine inserts itself in one step
    if (net.place_count() > 0 && classify_shape(net).is_state_machine &&
        detail::net_strongly_connected(net)) {
        RuleApplication app;
        app.kind = RuleApplication::Kind::s_add;
        app.machine = net;
        return {std::move(app)};
    }

    ReactionGraph g = reaction_graph(net);
    std::set<std::string> taken(net.places.begin(), net.places.end());
    taken.insert(net.transitions.begin(), net.transitions.end());
    std::vector<std::string> qname(g.size());
    for (size_t c = 0; c < g.size(); ++c) {
        qname[c] = detail::unique_name(taken, "q_" + complex_name(net, g.complexes[c]));
        taken.insert(qname[c]);
    }

    RuleScript script;
    // phase 1: one S-add per reaction component
    for (int comp = 0; comp < g.component_count; ++comp) {
        std::vector<std::string> mplaces;
        std::vector<int> local(g.size(), -1);
        for (size_t c = 0; c < g.size(); ++c)
            if (g.component[c] == comp) {
                local[c] = static_cast<int>(mplaces.size());
                mplaces.push_back(qname[c]);
            }
        std::vector<TransitionSpec> specs;
        for (int t : g.component_transitions(comp)) {
            TransitionSpec s;
            s.name = net.transitions[t];
            s.input.set(local[g.input_complex[t]], 1);
            s.output.set(local[g.output_complex[t]], 1);
            specs.push_back(std::move(s));
        }
        RuleApplication app;
        app.kind = RuleApplication::Kind::s_add;
        app.machine = make_net(std::move(mplaces), std::move(specs));
        script.push_back(std::move(app));
    }

    // phase 2: add each original place, then extend the complexes that use it
    std::vector<std::map<std::string, long long>> image(g.size());
    for (size_t c = 0; c < g.size(); ++c) image[c][qname[c]] = 1;
    for (size_t p = 0; p < net.place_count(); ++p) {
        RuleApplication add;
        add.kind = RuleApplication::Kind::s_add;
        add.machine = make_net({net.places[p]}, {});
        script.push_back(std::move(add));
        for (size_t c = 0; c < g.size(); ++c) {
            long long k = g.complexes[c].count(static_cast<int>(p));
            if (k == 0) continue;
            RuleApplication up;
            up.kind = RuleApplication::Kind::c_update;
            up.complex = image[c];
            up.place = net.places[p];
            up.lambda = k;
            script.push_back(std::move(up));
            image[c][net.places[p]] = k;
        }
    }

    // phase 3: peel off the auxiliary places
    for (size_t c = 0; c < g.size(); ++c) {
        RuleApplication up;
        up.kind = RuleApplication::Kind::c_update;
        up.complex = image[c];
        up.place = qname[c];
        up.lambda = -1;
        script.push_back(std::move(up));
        RuleApplication del;
        del.kind = RuleApplication::Kind::p_delete;
        del.place = qname[c];
        script.push_back(std::move(del));
    }
    return script;
}

/// Adds the missing reverse transitions; the result is weakly reversible.
/// Added transitions inherit the forward rate when the net carries rates.
inline Net symmetrize(const Net& net) {
    std::set<std::string> taken(net.places.begin(), net.places.end());
    taken.insert(net.transitions.begin(), net.transitions.end());
    std::vector<TransitionSpec> specs;
    for (size_t t = 0; t < net.transition_count(); ++t)
        specs.push_back({net.transitions[t], net.input[t], net.output[t],
                         net.rates ? std::optional<double>((*net.rates)[t]) : std::nullopt});
    for (size_t t = 0; t < net.transition_count(); ++t) {
        if (reverse_transition(net, static_cast<int>(t)) >= 0) continue;
        std::string name = detail::unique_name(taken, net.transitions[t] + "_rev");
        taken.insert(name);
        specs.push_back({std::move(name), net.output[t], net.input[t],
                         net.rates ? std::optional<double>((*net.rates)[t]) : std::nullopt});
    }
    return make_net(net.places, std::move(specs), net.initial);
}

/// Regulation: stacks the net with its reaction Petri net, adding one place
/// per complex. The result always has deficiency 0 and keeps the net's weak
/// reversibility. Default token placement marks the input complex of every
/// initially enabled transition once.
inline Net regulate(const Net& net,
                    const std::map<std::string, long long>* mbar0 = nullptr) {
    ReactionGraph g = reaction_graph(net);
    std::set<std::string> taken(net.places.begin(), net.places.end());
    taken.insert(net.transitions.begin(), net.transitions.end());
    std::vector<std::string> places = net.places;
    std::vector<std::string> qname(g.size());
    for (size_t c = 0; c < g.size(); ++c) {
        qname[c] = detail::unique_name(taken, "q_" + complex_name(net, g.complexes[c]));
        taken.insert(qname[c]);
        places.push_back(qname[c]);
    }
    const int offset = static_cast<int>(net.place_count());
    std::vector<TransitionSpec> specs;
    for (size_t t = 0; t < net.transition_count(); ++t) {
        TransitionSpec s;
        s.name = net.transitions[t];
        s.input = net.input[t];
        s.input.set(offset + g.input_complex[t], 1);
        s.output = net.output[t];
        s.output.set(offset + g.output_complex[t], 1);
        if (net.rates) s.rate = (*net.rates)[t];
        specs.push_back(std::move(s));
    }
    Marking m0(places.size());
    for (size_t p = 0; p < net.place_count(); ++p) m0[p] = net.initial[p];
    if (mbar0) {
        for (const auto& [name, k] : *mbar0) {
            bool found = false;
            for (size_t c = 0; c < g.size(); ++c)
                if (qname[c] == name) {
                    if (k < 0) fail_input("negative regulation marking");
                    m0[offset + c] = k;
                    found = true;
                }
            if (!found) fail_input("unknown complex place in regulation marking: " + name);
        }
    } else {
        for (int t : enabled_transitions(net, net.initial))
            m0[offset + g.input_complex[t]] = 1;
    }
    return make_net(std::move(places), std::move(specs), std::move(m0));
}

/// The k-bit counter benchmark net (with reverse transitions, all rates 1):
/// 2^k reachable markings forming a bidirectional path.
inline Net gen_counter(int k) {
    if (k < 1) fail_input("k must be >= 1");
    std::vector<std::string> places;
    for (int i = 0; i < k; ++i) places.push_back("p" + std::to_string(i));
    for (int i = 0; i < k; ++i) places.push_back("q" + std::to_string(i));
    auto p = [](int i) { return i; };
    auto q = [k](int i) { return k + i; };

    std::vector<TransitionSpec> specs;
    std::vector<std::pair<Bag, Bag>> bags;
    for (int i = 0; i < k; ++i) {
        Bag in, out;
        in.set(p(i), 1);
        out.set(q(i), 1);
        for (int j = 0; j < i; ++j) {
            in.set(q(j), 1);
            out.set(p(j), 1);
        }
        bags.push_back({in, out});
        specs.push_back({"t" + std::to_string(i), std::move(in), std::move(out), 1.0});
    }
    for (int i = 0; i < k; ++i)
        specs.push_back({"t" + std::to_string(i) + "_rev", bags[i].second, bags[i].first, 1.0});

    Marking m0(2 * static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) m0[p(i)] = 1;
    return make_net(std::move(places), std::move(specs), std::move(m0));
}

// --- isomorphism ------------------------------------------------------------

namespace detail {

using Signature = std::vector<long long>;

/// Iterated refinement of place/transition classes, seeded by local degree
/// signatures. Returns (place class id, transition class id) per net entity.
inline std::pair<std::vector<int>, std::vector<int>> refine_classes(const Net& net) {
    const int np = static_cast<int>(net.place_count());
    const int nt = static_cast<int>(net.transition_count());
    std::vector<int> pclass(np, 0), tclass(nt, 0);

    // class ids are ranks in the sorted signature list, hence canonical
    // across nets with different index layouts
    auto assign = [](const std::vector<Signature>& sigs, std::vector<int>& cls) {
        std::vector<Signature> sorted = sigs;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (size_t i = 0; i < sigs.size(); ++i)
            cls[i] = static_cast<int>(
                std::lower_bound(sorted.begin(), sorted.end(), sigs[i]) - sorted.begin());
        return static_cast<int>(sorted.size());
    };

    int classes = 0;
    for (int round = 0; round < np + nt + 2; ++round) {
        std::vector<Signature> tsig(nt);
        for (int t = 0; t < nt; ++t) {
            Signature s;
            std::vector<std::pair<long long, long long>> in, out;
            for (const auto& [p, k] : net.input[t].items) in.push_back({pclass[p], k});
            for (const auto& [p, k] : net.output[t].items) out.push_back({pclass[p], k});
            std::sort(in.begin(), in.end());
            std::sort(out.begin(), out.end());
            for (auto& [c, k] : in) { s.push_back(c); s.push_back(k); }
            s.push_back(-1);
            for (auto& [c, k] : out) { s.push_back(c); s.push_back(k); }
            tsig[t] = std::move(s);
        }
        int tcount = assign(tsig, tclass);

        std::vector<Signature> psig(np);
        for (int t = 0; t < nt; ++t) {
            for (const auto& [p, k] : net.input[t].items) {
                psig[p].push_back(tclass[t]);
                psig[p].push_back(-k);
            }
            for (const auto& [p, k] : net.output[t].items) {
                psig[p].push_back(tclass[t]);
                psig[p].push_back(k);
            }
        }
        for (int p = 0; p < np; ++p) {
            Signature& s = psig[p];
            std::vector<std::pair<long long, long long>> pairs;
            for (size_t i = 0; i + 1 < s.size(); i += 2) pairs.push_back({s[i], s[i + 1]});
            std::sort(pairs.begin(), pairs.end());
            s.clear();
            s.push_back(pclass[p]);
            for (auto& [a, b] : pairs) { s.push_back(a); s.push_back(b); }
        }
        int pcount = assign(psig, pclass);
        if (pcount + tcount == classes) break;
        classes = pcount + tcount;
    }
    return {pclass, tclass};
}

} // namespace detail

/// Structural isomorphism: a place bijection under which the transition bag
/// pairs coincide. Class refinement narrows candidates; a small backtracking
/// search settles symmetric orbits. Markings and rates are ignored.
inline bool isomorphic(const Net& a, const Net& b) {
    if (a.place_count() != b.place_count() || a.transition_count() != b.transition_count())
        return false;
    auto [pca, tca] = detail::refine_classes(a);
    auto [pcb, tcb] = detail::refine_classes(b);

    // class histograms must match (class ids are canonical: built from sorted signatures)
    auto hist = [](const std::vector<int>& v) {
        std::map<int, int> h;
        for (int c : v) ++h[c];
        return h;
    };
    if (hist(pca) != hist(pcb) || hist(tca) != hist(tcb)) return false;

    const int np = static_cast<int>(a.place_count());
    std::map<std::pair<Bag, Bag>, int> b_pairs;
    for (size_t t = 0; t < b.transition_count(); ++t)
        b_pairs.emplace(std::make_pair(b.input[t], b.output[t]), static_cast<int>(t));

    std::vector<int> map_ab(np, -1);
    std::vector<bool> used(np, false);

    auto transitions_match = [&]() {
        for (size_t t = 0; t < a.transition_count(); ++t) {
            Bag in, out;
            for (const auto& [p, k] : a.input[t].items) in.set(map_ab[p], k);
            for (const auto& [p, k] : a.output[t].items) out.set(map_ab[p], k);
            auto it = b_pairs.find({in, out});
            if (it == b_pairs.end() || tca[t] != tcb[it->second]) return false;
        }
        return true;
    };

    // order: smallest candidate classes first
    std::vector<int> order(np);
    for (int i = 0; i < np; ++i) order[i] = i;
    auto class_size = [&](int cls) {
        int n = 0;
        for (int c : pca) n += c == cls;
        return n;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return class_size(pca[x]) < class_size(pca[y]); });

    long long budget = 200000;
    std::function<bool(int)> search = [&](int idx) -> bool {
        if (--budget < 0) fail_internal("isomorphism search budget exceeded");
        if (idx == np) return transitions_match();
        int p = order[idx];
        for (int q = 0; q < np; ++q) {
            if (used[q] || pcb[q] != pca[p]) continue;
            used[q] = true;
            map_ab[p] = q;
            if (search(idx + 1)) return true;
            used[q] = false;
            map_ab[p] = -1;
        }
        return false;
    };
    return search(0);
}

} // namespace pfpn
