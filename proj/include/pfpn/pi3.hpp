#pragma once

#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "pfpn/reaction.hpp"
#include "pfpn/structural.hpp"
#include "pfpn/traffic.hpp"

namespace pfpn {

/// Level decomposition of a Pi^3 net. Levels are 1-based: level 1 is the
/// bottom (resource) level, level n the top. All matrices are integer.
struct LevelStructure {
    int n = 0;                                      // level count
    std::vector<std::vector<int>> level_places;     // [i-1] -> places of level i
    std::vector<std::vector<int>> level_transitions;
    std::vector<int> place_level;                   // place -> level (1-based)
    std::vector<int> transition_level;
    std::vector<long long> potential;               // pot(p)
    std::vector<std::map<int, long long>> pot_pair; // p -> { q in level below : pot(p, q) }
    std::vector<int> machine_place_of_complex;      // reaction-graph node -> its level place
    std::vector<std::vector<int>> interface_places; // [i-1] -> interface places of level i (i < n)
    std::vector<std::vector<int>> place_order;      // [i-1] -> places by increasing potential
    std::vector<std::vector<long long>> b;          // P x P witness matrix, m~ = B m
    std::vector<std::vector<long long>> v;          // n x P, rows are the S-semi-flows v_i
    int max_width = 0;                              // K
    long long max_potential = 0;                    // alpha

    long long level_total(const Marking& m, int level) const {
        long long s = 0;
        for (int p : level_places[level - 1]) s += m[p];
        return s;
    }
};

struct Recognition {
    bool ok = false;
    std::string reason;
    LevelStructure ls;
};

namespace detail {

inline Recognition recognition_failure(std::string reason) {
    Recognition r;
    r.reason = std::move(reason);
    return r;
}

} // namespace detail

/// Recognizes a net as a Pi^3 net: reaction-graph components are the
/// candidate level machines, machine places are resolved by constraint
/// propagation, and the reads-from relation must order the levels into a
/// chain. Failure names the first violated condition.
inline Recognition recognize(const Net& net) {
    using detail::recognition_failure;
    if (net.place_count() == 0) return recognition_failure("net has no places");
    if (!is_weakly_reversible(net)) return recognition_failure("not weakly reversible");

    ReactionGraph g = reaction_graph(net);
    const int np = static_cast<int>(net.place_count());
    const int ncomp = g.component_count;
    const int kBottom = ncomp; // pseudo-level of a transitionless bottom place

    // occurrences of each place inside each component's complexes
    std::vector<std::map<int, int>> occurrences(np);
    for (size_t c = 0; c < g.size(); ++c)
        for (const auto& [p, k] : g.complexes[c].items) ++occurrences[p][g.component[c]];

    if (ncomp == 0) {
        // a lone place is the degenerate one-level structure
        if (np != 1) return recognition_failure("net has no transitions");
    } else {
        for (int p = 0; p < np; ++p)
            if (occurrences[p].empty())
                return recognition_failure("place " + net.places[p] +
                                           " is disconnected from every transition");
    }

    std::vector<int> fixed_level(np, -1);
    std::vector<bool> machine_used(np, false);

    // machine-place candidates: multiplicity one and unique within the component
    std::vector<std::vector<int>> candidates(g.size());
    for (size_t c = 0; c < g.size(); ++c) {
        for (const auto& [p, k] : g.complexes[c].items)
            if (k == 1 && occurrences[p][g.component[c]] == 1) candidates[c].push_back(p);
        if (candidates[c].empty())
            return recognition_failure("complex " + complex_name(net, g.complexes[c]) +
                                       " has no machine-place candidate");
    }

    std::vector<int> machine(g.size(), -1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t c = 0; c < g.size(); ++c) {
            if (machine[c] >= 0) continue;
            std::vector<int> remaining;
            for (int p : candidates[c]) {
                if (machine_used[p]) continue;
                if (fixed_level[p] >= 0 && fixed_level[p] != g.component[c]) continue;
                remaining.push_back(p);
            }
            if (remaining.empty())
                return recognition_failure("complex " + complex_name(net, g.complexes[c]) +
                                           " has no machine-place candidate left");
            candidates[c] = remaining;
            if (remaining.size() == 1) {
                int p = remaining[0];
                machine[c] = p;
                machine_used[p] = true;
                fixed_level[p] = g.component[c];
                changed = true;
            }
        }
    }
    for (size_t c = 0; c < g.size(); ++c)
        if (machine[c] < 0)
            return recognition_failure("ambiguous machine place for complex " +
                                       complex_name(net, g.complexes[c]));

    // places that are machine of nothing form the transitionless bottom
    // level; a state machine with no transitions has exactly one place
    int isolated = -1;
    for (int p = 0; p < np; ++p) {
        if (fixed_level[p] >= 0) continue;
        if (isolated >= 0)
            return recognition_failure("places " + net.places[isolated] + " and " +
                                       net.places[p] +
                                       " both fall outside every level state machine");
        isolated = p;
        fixed_level[p] = kBottom;
    }
    if (ncomp == 0 && isolated < 0) return recognition_failure("net has no places");

    // reads-from relation: the non-machine support of a component's complexes
    // must live in exactly one other level
    std::vector<int> below(ncomp + 1, -2); // -2 unknown, -1 none
    for (int comp = 0; comp <= ncomp; ++comp) below[comp] = comp == kBottom ? -1 : -2;
    for (size_t c = 0; c < g.size(); ++c) {
        int comp = g.component[c];
        int lower = -1;
        for (const auto& [p, k] : g.complexes[c].items) {
            if (p == machine[c]) continue;
            int lvl = fixed_level[p];
            if (lower == -1) lower = lvl;
            else if (lower != lvl)
                return recognition_failure("complex " + complex_name(net, g.complexes[c]) +
                                           " mixes places of two lower levels");
        }
        if (lower == -1) continue;
        if (below[comp] == -2) below[comp] = lower;
        else if (below[comp] != lower)
            return recognition_failure("level machine reads from two different levels");
    }
    for (int comp = 0; comp < ncomp; ++comp)
        if (below[comp] == -2) below[comp] = -1;

    const int nlevels = ncomp + (isolated >= 0 ? 1 : 0);
    std::vector<int> read_by(ncomp + 1, -1);
    for (int comp = 0; comp < ncomp; ++comp) {
        int lo = below[comp];
        if (lo < 0) continue;
        if (lo == comp) return recognition_failure("level machine reads from itself");
        if (read_by[lo] >= 0) return recognition_failure("two levels read the same level");
        read_by[lo] = comp;
    }
    int top = -1;
    for (int comp = 0; comp < ncomp; ++comp)
        if (read_by[comp] < 0) {
            if (top >= 0) return recognition_failure("levels do not form a chain");
            top = comp;
        }
    if (isolated >= 0 && ncomp > 0 && read_by[kBottom] < 0)
        return recognition_failure("levels do not form a chain");
    if (top < 0 && ncomp > 0) return recognition_failure("levels do not form a chain");
    std::vector<int> chain; // top to bottom
    for (int comp = top; comp >= 0; comp = below[comp]) chain.push_back(comp);
    if (ncomp == 0) chain.push_back(kBottom);
    if (static_cast<int>(chain.size()) != nlevels)
        return recognition_failure("levels do not form a chain");

    Recognition rec;
    rec.ok = true;
    LevelStructure& ls = rec.ls;
    ls.n = nlevels;
    ls.level_places.assign(nlevels, {});
    ls.level_transitions.assign(nlevels, {});
    ls.place_level.assign(np, 0);
    ls.transition_level.assign(net.transition_count(), 0);
    ls.potential.assign(np, 0);
    ls.pot_pair.assign(np, {});
    ls.machine_place_of_complex.assign(g.size(), -1);

    std::vector<int> level_of_comp(ncomp + 1, 0);
    for (int i = 0; i < nlevels; ++i) level_of_comp[chain[nlevels - 1 - i]] = i + 1;
    for (int p = 0; p < np; ++p) {
        int lvl = level_of_comp[fixed_level[p]];
        ls.place_level[p] = lvl;
        ls.level_places[lvl - 1].push_back(p);
    }
    for (size_t t = 0; t < net.transition_count(); ++t) {
        int lvl = level_of_comp[g.component[g.input_complex[t]]];
        ls.transition_level[t] = lvl;
        ls.level_transitions[lvl - 1].push_back(static_cast<int>(t));
    }
    for (size_t c = 0; c < g.size(); ++c) {
        int p = machine[c];
        ls.machine_place_of_complex[c] = p;
        for (const auto& [q, k] : g.complexes[c].items) {
            if (q == p) continue;
            ls.pot_pair[p][q] = k;
            ls.potential[p] += k;
        }
    }

    // Pi^3 condition: interface places carry the maximal potential of their level
    ls.interface_places.assign(nlevels, {});
    for (int i = 1; i < nlevels; ++i) {
        std::vector<bool> is_interface(np, false);
        for (int t : ls.level_transitions[i]) { // level i+1 transitions (0-based index i)
            int c = g.output_complex[t];
            for (const auto& [q, k] : g.complexes[c].items)
                if (q != ls.machine_place_of_complex[c]) is_interface[q] = true;
        }
        long long maxpot = 0;
        for (int p : ls.level_places[i - 1]) maxpot = std::max(maxpot, ls.potential[p]);
        for (int p : ls.level_places[i - 1]) {
            if (!is_interface[p]) continue;
            ls.interface_places[i - 1].push_back(p);
            if (ls.potential[p] != maxpot) {
                return recognition_failure(
                    "interface place " + net.places[p] + " has potential " +
                    std::to_string(ls.potential[p]) + " < maximal potential " +
                    std::to_string(maxpot) + " of its level");
            }
        }
    }

    // witness matrix B, top level down
    ls.b.assign(np, std::vector<long long>(np, 0));
    for (int i = nlevels; i >= 1; --i) {
        for (int p : ls.level_places[i - 1]) {
            ls.b[p][p] = 1;
            if (i == nlevels) continue;
            for (int r : ls.level_places[i]) { // level i+1
                auto it = ls.pot_pair[r].find(p);
                if (it == ls.pot_pair[r].end()) continue;
                for (int col = 0; col < np; ++col) ls.b[p][col] -= it->second * ls.b[r][col];
            }
        }
    }
    ls.v.assign(nlevels, std::vector<long long>(np, 0));
    for (int i = 1; i <= nlevels; ++i)
        for (int p : ls.level_places[i - 1])
            for (int col = 0; col < np; ++col) ls.v[i - 1][col] += ls.b[p][col];

    for (int i = 0; i < nlevels; ++i) {
        ls.place_order.push_back(ls.level_places[i]);
        std::sort(ls.place_order[i].begin(), ls.place_order[i].end(), [&](int a2, int b2) {
            if (ls.potential[a2] != ls.potential[b2]) return ls.potential[a2] < ls.potential[b2];
            return net.places[a2] < net.places[b2];
        });
        ls.max_width = std::max(ls.max_width, static_cast<int>(ls.level_places[i].size()));
    }
    for (int p = 0; p < np; ++p) ls.max_potential = std::max(ls.max_potential, ls.potential[p]);
    return rec;
}

/// Marking witness m~ by the top-down recursion; equals B m.
inline Marking marking_witness(const LevelStructure& ls, const Marking& m) {
    Marking w = m;
    for (int i = ls.n - 1; i >= 1; --i)
        for (int p : ls.level_places[i - 1]) {
            long long correction = 0;
            for (int r : ls.level_places[i]) {
                auto it = ls.pot_pair[r].find(p);
                if (it != ls.pot_pair[r].end()) correction += it->second * w[r];
            }
            w[p] = m[p] - correction;
        }
    return w;
}

/// Checks that one firing moves the witness by -1 at the level input place of
/// t and +1 at its level output place.
inline bool firing_step_witness_check(const LevelStructure& ls, const Net& net, const Marking& m,
                                      int t) {
    if (!m.covers(net.input[t])) fail_property("transition is not enabled");
    Marking next = m;
    next.apply(net.input[t], net.output[t]);
    Marking before = marking_witness(ls, m);
    Marking after = marking_witness(ls, next);
    int lvl = ls.transition_level[t];
    int in_place = -1, out_place = -1;
    for (const auto& [p, k] : net.input[t].items)
        if (ls.place_level[p] == lvl) in_place = p;
    for (const auto& [p, k] : net.output[t].items)
        if (ls.place_level[p] == lvl) out_place = p;
    for (size_t p = 0; p < m.size(); ++p) {
        long long expected = 0;
        if (static_cast<int>(p) == in_place) expected -= 1;
        if (static_cast<int>(p) == out_place) expected += 1;
        if (after[p] - before[p] != expected) return false;
    }
    return true;
}

/// The S-invariant values C_i = v_i . m0 = m~0(P_i).
inline std::vector<long long> s_invariant_values(const LevelStructure& ls, const Marking& m0) {
    std::vector<long long> c(ls.n, 0);
    for (int i = 0; i < ls.n; ++i)
        for (size_t p = 0; p < m0.size(); ++p) c[i] += ls.v[i][p] * m0[p];
    return c;
}

/// Minimal potential among marked level-i places; maximal level potential
/// when the level is empty. Levels are 1-based, 2 <= i <= n.
inline long long phi(const LevelStructure& ls, const Marking& m, int i) {
    if (i < 2 || i > ls.n) fail_input("phi level out of range");
    bool marked = false;
    long long minpot = 0, maxpot = 0;
    for (int p : ls.level_places[i - 1]) {
        maxpot = std::max(maxpot, ls.potential[p]);
        if (m[p] > 0) {
            minpot = marked ? std::min(minpot, ls.potential[p]) : ls.potential[p];
            marked = true;
        }
    }
    return marked ? minpot : maxpot;
}

/// m(P_i) > 0 and m(P_{j-1}) >= phi_j(m) for 2 <= j <= i.
inline bool satisfies_i_condition(const LevelStructure& ls, const Marking& m, int i) {
    if (i < 1 || i > ls.n) fail_input("condition level out of range");
    if (ls.level_total(m, i) <= 0) return false;
    for (int j = 2; j <= i; ++j)
        if (ls.level_total(m, j - 1) < phi(ls, m, j)) return false;
    return true;
}

/// Liveness is the n-condition. A one-level structure without transitions is
/// vacuously live.
inline bool is_live(const LevelStructure& ls, const Marking& m) {
    if (ls.n == 1 && ls.level_transitions[0].empty()) return true;
    return satisfies_i_condition(ls, m, ls.n);
}

/// For a live m0, m is reachable iff it satisfies the n-condition and agrees
/// with m0 on all S-invariants.
inline bool is_reachable(const LevelStructure& ls, const Marking& m0, const Marking& m) {
    if (!is_live(ls, m0)) fail_property("initial marking is not live");
    if (m.size() != m0.size()) fail_input("marking size mismatch");
    if (!m.non_negative()) return false;
    if (!is_live(ls, m)) return false;
    return s_invariant_values(ls, m0) == s_invariant_values(ls, m);
}

/// Diagnostic variant used by front-ends: reports which test failed.
inline std::pair<bool, std::string> is_reachable_explained(const LevelStructure& ls,
                                                           const Marking& m0, const Marking& m) {
    if (!is_live(ls, m0)) fail_property("initial marking is not live");
    if (!m.non_negative()) return {false, "marking has negative entries"};
    auto c0 = s_invariant_values(ls, m0);
    auto c = s_invariant_values(ls, m);
    for (int i = 0; i < ls.n; ++i)
        if (c0[i] != c[i])
            return {false, "invariant mismatch at level " + std::to_string(i + 1)};
    if (ls.level_total(m, ls.n) <= 0 && !(ls.n == 1 && ls.level_transitions[0].empty()))
        return {false, "fails n-condition at level " + std::to_string(ls.n) +
                           " (top level unmarked)"};
    for (int j = 2; j <= ls.n; ++j)
        if (ls.level_total(m, j - 1) < phi(ls, m, j))
            return {false, "fails n-condition at level " + std::to_string(j)};
    return {true, ""};
}

namespace detail {

struct DpKeyHash {
    size_t operator()(const std::vector<long long>& key) const {
        size_t h = 1469598103934665603ull;
        for (long long x : key) {
            h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

template <class Scalar>
Scalar scalar_pow(const Scalar& base, long long e) {
    Scalar acc(1);
    for (long long i = 0; i < e; ++i) acc *= base;
    return acc;
}

template <>
inline double scalar_pow<double>(const double& base, long long e) {
    return std::pow(base, static_cast<double>(e));
}

/// Memoized evaluation of the G(i, j, c_1..c_i) recursion.
template <class Scalar>
class NormConstDp {
public:
    NormConstDp(const LevelStructure& ls, const std::vector<Scalar>& u) : ls_(ls), u_(u) {}

    Scalar run(const std::vector<long long>& c_values) {
        std::vector<long long> key;
        key.push_back(ls_.n);
        key.push_back(static_cast<long long>(ls_.place_order[ls_.n - 1].size()));
        for (long long c : c_values) key.push_back(c);
        return eval(std::move(key));
    }

    size_t memo_entries() const { return memo_.size(); }

private:
    Scalar eval(std::vector<long long> key) {
        const int i = static_cast<int>(key[0]);
        const int j = static_cast<int>(key[1]);
        const long long ci = key.back();
        if (ci < 0) return Scalar(0);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;

        const int place = ls_.place_order[i - 1][j - 1];
        const Scalar& up = u_[place];
        Scalar result(0);
        if (i == 1 && j == 1) {
            result = scalar_pow(up, ci);
        } else if (i == 1) {
            // sum over nu tokens parked in place p_{1j}, plus the all-here term
            Scalar power(1);
            for (long long nu = 0; nu < ci; ++nu) {
                std::vector<long long> sub{1, j - 1, ci - nu};
                result += power * eval(std::move(sub));
                power *= up;
            }
            result += scalar_pow(up, ci);
        } else {
            // all remaining level-i tokens sit in p_{ij}: drop to level i-1.
            // The markings below carry exactly low_total tokens on P_{i-1},
            // which must cover the level-i minimal marked potential, i.e.
            // pot(p_{ij}) (or the level maximum when c_i = 0); otherwise the
            // lifted markings violate phi_i <= m(P_{i-1}) and the branch is
            // empty.
            auto descend = [&]() -> Scalar {
                const long long low_total = key[2 + (i - 2)] - ci * ls_.v[i - 2][place];
                long long need = ls_.potential[place];
                if (ci == 0) {
                    need = 0;
                    for (int p : ls_.level_places[i - 1])
                        need = std::max(need, ls_.potential[p]);
                }
                if (need > low_total) return Scalar(0);
                std::vector<long long> sub;
                sub.push_back(i - 1);
                sub.push_back(static_cast<long long>(ls_.place_order[i - 2].size()));
                for (int l = 0; l < i - 1; ++l)
                    sub.push_back(key[2 + l] - ci * ls_.v[l][place]);
                return eval(std::move(sub));
            };
            if (j == 1) {
                result = scalar_pow(up, ci) * descend();
            } else {
                Scalar power(1);
                for (long long a = 0; a < ci; ++a) {
                    std::vector<long long> sub;
                    sub.push_back(i);
                    sub.push_back(j - 1);
                    for (int l = 0; l < i; ++l) sub.push_back(key[2 + l] - a * ls_.v[l][place]);
                    result += power * eval(std::move(sub));
                    power *= up;
                }
                result += scalar_pow(up, ci) * descend();
            }
        }
        memo_.emplace(std::move(key), result);
        return result;
    }

    const LevelStructure& ls_;
    const std::vector<Scalar>& u_;
    std::unordered_map<std::vector<long long>, Scalar, DpKeyHash> memo_;
};

} // namespace detail

struct NormConstStats {
    size_t memo_entries = 0;
};

/// Normalising constant G = sum over R(m0) of prod_p u_p^{m(p)}, computed by
/// dynamic programming without enumerating the reachability set. Requires a
/// live initial marking. Scalar is double or Rational.
template <class Scalar>
Scalar normalising_constant(const LevelStructure& ls, const std::vector<Scalar>& u,
                            const Marking& m0, NormConstStats* stats = nullptr) {
    if (!is_live(ls, m0)) fail_property("initial marking is not live");
    if (u.size() != m0.size()) fail_input("u size mismatch");
    detail::NormConstDp<Scalar> dp(ls, u);
    Scalar g = dp.run(s_invariant_values(ls, m0));
    if (stats) stats->memo_entries = dp.memo_entries();
    return g;
}

/// All non-negative markings that agree with the invariant values C, built
/// level by level from the top. With the n-condition filter this is the set
/// S(m0) characterizing reachability from live markings.
inline std::vector<Marking> enumerate_invariant_set(const LevelStructure& ls,
                                                    const std::vector<long long>& c_values,
                                                    size_t cap = 2'000'000) {
    std::vector<Marking> out;
    Marking work(ls.place_level.size());
    size_t visited = 0;

    std::function<void(int)> level_rec = [&](int i) {
        if (i == 0) {
            out.push_back(work);
            return;
        }
        long long total = c_values[i - 1];
        for (int lvl = i + 1; lvl <= ls.n; ++lvl)
            for (int q : ls.level_places[lvl - 1]) total -= ls.v[i - 1][q] * work[q];
        if (total < 0) return;
        const auto& places = ls.level_places[i - 1];
        std::function<void(size_t, long long)> distribute = [&](size_t idx, long long rest) {
            if (++visited > cap) fail_budget("invariant set enumeration exceeded cap");
            if (idx + 1 == places.size()) {
                work[places[idx]] = rest;
                level_rec(i - 1);
                work[places[idx]] = 0;
                return;
            }
            for (long long k = 0; k <= rest; ++k) {
                work[places[idx]] = k;
                distribute(idx + 1, rest - k);
            }
            work[places[idx]] = 0;
        };
        distribute(0, total);
    };
    level_rec(ls.n);
    return out;
}

/// The set { m : n-condition and V m = V m0 }, which equals R(m0) for live m0.
inline std::vector<Marking> reachability_set_by_invariants(const LevelStructure& ls,
                                                           const Marking& m0,
                                                           size_t cap = 2'000'000) {
    if (!is_live(ls, m0)) fail_property("initial marking is not live");
    std::vector<Marking> out;
    for (Marking& m : enumerate_invariant_set(ls, s_invariant_values(ls, m0), cap))
        if (is_live(ls, m)) out.push_back(std::move(m));
    return out;
}

/// Product-form stationary distribution of a Pi^3 net evaluated pointwise,
/// with the normalising constant from the dynamic program rather than state
/// enumeration.
struct Pi3Stationary {
    std::vector<double> u;
    double g = 0.0;
    std::vector<long long> invariants;
    LevelStructure ls;

    double operator()(const Marking& m) const {
        if (!m.non_negative()) return 0.0;
        if (!is_live(ls, m)) return 0.0;
        if (s_invariant_values(ls, m) != invariants) return 0.0;
        return evaluate_measure(u, m) / g;
    }
};

inline Pi3Stationary stationary_pi3(const Net& net, const LevelStructure& ls,
                                    const std::vector<double>& rates, const Marking& m0) {
    Pi3Stationary out;
    out.ls = ls;
    out.u = solve_traffic(net, rates).u;
    out.invariants = s_invariant_values(ls, m0);
    out.g = normalising_constant<double>(ls, out.u, m0);
    return out;
}

} // namespace pfpn
