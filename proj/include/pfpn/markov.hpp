#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "pfpn/dense.hpp"
#include "pfpn/net.hpp"
#include "pfpn/reach.hpp"
#include "pfpn/reaction.hpp"

namespace pfpn {

/// CTMC generator over the states of a reachability graph. q(m,m') sums the
/// rates of all transitions firing m -> m'; diagonals make row sums vanish.
struct Generator {
    int n = 0;
    std::vector<std::map<int, double>> rows; // off-diagonal entries
    std::vector<double> diagonal;

    double at(int i, int j) const {
        if (i == j) return diagonal[i];
        auto it = rows[i].find(j);
        return it == rows[i].end() ? 0.0 : it->second;
    }
};

inline Generator build_generator(const Net& net, const ReachabilityGraph& rg) {
    if (!net.rates) fail_input("net has no rates");
    if (rg.truncated) fail_budget("reachability graph is truncated");
    Generator gen;
    gen.n = static_cast<int>(rg.states.size());
    gen.rows.assign(gen.n, {});
    gen.diagonal.assign(gen.n, 0.0);
    for (const auto& e : rg.edges) {
        if (e.from == e.to) continue; // cannot happen: input bag != output bag
        gen.rows[e.from][e.to] += (*net.rates)[e.transition];
    }
    for (int i = 0; i < gen.n; ++i) {
        double s = 0.0;
        for (const auto& [j, q] : gen.rows[i]) s += q;
        gen.diagonal[i] = -s;
    }
    return gen;
}

struct SteadyState {
    std::vector<double> pi;
    double residual = 0.0; // max |pi Q| entry
};

/// Stationary distribution of an irreducible generator: pi Q = 0, sum pi = 1.
/// Solved by dense GTH state elimination, whose subtraction-free updates keep
/// the relative accuracy of every entry independent of the mass range.
inline SteadyState steady_state(const Generator& gen) {
    const int n = gen.n;
    if (n == 0) fail_input("empty generator");
    if (n > 6000) fail_budget("dense stationary solve beyond 6000 states");
    {
        SccResult scc = strongly_connected_components([&] {
            std::vector<std::vector<int>> adj(n);
            for (int i = 0; i < n; ++i)
                for (const auto& [j, q] : gen.rows[i]) adj[i].push_back(j);
            return adj;
        }());
        if (scc.count != 1) fail_property("generator graph is not strongly connected");
    }
    DenseMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (const auto& [j, q] : gen.rows[i]) a.at(i, j) = q;
    auto x = gth_stationary(std::move(a));
    if (!x) fail_internal("singular steady-state system");

    SteadyState out;
    out.pi = std::move(*x);
    for (int j = 0; j < n; ++j) {
        double s = out.pi[j] * gen.diagonal[j];
        for (int i = 0; i < n; ++i) {
            auto it = gen.rows[i].find(j);
            if (it != gen.rows[i].end()) s += out.pi[i] * it->second;
        }
        out.residual = std::max(out.residual, std::fabs(s));
    }
    return out;
}

struct LivenessReport {
    bool live = false;
    std::vector<bool> transition_live; // indexed by transition
};

/// A transition is live iff every terminal SCC of the reachability graph
/// contains a state enabling it.
inline LivenessReport is_live_oracle(const Net& net, const ReachabilityGraph& rg) {
    if (rg.truncated) fail_budget("reachability graph is truncated");
    SccResult scc = strongly_connected_components(rg.adjacency());
    std::vector<bool> terminal(scc.count, true);
    for (const auto& e : rg.edges)
        if (scc.comp[e.from] != scc.comp[e.to]) terminal[scc.comp[e.from]] = false;

    std::vector<std::vector<bool>> enables(scc.count,
                                           std::vector<bool>(net.transition_count(), false));
    for (size_t s = 0; s < rg.states.size(); ++s)
        for (size_t t = 0; t < net.transition_count(); ++t)
            if (rg.states[s].covers(net.input[t])) enables[scc.comp[s]][t] = true;

    LivenessReport rep;
    rep.transition_live.assign(net.transition_count(), true);
    for (size_t t = 0; t < net.transition_count(); ++t)
        for (int c = 0; c < scc.count; ++c)
            if (terminal[c] && !enables[c][t]) {
                rep.transition_live[t] = false;
                break;
            }
    rep.live = std::all_of(rep.transition_live.begin(), rep.transition_live.end(),
                           [](bool b) { return b; });
    return rep;
}

/// A home marking lies in the unique terminal SCC, hence is reachable from
/// every state of the graph.
inline bool is_home_marking_oracle(const ReachabilityGraph& rg, const Marking& m) {
    if (rg.truncated) fail_budget("reachability graph is truncated");
    int s = rg.state_of(m);
    if (s < 0) fail_input("marking is not a state of the reachability graph");
    SccResult scc = strongly_connected_components(rg.adjacency());
    std::vector<bool> terminal(scc.count, true);
    for (const auto& e : rg.edges)
        if (scc.comp[e.from] != scc.comp[e.to]) terminal[scc.comp[e.from]] = false;
    int terminal_count = 0;
    for (bool t : terminal) terminal_count += t ? 1 : 0;
    return terminal[scc.comp[s]] && terminal_count == 1;
}

} // namespace pfpn
