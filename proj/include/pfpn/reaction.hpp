#pragma once

#include <map>
#include <string>
#include <vector>

#include "pfpn/net.hpp"

namespace pfpn {

/// Strongly connected components by iterative Kosaraju. Component ids are
/// deterministic for a fixed adjacency list.
struct SccResult {
    int count = 0;
    std::vector<int> comp; // node -> component id
};

inline SccResult strongly_connected_components(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<std::vector<int>> radj(n);
    for (int u = 0; u < n; ++u)
        for (int v : adj[u]) radj[v].push_back(u);

    std::vector<int> order;
    order.reserve(n);
    std::vector<char> seen(n, 0);
    std::vector<std::pair<int, size_t>> stack;
    for (int s = 0; s < n; ++s) {
        if (seen[s]) continue;
        seen[s] = 1;
        stack.push_back({s, 0});
        while (!stack.empty()) {
            auto& [u, i] = stack.back();
            if (i < adj[u].size()) {
                int v = adj[u][i++];
                if (!seen[v]) {
                    seen[v] = 1;
                    stack.push_back({v, 0});
                }
            } else {
                order.push_back(u);
                stack.pop_back();
            }
        }
    }

    SccResult res;
    res.comp.assign(n, -1);
    std::vector<int> dfs;
    for (int k = n - 1; k >= 0; --k) {
        int s = order[k];
        if (res.comp[s] >= 0) continue;
        int id = res.count++;
        dfs.push_back(s);
        res.comp[s] = id;
        while (!dfs.empty()) {
            int u = dfs.back();
            dfs.pop_back();
            for (int v : radj[u])
                if (res.comp[v] < 0) {
                    res.comp[v] = id;
                    dfs.push_back(v);
                }
        }
    }
    return res;
}

/// Complexes of a net and the reaction graph over them: one node per distinct
/// input/output bag, one arc per transition.
struct ReactionGraph {
    std::vector<Bag> complexes;                  // node id -> bag
    std::vector<int> input_complex;              // transition -> node of its input bag
    std::vector<int> output_complex;             // transition -> node of its output bag
    std::vector<int> component;                  // node -> connected component id
    int component_count = 0;
    std::vector<bool> component_strongly_connected;

    size_t size() const { return complexes.size(); }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(complexes.size());
        for (size_t t = 0; t < input_complex.size(); ++t)
            adj[input_complex[t]].push_back(output_complex[t]);
        return adj;
    }

    /// Transitions whose arc lies in the given component.
    std::vector<int> component_transitions(int comp) const {
        std::vector<int> out;
        for (size_t t = 0; t < input_complex.size(); ++t)
            if (component[input_complex[t]] == comp) out.push_back(static_cast<int>(t));
        return out;
    }
};

inline std::vector<Bag> complexes(const Net& net) {
    std::vector<Bag> out;
    std::map<Bag, int> index;
    for (size_t t = 0; t < net.transition_count(); ++t)
        for (const Bag* b : {&net.input[t], &net.output[t]})
            if (index.emplace(*b, static_cast<int>(out.size())).second) out.push_back(*b);
    return out;
}

inline ReactionGraph reaction_graph(const Net& net) {
    ReactionGraph g;
    std::map<Bag, int> index;
    auto node = [&](const Bag& b) {
        auto [it, fresh] = index.emplace(b, static_cast<int>(g.complexes.size()));
        if (fresh) g.complexes.push_back(b);
        return it->second;
    };
    for (size_t t = 0; t < net.transition_count(); ++t) {
        g.input_complex.push_back(node(net.input[t]));
        g.output_complex.push_back(node(net.output[t]));
    }

    // connected components via union of arc endpoints in both directions
    const int n = static_cast<int>(g.complexes.size());
    std::vector<std::vector<int>> undirected(n);
    for (size_t t = 0; t < net.transition_count(); ++t) {
        undirected[g.input_complex[t]].push_back(g.output_complex[t]);
        undirected[g.output_complex[t]].push_back(g.input_complex[t]);
    }
    g.component.assign(n, -1);
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (g.component[s] >= 0) continue;
        int id = g.component_count++;
        g.component[s] = id;
        stack.push_back(s);
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : undirected[u])
                if (g.component[v] < 0) {
                    g.component[v] = id;
                    stack.push_back(v);
                }
        }
    }

    // a component is strongly connected iff it does not split under SCC
    SccResult scc = strongly_connected_components(g.adjacency());
    g.component_strongly_connected.assign(g.component_count, true);
    std::vector<int> rep(g.component_count, -1);
    for (int v = 0; v < n; ++v) {
        int c = g.component[v];
        if (rep[c] < 0) rep[c] = scc.comp[v];
        else if (rep[c] != scc.comp[v]) g.component_strongly_connected[c] = false;
    }
    return g;
}

/// Reaction Petri net: the reaction graph viewed as a state machine, with one
/// place per complex. Place names come from a canonical complex encoding.
inline std::string complex_name(const Net& net, const Bag& bag) {
    if (bag.empty()) return "0";
    std::string s;
    for (const auto& [p, k] : bag.items) {
        if (!s.empty()) s += "+";
        if (k != 1) s += std::to_string(k);
        s += net.places[p];
    }
    return s;
}

} // namespace pfpn
