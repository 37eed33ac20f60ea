#pragma once

#include <deque>
#include <unordered_map>
#include <vector>

#include "pfpn/net.hpp"

namespace pfpn {

constexpr size_t kDefaultStateBudget = 1'000'000;

/// Explicit reachability graph. States are stored in BFS discovery order
/// (transitions tried in net order), so the graph is reproducible.
struct ReachabilityGraph {
    struct Edge {
        int from;
        int transition;
        int to;
    };

    std::vector<Marking> states;
    std::vector<Edge> edges;
    int initial = 0;
    bool truncated = false;

    std::unordered_map<Marking, int, MarkingHash> index;

    int state_of(const Marking& m) const {
        auto it = index.find(m);
        return it == index.end() ? -1 : it->second;
    }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(states.size());
        for (const Edge& e : edges) adj[e.from].push_back(e.to);
        return adj;
    }
};

inline ReachabilityGraph reachability_graph(const Net& net, const Marking& m0,
                                            size_t budget = kDefaultStateBudget) {
    if (m0.size() != net.place_count()) fail_input("marking size does not match place count");
    if (!m0.non_negative()) fail_input("initial marking must be non-negative");

    ReachabilityGraph g;
    g.states.push_back(m0);
    g.index.emplace(m0, 0);
    std::deque<int> queue{0};
    while (!queue.empty() && !g.truncated) {
        int s = queue.front();
        queue.pop_front();
        const Marking current = g.states[s];
        for (size_t t = 0; t < net.transition_count(); ++t) {
            if (!current.covers(net.input[t])) continue;
            Marking next = current;
            next.apply(net.input[t], net.output[t]);
            auto it = g.index.find(next);
            int target;
            if (it != g.index.end()) {
                target = it->second;
            } else if (g.states.size() < budget) {
                target = static_cast<int>(g.states.size());
                g.states.push_back(next);
                g.index.emplace(std::move(next), target);
                queue.push_back(target);
            } else {
                g.truncated = true;
                break;
            }
            g.edges.push_back({s, static_cast<int>(t), target});
        }
    }
    return g;
}

/// BFS distance between two states of the graph, or -1 if unreachable.
inline long long shortest_path_length(const ReachabilityGraph& g, int from, int to) {
    std::vector<long long> dist(g.states.size(), -1);
    auto adj = g.adjacency();
    std::deque<int> queue{from};
    dist[from] = 0;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (u == to) return dist[u];
        for (int v : adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
    }
    return -1;
}

} // namespace pfpn
