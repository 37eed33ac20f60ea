#pragma once

#include <cmath>
#include <vector>

#include "pfpn/dense.hpp"
#include "pfpn/linalg.hpp"
#include "pfpn/markov.hpp"
#include "pfpn/structural.hpp"

namespace pfpn {

inline std::vector<double> resolve_rates(const Net& net) {
    if (!net.rates) fail_input("net has no rates");
    return *net.rates;
}

struct ProductFormSolution {
    std::vector<double> u;  // one positive factor per place
    double residual = 0.0;  // max relative violation of the traffic equations
};

/// Max relative violation of the per-complex balance equations at u.
inline double traffic_residual(const Net& net, const std::vector<double>& rates,
                               const std::vector<double>& u) {
    ReactionGraph g = reaction_graph(net);
    auto measure = [&](const Bag& c) {
        double x = 1.0;
        for (const auto& [p, k] : c.items) x *= std::pow(u[p], static_cast<double>(k));
        return x;
    };
    double worst = 0.0;
    for (size_t ci = 0; ci < g.size(); ++ci) {
        double lhs = 0.0, rhs = 0.0;
        for (size_t t = 0; t < net.transition_count(); ++t) {
            if (g.input_complex[t] == static_cast<int>(ci)) lhs += rates[t];
            if (g.output_complex[t] == static_cast<int>(ci))
                rhs += rates[t] * measure(g.complexes[g.input_complex[t]]);
        }
        lhs *= measure(g.complexes[ci]);
        double denom = std::max(lhs, rhs);
        if (denom > 0) worst = std::max(worst, std::fabs(lhs - rhs) / denom);
    }
    return worst;
}

/// Solves the traffic equations of a Pi^2 net. The complex measures x_c are
/// the stationary weights of each reaction-graph component run as a CTMC with
/// arc rates mu_t (first complex of a component pinned to 1); the place
/// factors then come from the log-linear system sum_p c_p log u_p = log x_c,
/// solved with one free scale per component.
inline ProductFormSolution solve_traffic(const Net& net, const std::vector<double>& rates) {
    if (rates.size() != net.transition_count()) fail_input("rate vector size mismatch");
    for (double r : rates)
        if (!(r > 0)) fail_input("rates must be positive");
    StructuralReport rep = classify(net);
    if (!rep.is_pi2) fail_property("not a Pi^2-net");

    ReactionGraph g = reaction_graph(net);
    std::vector<double> x(g.size(), 1.0);
    for (int comp = 0; comp < g.component_count; ++comp) {
        std::vector<int> nodes;
        for (size_t ci = 0; ci < g.size(); ++ci)
            if (g.component[ci] == comp) nodes.push_back(static_cast<int>(ci));
        const int k = static_cast<int>(nodes.size());
        if (k == 1) continue;
        std::vector<int> local(g.size(), -1);
        for (int i = 0; i < k; ++i) local[nodes[i]] = i;

        // stationary weights of the component chain via GTH elimination,
        // then pinned so the first complex carries weight 1
        DenseMatrix a(k, k);
        for (size_t t = 0; t < net.transition_count(); ++t) {
            int from = local[g.input_complex[t]];
            if (from < 0) continue;
            a.at(from, local[g.output_complex[t]]) += rates[t];
        }
        auto sol = gth_stationary(std::move(a));
        if (!sol) fail_internal("singular component balance system");
        for (int i = 0; i < k; ++i) {
            if (!((*sol)[i] > 0)) fail_internal("non-positive complex measure");
            x[nodes[i]] = (*sol)[i] / (*sol)[0];
        }
    }

    // stacked log system over log u_p and one log-scale per component
    const int np = static_cast<int>(net.place_count());
    DenseMatrix m(static_cast<int>(g.size()), np + g.component_count);
    std::vector<double> rhs(g.size(), 0.0);
    for (size_t ci = 0; ci < g.size(); ++ci) {
        for (const auto& [p, k] : g.complexes[ci].items)
            m.at(static_cast<int>(ci), p) = static_cast<double>(k);
        m.at(static_cast<int>(ci), np + g.component[ci]) = -1.0;
        rhs[ci] = std::log(x[ci]);
    }
    auto [z, fit_residual] = least_squares(m, rhs);
    if (fit_residual > 1e-12)
        fail_internal("traffic log system inconsistent (deficiency is not zero?)");

    ProductFormSolution out;
    out.u.resize(net.place_count());
    for (int p = 0; p < np; ++p) out.u[p] = std::exp(z[p]);
    out.residual = traffic_residual(net, rates, out.u);
    return out;
}

/// nu(m) = prod_p u_p^{m(p)}.
inline double evaluate_measure(const std::vector<double>& u, const Marking& m) {
    double v = 1.0;
    for (size_t p = 0; p < m.size(); ++p)
        if (m[p] != 0) v *= std::pow(u[p], static_cast<double>(m[p]));
    return v;
}

/// Product-form stationary distribution over the enumerated reachability set,
/// aligned with rg.states.
inline std::vector<double> stationary_by_product_form(const Net& net,
                                                      const std::vector<double>& rates,
                                                      const ReachabilityGraph& rg) {
    if (rg.truncated) fail_budget("reachability graph is truncated");
    ProductFormSolution sol = solve_traffic(net, rates);
    std::vector<double> pi(rg.states.size());
    double mass = 0.0;
    for (size_t s = 0; s < rg.states.size(); ++s) {
        pi[s] = evaluate_measure(sol.u, rg.states[s]);
        mass += pi[s];
    }
    for (double& v : pi) v /= mass;
    return pi;
}

/// Directions w such that u_p -> u_p * exp(eps * w_p) preserves the traffic
/// equations: the place part of the kernel of the stacked log system.
inline std::vector<RatVec> traffic_scaling_directions(const Net& net) {
    ReactionGraph g = reaction_graph(net);
    const size_t np = net.place_count();
    RatMat m(g.size(), RatVec(np + g.component_count, Rational(0)));
    for (size_t ci = 0; ci < g.size(); ++ci) {
        for (const auto& [p, k] : g.complexes[ci].items) m[ci][p] = Rational(k);
        m[ci][np + g.component[ci]] = Rational(-1);
    }
    std::vector<RatVec> out;
    for (const RatVec& v : nullspace(std::move(m))) {
        RatVec w(v.begin(), v.begin() + np);
        bool nonzero = false;
        for (const Rational& r : w)
            if (!r.is_zero()) nonzero = true;
        if (nonzero) out.push_back(std::move(w));
    }
    return out;
}

} // namespace pfpn
