#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pfpn/linalg.hpp"
#include "pfpn/net.hpp"
#include "pfpn/reaction.hpp"

namespace pfpn {

inline bool is_weakly_reversible(const Net& net) {
    ReactionGraph g = reaction_graph(net);
    for (bool sc : g.component_strongly_connected)
        if (!sc) return false;
    return true;
}

/// Incidence matrix W as a place x transition rational matrix.
inline RatMat incidence_matrix(const Net& net) {
    RatMat w(net.place_count(), RatVec(net.transition_count(), Rational(0)));
    for (size_t t = 0; t < net.transition_count(); ++t) {
        for (const auto& [p, k] : net.input[t].items) w[p][t] -= Rational(k);
        for (const auto& [p, k] : net.output[t].items) w[p][t] += Rational(k);
    }
    return w;
}

inline int incidence_rank(const Net& net) {
    if (net.place_count() == 0 || net.transition_count() == 0) return 0;
    return rank(incidence_matrix(net));
}

/// |C| - l - rank(W), computed exactly.
inline long long deficiency(const Net& net) {
    ReactionGraph g = reaction_graph(net);
    return static_cast<long long>(g.size()) - g.component_count - incidence_rank(net);
}

/// Checks the three witness cases of wit(c) against every transition.
inline bool verify_witness(const Net& net, const Bag& complex, const RatVec& w) {
    if (w.size() != net.place_count()) return false;
    for (size_t t = 0; t < net.transition_count(); ++t) {
        Rational dot(0);
        for (const auto& [p, k] : net.input[t].items) dot -= w[p] * Rational(k);
        for (const auto& [p, k] : net.output[t].items) dot += w[p] * Rational(k);
        Rational expected(0);
        if (net.input[t] == complex) expected = Rational(-1);
        else if (net.output[t] == complex) expected = Rational(1);
        if (dot != expected) return false;
    }
    return true;
}

namespace detail {

/// Witness constraints for one complex: rows are transitions of W^T, the rhs
/// is -1 / +1 / 0; `zero_place` adds the equation w(p) = 0 when >= 0.
inline std::optional<RatVec> solve_witness(const Net& net, const Bag& complex, int zero_place) {
    const size_t rows = net.transition_count() + (zero_place >= 0 ? 1 : 0);
    RatMat a(rows, RatVec(net.place_count(), Rational(0)));
    RatVec b(rows, Rational(0));
    for (size_t t = 0; t < net.transition_count(); ++t) {
        for (const auto& [p, k] : net.input[t].items) a[t][p] -= Rational(k);
        for (const auto& [p, k] : net.output[t].items) a[t][p] += Rational(k);
        if (net.input[t] == complex) b[t] = Rational(-1);
        else if (net.output[t] == complex) b[t] = Rational(1);
    }
    if (zero_place >= 0) a[net.transition_count()][zero_place] = Rational(1);
    return solve(a, b);
}

} // namespace detail

/// Witness of every complex, or nullopt when some complex has none
/// (equivalently, when the deficiency is nonzero).
inline std::optional<std::vector<RatVec>> compute_witnesses(const Net& net) {
    ReactionGraph g = reaction_graph(net);
    std::vector<RatVec> out;
    out.reserve(g.size());
    for (const Bag& c : g.complexes) {
        auto w = detail::solve_witness(net, c, -1);
        if (!w) return std::nullopt;
        out.push_back(std::move(*w));
    }
    return out;
}

/// True when every complex still has a witness whose p-coordinate is zero.
/// This is the third applicability condition of the complex-update rule.
inline bool witnesses_avoiding_place(const Net& net, int place) {
    ReactionGraph g = reaction_graph(net);
    for (const Bag& c : g.complexes)
        if (!detail::solve_witness(net, c, place)) return false;
    return true;
}

enum class SemiflowKind { S, T };

/// Basis of T-semi-flows (W v = 0) or S-semi-flows (v W = 0), normalized to
/// coprime integer vectors with positive leading entry.
inline std::vector<RatVec> semiflow_basis(const Net& net, SemiflowKind kind) {
    if (net.place_count() == 0 || net.transition_count() == 0) {
        // kernel of an empty map is the whole space
        size_t dim = kind == SemiflowKind::T ? net.transition_count() : net.place_count();
        std::vector<RatVec> basis;
        for (size_t i = 0; i < dim; ++i) {
            RatVec v(dim, Rational(0));
            v[i] = Rational(1);
            basis.push_back(std::move(v));
        }
        return basis;
    }
    RatMat w = incidence_matrix(net);
    if (kind == SemiflowKind::S) {
        RatMat wt(net.transition_count(), RatVec(net.place_count(), Rational(0)));
        for (size_t p = 0; p < net.place_count(); ++p)
            for (size_t t = 0; t < net.transition_count(); ++t) wt[t][p] = w[p][t];
        return nullspace(std::move(wt));
    }
    return nullspace(std::move(w));
}

struct StructuralReport {
    bool weakly_reversible = false;
    long long deficiency = 0;
    int rank_w = 0;
    int complex_count = 0;
    int component_count = 0;
    bool is_pi2 = false;
    std::optional<std::vector<RatVec>> witnesses; // indexed like reaction_graph(net).complexes
};

inline StructuralReport classify(const Net& net) {
    StructuralReport r;
    ReactionGraph g = reaction_graph(net);
    r.weakly_reversible = true;
    for (bool sc : g.component_strongly_connected)
        if (!sc) r.weakly_reversible = false;
    r.rank_w = incidence_rank(net);
    r.complex_count = static_cast<int>(g.size());
    r.component_count = g.component_count;
    r.deficiency = r.complex_count - r.component_count - r.rank_w;
    r.witnesses = compute_witnesses(net);
    r.is_pi2 = r.weakly_reversible && r.deficiency == 0;
    return r;
}

} // namespace pfpn
