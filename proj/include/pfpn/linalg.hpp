#pragma once

#include <cstdlib>
#include <optional>
#include <vector>

#include "pfpn/rational.hpp"

namespace pfpn {

using RatVec = std::vector<Rational>;
using RatMat = std::vector<RatVec>; // row major, rectangular

namespace detail {

// Pivot choice for exact elimination: any nonzero works, a small representation
// keeps intermediate numerators from growing.
inline long long pivot_weight(const Rational& r) {
    long long n = r.num() < 0 ? -r.num() : r.num();
    return n > r.den() ? n : r.den();
}

} // namespace detail

/// Reduced row echelon form with full pivoting. Returns the rank; `pivot_cols`
/// (if given) receives the pivot column of each of the first `rank` rows.
inline int rref(RatMat& m, std::vector<int>* pivot_cols = nullptr) {
    if (pivot_cols) pivot_cols->clear();
    if (m.empty()) return 0;
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    int rank = 0;
    std::vector<bool> col_used(cols, false);
    while (rank < rows) {
        // full pivot search over the untouched submatrix
        int pr = -1, pc = -1;
        long long best = 0;
        for (int i = rank; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                if (col_used[j] || m[i][j].is_zero()) continue;
                long long w = detail::pivot_weight(m[i][j]);
                if (pr < 0 || w < best) { pr = i; pc = j; best = w; }
            }
        }
        if (pr < 0) break;
        std::swap(m[rank], m[pr]);
        col_used[pc] = true;
        const Rational inv = Rational(1) / m[rank][pc];
        for (int j = 0; j < cols; ++j) m[rank][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == rank || m[i][pc].is_zero()) continue;
            const Rational f = m[i][pc];
            for (int j = 0; j < cols; ++j) m[i][j] -= f * m[rank][j];
        }
        if (pivot_cols) pivot_cols->push_back(pc);
        ++rank;
    }
    return rank;
}

inline int rank(RatMat m) { return rref(m); }

/// Solves A x = b exactly. Returns nullopt when inconsistent; free variables
/// are fixed to zero, so the result is deterministic.
inline std::optional<RatVec> solve(const RatMat& a, const RatVec& b) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
    if (rows == 0) return RatVec(cols, Rational(0));
    RatMat aug(rows, RatVec(cols + 1));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) aug[i][j] = a[i][j];
        aug[i][cols] = b[i];
    }
    std::vector<int> pivots;
    // keep the rhs out of the pivot search by eliminating on columns < cols only
    int r = 0;
    std::vector<bool> col_used(cols, false);
    while (r < rows) {
        int pr = -1, pc = -1;
        long long best = 0;
        for (int i = r; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                if (col_used[j] || aug[i][j].is_zero()) continue;
                long long w = detail::pivot_weight(aug[i][j]);
                if (pr < 0 || w < best) { pr = i; pc = j; best = w; }
            }
        }
        if (pr < 0) break;
        std::swap(aug[r], aug[pr]);
        col_used[pc] = true;
        const Rational inv = Rational(1) / aug[r][pc];
        for (int j = 0; j <= cols; ++j) aug[r][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || aug[i][pc].is_zero()) continue;
            const Rational f = aug[i][pc];
            for (int j = 0; j <= cols; ++j) aug[i][j] -= f * aug[r][j];
        }
        pivots.push_back(pc);
        ++r;
    }
    for (int i = r; i < rows; ++i)
        if (!aug[i][cols].is_zero()) return std::nullopt;
    RatVec x(cols, Rational(0));
    for (int i = 0; i < r; ++i) x[pivots[i]] = aug[i][cols];
    return x;
}

/// Scales a rational vector to coprime integers with positive leading entry.
inline RatVec normalize_integer(RatVec v) {
    long long l = 1;
    for (const Rational& r : v) l = std::llabs(l / std::gcd(l, r.den()) * r.den());
    long long g = 0;
    for (Rational& r : v) {
        r *= Rational(l);
        g = std::gcd(g, r.num());
    }
    if (g > 1)
        for (Rational& r : v) r /= Rational(g);
    for (const Rational& r : v) {
        if (r.is_zero()) continue;
        if (r.num() < 0)
            for (Rational& s : v) s = -s;
        break;
    }
    return v;
}

/// Basis of { x : A x = 0 }, one vector per free column, normalized.
inline std::vector<RatVec> nullspace(RatMat a) {
    if (a.empty()) return {};
    const int cols = static_cast<int>(a[0].size());
    std::vector<int> pivots;
    const int r = rref(a, &pivots);
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<RatVec> basis;
    for (int f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        RatVec v(cols, Rational(0));
        v[f] = Rational(1);
        for (int i = 0; i < r; ++i) v[pivots[i]] = -a[i][f];
        basis.push_back(normalize_integer(std::move(v)));
    }
    return basis;
}

} // namespace pfpn
