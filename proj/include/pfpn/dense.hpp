#pragma once

#include <cmath>
#include <optional>
#include <vector>

namespace pfpn {

/// Small dense double-precision helpers for the stochastic solvers.
struct DenseMatrix {
    int rows = 0, cols = 0;
    std::vector<double> a; // row major

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
    double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

/// LU solve with partial pivoting; nullopt on a (numerically) singular matrix.
inline std::optional<std::vector<double>> lu_solve(DenseMatrix m, std::vector<double> b) {
    const int n = m.rows;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::fabs(m.at(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::fabs(m.at(i, k));
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) return std::nullopt;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
            std::swap(b[k], b[piv]);
        }
        const double inv = 1.0 / m.at(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = m.at(i, k) * inv;
            if (f == 0.0) continue;
            m.at(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) m.at(i, j) -= f * m.at(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= m.at(i, j) * x[j];
        x[i] = s / m.at(i, i);
    }
    return x;
}

/// Stationary distribution of an irreducible CTMC generator by
/// Grassmann-Taksar-Heyman state elimination. Only off-diagonal entries of
/// `rates` are read (rates[i][j] = rate i -> j, i != j). Subtraction-free, so
/// every entry of pi carries near-machine relative accuracy even when the
/// masses span many orders of magnitude.
inline std::optional<std::vector<double>> gth_stationary(DenseMatrix rates) {
    const int n = rates.rows;
    if (n == 0) return std::nullopt;
    std::vector<double> out_rate(n, 0.0);
    for (int k = n - 1; k >= 1; --k) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) s += rates.at(k, j);
        if (!(s > 0.0)) return std::nullopt; // not irreducible
        out_rate[k] = s;
        for (int i = 0; i < k; ++i) {
            const double f = rates.at(i, k) / s;
            if (f == 0.0) continue;
            for (int j = 0; j < k; ++j)
                if (j != i) rates.at(i, j) += f * rates.at(k, j);
        }
    }
    std::vector<double> pi(n, 0.0);
    pi[0] = 1.0;
    double total = 1.0;
    for (int k = 1; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < k; ++i) s += pi[i] * rates.at(i, k);
        pi[k] = s / out_rate[k];
        total += pi[k];
    }
    for (double& p : pi) p /= total;
    return pi;
}

/// Minimum-norm-flavoured least squares via pivoted normal equations.
/// Rank-deficient directions are fixed to zero, which makes the output
/// deterministic. Returns (solution, residual of the original system).
inline std::pair<std::vector<double>, double> least_squares(const DenseMatrix& m,
                                                            const std::vector<double>& b) {
    const int rows = m.rows, cols = m.cols;
    DenseMatrix g(cols, cols);
    std::vector<double> rhs(cols, 0.0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            if (m.at(i, j) == 0.0) continue;
            rhs[j] += m.at(i, j) * b[i];
            for (int k = 0; k < cols; ++k) g.at(j, k) += m.at(i, j) * m.at(i, k);
        }
    double scale = 0.0;
    for (int j = 0; j < cols; ++j) scale = std::max(scale, std::fabs(g.at(j, j)));
    const double tol = scale * 1e-12;

    std::vector<int> order;
    std::vector<bool> used(cols, false);
    for (int step = 0; step < cols; ++step) {
        int piv = -1;
        double best = tol;
        for (int j = 0; j < cols; ++j)
            if (!used[j] && std::fabs(g.at(j, j)) > best) { best = std::fabs(g.at(j, j)); piv = j; }
        if (piv < 0) break;
        used[piv] = true;
        order.push_back(piv);
        const double inv = 1.0 / g.at(piv, piv);
        for (int i = 0; i < cols; ++i) {
            if (i == piv || g.at(i, piv) == 0.0) continue;
            const double f = g.at(i, piv) * inv;
            for (int j = 0; j < cols; ++j) g.at(i, j) -= f * g.at(piv, j);
            rhs[i] -= f * rhs[piv];
        }
    }
    std::vector<double> x(cols, 0.0);
    for (int j : order) x[j] = rhs[j] / g.at(j, j);

    double resid = 0.0;
    for (int i = 0; i < rows; ++i) {
        double s = -b[i];
        for (int j = 0; j < cols; ++j) s += m.at(i, j) * x[j];
        resid = std::max(resid, std::fabs(s));
    }
    return {x, resid};
}

} // namespace pfpn
