#pragma once

#include "poissonkit/expr.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace poissonkit {

/// Dense exact linear algebra over any field with +,-,*,/ and an is-zero
/// test. Used with mpq_class (coefficient solves) and Expr (the rational
/// function field, e.g. inverting the bivector matrix).
template <typename F>
struct FieldOps {
    static bool is_zero(const F& x) { return x == 0; }
};

template <>
struct FieldOps<Expr> {
    static bool is_zero(const Expr& x) { return x.is_zero(); }
};

template <typename F>
using Matrix = std::vector<std::vector<F>>;

/// In-place reduced row echelon form; returns the pivot column of each pivot
/// row in order.
template <typename F>
std::vector<int> rref(Matrix<F>& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    const size_t rows = m.size(), cols = m[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t sel = r;
        while (sel < rows && FieldOps<F>::is_zero(m[sel][c])) ++sel;
        if (sel == rows) continue;
        std::swap(m[sel], m[r]);
        F inv = m[r][c];
        for (size_t j = c; j < cols; ++j) m[r][j] = m[r][j] / inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || FieldOps<F>::is_zero(m[i][c])) continue;
            F f = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] = m[i][j] - f * m[r][j];
        }
        pivots.push_back(static_cast<int>(c));
        ++r;
    }
    return pivots;
}

/// Basis of the nullspace of m (each vector has one free variable set to 1).
template <typename F>
std::vector<std::vector<F>> nullspace(Matrix<F> m, const F& zero, const F& one) {
    if (m.empty()) return {};
    const size_t cols = m[0].size();
    std::vector<int> pivots = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (int p : pivots) is_pivot[static_cast<size_t>(p)] = true;
    std::vector<std::vector<F>> basis;
    for (size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<F> v(cols, zero);
        v[free] = one;
        for (size_t pr = 0; pr < pivots.size(); ++pr) {
            v[static_cast<size_t>(pivots[pr])] = zero - m[pr][free];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// One solution of A x = b, or nullopt if inconsistent. Free variables are
/// set to zero.
template <typename F>
std::optional<std::vector<F>> solve(Matrix<F> a, const std::vector<F>& b, const F& zero) {
    const size_t rows = a.size();
    if (rows != b.size()) throw std::invalid_argument("solve: size mismatch");
    if (rows == 0) return std::vector<F>{};
    const size_t cols = a[0].size();
    for (size_t i = 0; i < rows; ++i) a[i].push_back(b[i]);
    std::vector<int> pivots = rref(a);
    for (size_t pr = 0; pr < pivots.size(); ++pr) {
        if (static_cast<size_t>(pivots[pr]) == cols) return std::nullopt;  // 0 = 1 row
    }
    std::vector<F> x(cols, zero);
    for (size_t pr = 0; pr < pivots.size(); ++pr) {
        x[static_cast<size_t>(pivots[pr])] = a[pr][cols];
    }
    return x;
}

/// Inverse of a square matrix, or nullopt if singular.
template <typename F>
std::optional<Matrix<F>> inverse(const Matrix<F>& m, const F& zero, const F& one) {
    const size_t n = m.size();
    Matrix<F> aug(n);
    for (size_t i = 0; i < n; ++i) {
        if (m[i].size() != n) throw std::invalid_argument("inverse: not square");
        aug[i] = m[i];
        for (size_t j = 0; j < n; ++j) aug[i].push_back(i == j ? one : zero);
    }
    std::vector<int> pivots = rref(aug);
    if (pivots.size() != n) return std::nullopt;
    Matrix<F> inv(n, std::vector<F>(n, zero));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
    }
    return inv;
}

}  // namespace poissonkit
