#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "asymlin/rational.hpp"

namespace asymlin {

using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>; // row major
using QTensor = std::vector<QMat>; // [target][source1][source2]

inline Rational dot(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw input_error("dot: dimension mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline QVec add(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw input_error("add: dimension mismatch");
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline QVec sub(const QVec& a, const QVec& b) {
    if (a.size() != b.size()) throw input_error("sub: dimension mismatch");
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline QVec scale_vec(const Rational& t, const QVec& a) {
    QVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = t * a[i];
    return r;
}

inline QVec neg(const QVec& a) { return scale_vec(Rational(-1), a); }

inline bool is_zero(const QVec& a) {
    return std::all_of(a.begin(), a.end(), [](const Rational& q) { return q == 0; });
}

inline QVec zero_vec(std::size_t n) { return QVec(n, Rational(0)); }

inline QVec unit_vec(std::size_t n, std::size_t k) {
    QVec e = zero_vec(n);
    e[k] = 1;
    return e;
}

inline Rational l1_norm(const QVec& a) {
    Rational s = 0;
    for (const auto& q : a) s += q < 0 ? -q : q;
    return s;
}

inline Rational linf_dist(const QVec& a, const QVec& b) {
    Rational best = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        Rational d = a[i] - b[i];
        if (d < 0) d = -d;
        if (d > best) best = d;
    }
    return best;
}

inline QVec mat_apply(const QMat& m, const QVec& x) {
    QVec y(m.size(), Rational(0));
    for (std::size_t i = 0; i < m.size(); ++i) y[i] = dot(m[i], x);
    return y;
}

/// Transpose-apply: y = m^T x, where x indexes the rows of m.
inline QVec mat_tapply(const QMat& m, const QVec& x) {
    if (m.size() != x.size()) throw input_error("mat_tapply: dimension mismatch");
    if (m.empty()) return {};
    QVec y(m[0].size(), Rational(0));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) y[j] += m[i][j] * x[i];
    return y;
}

inline QMat mat_transpose(const QMat& m) {
    if (m.empty()) return {};
    QMat t(m[0].size(), QVec(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

inline std::size_t rank(QMat m) {
    std::size_t rows = m.size();
    if (rows == 0) return 0;
    std::size_t cols = m[0].size(), r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[r]);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c] / m[r][c];
            for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return r;
}

/// Basis of {x : m x = 0}.
inline std::vector<QVec> kernel_basis(QMat m, std::size_t cols) {
    std::size_t rows = m.size();
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && m[piv][c] == 0) ++piv;
        if (piv == rows) continue;
        std::swap(m[piv], m[r]);
        Rational p = m[r][c];
        for (std::size_t j = 0; j < cols; ++j) m[r][j] /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (std::size_t j = 0; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivot_col.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivot_col) is_pivot[c] = true;
    std::vector<QVec> basis;
    for (std::size_t free_c = 0; free_c < cols; ++free_c) {
        if (is_pivot[free_c]) continue;
        QVec v = zero_vec(cols);
        v[free_c] = 1;
        for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -m[i][free_c];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Scale a rational vector to a primitive integer vector with the same
/// direction (used to canonicalize rays).
inline QVec primitive(const QVec& v) {
    Integer l = 1;
    for (const auto& q : v) l = lcm(l, denominator(q));
    std::vector<Integer> w(v.size());
    Integer g = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        w[i] = numerator(v[i]) * (l / denominator(v[i]));
        g = gcd(g, w[i]);
    }
    if (g == 0) return zero_vec(v.size());
    QVec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = Rational(w[i] / g);
    return r;
}

} // namespace asymlin
