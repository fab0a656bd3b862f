#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "asymlin/linalg.hpp"

namespace asymlin {

enum class LpStatus { Optimal, Unbounded, Infeasible };

/// Result of an exact LP solve over Q.
///
/// Optimal carries the optimum, an optimal point, and nonnegative dual
/// multipliers y with y^T A = c and y^T b = optimum (a strong-duality
/// certificate). Unbounded carries an improving recession ray.
struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    std::optional<Rational> optimum;
    std::optional<QVec> witness;
    std::optional<QVec> dual;
};

namespace detail {

/// Dense rational simplex tableau for: maximize c.x s.t. A x <= b, x free.
/// Free variables are split x = u - w with u, w >= 0; one slack per row;
/// one auxiliary column for phase one. Bland's rule throughout, so no cycling.
class SimplexTableau {
  public:
    SimplexTableau(const QMat& a, const QVec& b, std::size_t n)
        : n_(n), m_(a.size()), aux_col_(2 * n + m_), ncols_(2 * n + m_ + 1) {
        rows_.assign(m_, QVec(ncols_ + 1, Rational(0)));
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                rows_[i][j] = a[i][j];
                rows_[i][n_ + j] = -a[i][j];
            }
            rows_[i][2 * n_ + i] = 1;
            rows_[i][aux_col_] = -1;
            rows_[i][ncols_] = b[i];
            basis_[i] = 2 * n_ + i;
        }
    }

    // Returns false when the region is empty.
    bool phase_one() {
        std::size_t worst = m_;
        for (std::size_t i = 0; i < m_; ++i)
            if (rows_[i][ncols_] < 0 && (worst == m_ || rows_[i][ncols_] < rows_[worst][ncols_]))
                worst = i;
        if (worst == m_) return true; // already feasible with the slack basis
        pivot(worst, aux_col_);
        QVec obj(ncols_, Rational(0));
        obj[aux_col_] = -1;
        set_objective(obj);
        run(ncols_);
        if (objective_value() != 0) return false;
        pivot_out_aux();
        return true;
    }

    void phase_two(const QVec& c) {
        QVec obj(ncols_, Rational(0));
        for (std::size_t j = 0; j < n_; ++j) {
            obj[j] = c[j];
            obj[n_ + j] = -c[j];
        }
        set_objective(obj);
        unbounded_col_.reset();
        run(aux_col_); // the auxiliary column may not re-enter
    }

    bool hit_unbounded() const { return unbounded_col_.has_value(); }

    QVec primal_point() const {
        QVec x(n_, Rational(0));
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) x[basis_[i]] += rows_[i][ncols_];
            else if (basis_[i] < 2 * n_) x[basis_[i] - n_] -= rows_[i][ncols_];
        }
        return x;
    }

    QVec dual_multipliers() const {
        QVec y(m_, Rational(0));
        for (std::size_t i = 0; i < m_; ++i) y[i] = zrow_[2 * n_ + i];
        return y;
    }

    QVec improving_ray() const {
        std::size_t e = *unbounded_col_;
        QVec delta(ncols_, Rational(0));
        delta[e] = 1;
        for (std::size_t i = 0; i < m_; ++i) delta[basis_[i]] = -rows_[i][e];
        QVec r(n_, Rational(0));
        for (std::size_t j = 0; j < n_; ++j) r[j] = delta[j] - delta[n_ + j];
        return primitive(r);
    }

  private:
    void set_objective(const QVec& c) {
        cur_obj_ = c;
        zrow_.assign(ncols_ + 1, Rational(0));
        for (std::size_t j = 0; j <= ncols_; ++j) {
            Rational z = 0;
            for (std::size_t i = 0; i < m_; ++i) {
                if (cur_obj_[basis_[i]] != 0) z += cur_obj_[basis_[i]] * rows_[i][j];
            }
            zrow_[j] = z - (j < ncols_ ? cur_obj_[j] : Rational(0));
        }
    }

    Rational objective_value() const {
        Rational v = 0;
        for (std::size_t i = 0; i < m_; ++i)
            if (cur_obj_[basis_[i]] != 0) v += cur_obj_[basis_[i]] * rows_[i][ncols_];
        return v;
    }

    void pivot(std::size_t r, std::size_t e) {
        Rational piv = rows_[r][e];
        for (std::size_t j = 0; j <= ncols_; ++j) rows_[r][j] /= piv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r || rows_[i][e] == 0) continue;
            Rational f = rows_[i][e];
            for (std::size_t j = 0; j <= ncols_; ++j) rows_[i][j] -= f * rows_[r][j];
        }
        if (!zrow_.empty() && zrow_[e] != 0) {
            Rational f = zrow_[e];
            for (std::size_t j = 0; j <= ncols_; ++j) zrow_[j] -= f * rows_[r][j];
        }
        basis_[r] = e;
    }

    // Bland: entering = lowest-index column with negative reduced cost;
    // leaving = min ratio, ties broken by lowest basic variable index.
    // Bland's rule excludes cycling, so the pivot guard only trips on an
    // implementation fault.
    void run(std::size_t col_limit) {
        std::size_t pivots = 0;
        const std::size_t guard = 2000 * (ncols_ + m_ + 1);
        for (;;) {
            if (++pivots > guard) throw std::logic_error("simplex pivot guard tripped");
            std::size_t e = col_limit;
            for (std::size_t j = 0; j < col_limit; ++j) {
                if (zrow_[j] < 0) {
                    e = j;
                    break;
                }
            }
            if (e == col_limit) return; // optimal
            std::size_t leave = m_;
            Rational best;
            for (std::size_t i = 0; i < m_; ++i) {
                if (rows_[i][e] <= 0) continue;
                Rational ratio = rows_[i][ncols_] / rows_[i][e];
                if (leave == m_ || ratio < best ||
                    (ratio == best && basis_[i] < basis_[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == m_) {
                unbounded_col_ = e;
                return;
            }
            pivot(leave, e);
        }
    }

    // After a successful phase one the auxiliary variable may remain basic at
    // zero; swap it out (or leave it in an all-zero row, which later pivots
    // can never touch).
    void pivot_out_aux() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] != aux_col_) continue;
            for (std::size_t j = 0; j < aux_col_; ++j) {
                if (rows_[i][j] != 0) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    std::size_t n_, m_, aux_col_, ncols_;
    QMat rows_;
    std::vector<std::size_t> basis_;
    QVec zrow_;
    QVec cur_obj_;
    std::optional<std::size_t> unbounded_col_;
};

} // namespace detail

/// Exactly maximize c.x over {x : A x <= b}, x free.
inline LpOutcome lp_maximize(const QVec& c, const QMat& a, const QVec& b) {
    const std::size_t n = c.size();
    if (n == 0) throw input_error("lp_maximize: empty objective");
    if (a.size() != b.size()) throw input_error("lp_maximize: row count mismatch");
    for (const auto& row : a)
        if (row.size() != n) throw input_error("lp_maximize: objective length != region dim");

    LpOutcome out;
    if (a.empty()) {
        if (is_zero(c)) {
            out.status = LpStatus::Optimal;
            out.optimum = Rational(0);
            out.witness = zero_vec(n);
            out.dual = QVec{};
        } else {
            out.status = LpStatus::Unbounded;
            out.witness = primitive(c);
        }
        return out;
    }

    detail::SimplexTableau tab(a, b, n);
    if (!tab.phase_one()) {
        out.status = LpStatus::Infeasible;
        return out;
    }
    tab.phase_two(c);
    if (tab.hit_unbounded()) {
        out.status = LpStatus::Unbounded;
        out.witness = tab.improving_ray();
        return out;
    }
    out.status = LpStatus::Optimal;
    QVec x = tab.primal_point();
    out.optimum = dot(c, x);
    out.witness = std::move(x);
    out.dual = tab.dual_multipliers();
    return out;
}

/// A point of {x : A x <= b}, if any.
inline std::optional<QVec> lp_feasible_point(const QMat& a, const QVec& b, std::size_t n) {
    LpOutcome r = lp_maximize(zero_vec(n), a, b);
    if (r.status != LpStatus::Optimal) return std::nullopt;
    return r.witness;
}

} // namespace asymlin
