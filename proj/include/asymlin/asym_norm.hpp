#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "asymlin/polyhedron.hpp"

namespace asymlin {

/// Polyhedral asymmetric norm p(x) = max_i <a_i, x>.
///
/// The generator set must contain 0 in its convex hull (so p >= 0
/// everywhere) and must span the space (so p(x) = p(-x) = 0 forces x = 0).
/// Norms that vanish on nonzero vectors are first class: the unit ball may
/// be unbounded, which is the whole asymmetric phenomenon.
struct AsymNorm {
    int dim = 0;
    std::vector<QVec> generators;
};

inline Rational eval_norm(const AsymNorm& p, const QVec& x) {
    if (static_cast<int>(x.size()) != p.dim) throw input_error("eval_norm: dimension mismatch");
    Rational best = dot(p.generators.front(), x);
    for (std::size_t i = 1; i < p.generators.size(); ++i) {
        Rational v = dot(p.generators[i], x);
        if (v > best) best = v;
    }
    return best;
}

/// Index of the first generator attaining p(x) (deterministic tie break).
inline std::size_t argmax_generator(const AsymNorm& p, const QVec& x) {
    std::size_t best = 0;
    Rational bv = dot(p.generators[0], x);
    for (std::size_t i = 1; i < p.generators.size(); ++i) {
        Rational v = dot(p.generators[i], x);
        if (v > bv) {
            bv = v;
            best = i;
        }
    }
    return best;
}

inline AsymNorm make_asym_norm(int dim, std::vector<QVec> generators, const Caps& caps = Caps{}) {
    if (dim <= 0) throw input_error("asymmetric norm dimension must be positive");
    if (dim > caps.dim_cap) throw capacity_error("asymmetric norm dimension above cap");
    if (generators.empty()) throw input_error("asymmetric norm needs at least one generator");
    if (static_cast<int>(generators.size()) > caps.generator_cap)
        throw capacity_error("generator count above cap");
    for (const auto& g : generators)
        if (static_cast<int>(g.size()) != dim) throw input_error("generator dimension mismatch");

    if (!detail::convex_conic_combination_exists(generators, {}, zero_vec(dim)))
        throw input_error("generators do not contain 0 in their convex hull (norm not >= 0)");
    QMat m(generators.begin(), generators.end());
    if (rank(m) != static_cast<std::size_t>(dim))
        throw input_error("generators do not span the space ((AN1) fails)");
    return AsymNorm{dim, std::move(generators)};
}

/// Conjugate norm x -> p(-x): every generator negated.
inline AsymNorm conjugate(const AsymNorm& p) {
    AsymNorm q;
    q.dim = p.dim;
    for (const auto& g : p.generators) q.generators.push_back(neg(g));
    return q;
}

/// Symmetrization max(p(x), p(-x)): generators together with their negations.
inline AsymNorm symmetrize(const AsymNorm& p) {
    AsymNorm q;
    q.dim = p.dim;
    q.generators = p.generators;
    for (const auto& g : p.generators) {
        QVec n = neg(g);
        bool present = false;
        for (const auto& h : q.generators)
            if (h == n) {
                present = true;
                break;
            }
        if (!present) q.generators.push_back(std::move(n));
    }
    return q;
}

/// Quasi-metric induced by p: d(x, y) = p(y - x).
inline Rational quasi_metric(const AsymNorm& p, const QVec& x, const QVec& y) {
    return eval_norm(p, sub(y, x));
}

/// Closed unit ball {x : p(x) <= 1} as an H-representation.
inline Polyhedron unit_ball(const AsymNorm& p) {
    std::vector<Inequality> rows;
    for (const auto& g : p.generators) rows.push_back({g, Rational(1)});
    return from_h(p.dim, std::move(rows));
}

/// Finite carrier for a sequence in (Q^dim, p).
struct QuasiMetricSample {
    std::vector<QVec> points;
};

struct TailVerdict {
    Rational eps;
    std::optional<std::size_t> tail_index; // least N with the bound for all n >= N
};

/// Finite-prefix convergence verdicts. This never claims a limit: it only
/// reports, for each epsilon of the schedule, the first tail of the sample
/// on which the distance stays below epsilon.
struct ConvergenceReport {
    std::vector<TailVerdict> forward;  // d(x, x_n) = p(x_n - x)
    std::vector<TailVerdict> backward; // conjugate distance d(x_n, x) = p(x - x_n)
    bool forward_convergent = false;
    bool backward_convergent = false;
};

inline ConvergenceReport converges(const AsymNorm& p, const QuasiMetricSample& seq, const QVec& x,
                                   const std::vector<Rational>& eps_schedule) {
    if (seq.points.empty()) throw input_error("converges: empty sequence");
    ConvergenceReport rep;
    auto scan = [&](bool forward) {
        std::vector<TailVerdict> out;
        for (const auto& eps : eps_schedule) {
            std::size_t n = seq.points.size();
            std::size_t tail = n;
            for (std::size_t i = n; i-- > 0;) {
                Rational d = forward ? quasi_metric(p, x, seq.points[i])
                                     : quasi_metric(p, seq.points[i], x);
                if (d < eps) tail = i;
                else break;
            }
            TailVerdict tv{eps, std::nullopt};
            if (tail < n) tv.tail_index = tail;
            out.push_back(tv);
        }
        return out;
    };
    rep.forward = scan(true);
    rep.backward = scan(false);
    auto all = [](const std::vector<TailVerdict>& v) {
        for (const auto& t : v)
            if (!t.tail_index) return false;
        return true;
    };
    rep.forward_convergent = all(rep.forward);
    rep.backward_convergent = all(rep.backward);
    return rep;
}

/// A polyhedral cone with a gauge that behaves as a norm on the cone.
/// The gauge need not be nonnegative off the cone, so it is validated
/// against the cone only. The quasi-metric of the cone takes the value
/// infinity between points whose difference leaves the cone.
struct NormedCone {
    int ambient_dim = 0;
    Polyhedron cone;
    AsymNorm gauge;
    bool t1 = false; // gauge vanishes on the cone only at 0
};

inline NormedCone make_normed_cone(Polyhedron cone, AsymNorm gauge) {
    if (cone.dim != gauge.dim) throw input_error("normed cone: dimension mismatch");
    for (const auto& ineq : cone.h_rep)
        if (ineq.offset != 0) throw input_error("normed cone: H-representation is not a cone");

    // gauge >= 0 on the cone: no cone point has all generator values <= -1
    {
        QMat a;
        QVec b;
        for (const auto& ineq : cone.h_rep) {
            a.push_back(ineq.normal);
            b.push_back(Rational(0));
        }
        for (const auto& g : gauge.generators) {
            a.push_back(g);
            b.push_back(Rational(-1));
        }
        if (lp_feasible_point(a, b, cone.dim).has_value())
            throw input_error("normed cone: gauge takes negative values on the cone");
    }

    // T1 flag: {x in cone : gauge(x) <= 0} = {0}?
    Polyhedron zero_set = cone;
    for (const auto& g : gauge.generators) zero_set.h_rep.push_back({g, Rational(0)});
    bool t1 = true;
    for (int k = 0; k < cone.dim && t1; ++k) {
        for (int sgn : {1, -1}) {
            QVec obj = zero_vec(cone.dim);
            obj[k] = sgn;
            auto out = solve_lp(obj, zero_set);
            if (out.status != LpStatus::Optimal || *out.optimum != 0) {
                t1 = false;
                break;
            }
        }
    }

    NormedCone nc;
    nc.ambient_dim = cone.dim;
    nc.cone = std::move(cone);
    nc.gauge = std::move(gauge);
    nc.t1 = t1;
    return nc;
}

/// Extended quasi-metric of a normed cone: p(y - x) when y - x lies in the
/// cone, infinity otherwise.
inline ExtRational cone_quasi_metric(const NormedCone& c, const QVec& x, const QVec& y) {
    QVec z = sub(y, x);
    if (!member(c.cone, z)) return ExtRational::infinity();
    return ExtRational(eval_norm(c.gauge, z));
}

using ExtMetricFn = std::function<ExtRational(const QVec&, const QVec&)>;

/// Reachability preorder x -> y iff d(x, y) < infinity on a finite sample,
/// together with the mutual-reachability partition. For symmetric inputs the
/// partition is exactly the finiteness equivalence classes; asymmetric
/// inputs give only a preorder.
struct FinitenessReport {
    std::vector<std::vector<bool>> reaches;
    bool symmetric = true;
    std::vector<std::size_t> class_of;
    std::size_t class_count = 0;
};

inline FinitenessReport finiteness_classes(const std::vector<QVec>& points,
                                           const ExtMetricFn& dist) {
    const std::size_t n = points.size();
    FinitenessReport rep;
    rep.reaches.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            rep.reaches[i][j] = dist(points[i], points[j]).is_finite();
    for (std::size_t i = 0; i < n && rep.symmetric; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (rep.reaches[i][j] != rep.reaches[j][i]) {
                rep.symmetric = false;
                break;
            }
    rep.class_of.assign(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rep.class_of[i] != n) continue;
        rep.class_of[i] = rep.class_count;
        for (std::size_t j = i + 1; j < n; ++j)
            if (rep.class_of[j] == n && rep.reaches[i][j] && rep.reaches[j][i])
                rep.class_of[j] = rep.class_count;
        ++rep.class_count;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Common fixture spaces.

/// u(a) = max(a, 0) on Q^1, the upper asymmetric norm.
inline AsymNorm upper_norm() { return make_asym_norm(1, {{Rational(1)}, {Rational(0)}}); }

/// The sup norm max_k |x_k| as a generator set of +/- unit covectors.
inline AsymNorm linf_norm(int dim) {
    std::vector<QVec> gens;
    for (int k = 0; k < dim; ++k) {
        gens.push_back(unit_vec(dim, k));
        gens.push_back(neg(unit_vec(dim, k)));
    }
    return make_asym_norm(dim, std::move(gens));
}

} // namespace asymlin
