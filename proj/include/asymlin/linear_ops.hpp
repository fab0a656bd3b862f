#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "asymlin/precompact.hpp"
#include "asymlin/product_max.hpp"

namespace asymlin {

/// Linear operator between asymmetric normed spaces; matrix is
/// target_dim x source_dim.
struct LinearOp {
    QMat matrix;
    AsymNorm source;
    AsymNorm target;
};

inline LinearOp make_linear_op(QMat matrix, AsymNorm source, AsymNorm target) {
    if (static_cast<int>(matrix.size()) != target.dim)
        throw input_error("linear op: row count != target dimension");
    for (const auto& row : matrix)
        if (static_cast<int>(row.size()) != source.dim)
            throw input_error("linear op: column count != source dimension");
    return LinearOp{std::move(matrix), std::move(source), std::move(target)};
}

inline QVec apply_op(const LinearOp& a, const QVec& x) { return mat_apply(a.matrix, x); }

struct OpNormResult {
    ExtRational value;
    std::optional<QVec> maximizer; // point of B_p attaining the norm
    std::optional<QVec> ray;       // recession ray of B_p with q(A ray) > 0
};

/// Operator norm sup { q(A x) : p(x) <= 1 } as one LP per target generator.
/// A finite value is the smallest semi-Lipschitz constant beta with
/// q(A x) <= beta p(x); infinity means A is not (p, q)-continuous.
inline OpNormResult op_norm_witnessed(const LinearOp& a) {
    Polyhedron ball = unit_ball(a.source);
    OpNormResult res;
    res.value = ExtRational(Rational(0));
    bool first = true;
    for (const auto& b : a.target.generators) {
        QVec obj = mat_tapply(a.matrix, b);
        auto out = solve_lp(obj, ball);
        if (out.status == LpStatus::Unbounded) {
            res.value = ExtRational::infinity();
            res.maximizer.reset();
            res.ray = out.witness;
            return res;
        }
        ExtRational v{*out.optimum};
        if (first || res.value < v) {
            res.value = v;
            res.maximizer = out.witness;
            first = false;
        }
    }
    return res;
}

inline ExtRational op_norm(const LinearOp& a) { return op_norm_witnessed(a).value; }

/// sup { <phi, x> : p(x) <= 1 }; infinity signals that phi lies outside the
/// dual cone of p.
inline ExtRational dual_norm(const AsymNorm& p, const QVec& phi) {
    if (static_cast<int>(phi.size()) != p.dim) throw input_error("dual_norm: dimension mismatch");
    auto out = solve_lp(phi, unit_ball(p));
    if (out.status == LpStatus::Unbounded) return ExtRational::infinity();
    return ExtRational(*out.optimum);
}

/// Element of a dual cone, kept as a concrete vector with its dual norm.
struct Functional {
    QVec vector;
    AsymNorm space;
    ExtRational norm; // the dual norm p-flat of the vector
};

inline Functional make_functional(QVec v, AsymNorm p) {
    ExtRational n = dual_norm(p, v);
    return Functional{std::move(v), std::move(p), n};
}

/// Dual unit ball B_{p-flat} as the polar of the unit ball, with vertices
/// enumerated. It is always a bounded polytope containing 0.
inline Polyhedron dual_ball(const AsymNorm& p, const Caps& caps = Caps{}) {
    return enumerate_v_rep(polar(enumerate_v_rep(unit_ball(p), caps)), caps);
}

/// The dual cone X-flat with the gauge p-flat, represented as a normed cone:
/// the cone is cut out by the recession rays of B_p and the gauge generators
/// are the vertices of B_p.
inline NormedCone dual_cone(const AsymNorm& p, const Caps& caps = Caps{}) {
    Polyhedron ball = enumerate_v_rep(unit_ball(p), caps);
    std::vector<Inequality> rows;
    for (const auto& r : ball.v_rep->rays) rows.push_back({r, Rational(0)});
    Polyhedron cone = from_h(p.dim, std::move(rows));
    AsymNorm gauge{p.dim, ball.v_rep->vertices};
    return make_normed_cone(std::move(cone), std::move(gauge));
}

/// A generator attaining q(z), which norms z: psi(z) = q(z), psi <= q
/// pointwise and q-flat(psi) = 1. Ties break to the lowest generator index.
/// For a max-of-generators norm the attaining generator already has dual
/// norm one, so the rescaling step of the textbook construction is a no-op;
/// this is asserted rather than assumed.
inline Functional norming_functional(const AsymNorm& q, const QVec& z) {
    Rational qz = eval_norm(q, z);
    if (qz <= 0) throw domain_error("norming_functional: q(z) must be positive");
    QVec psi = q.generators[argmax_generator(q, z)];
    Functional f = make_functional(std::move(psi), q);
    if (!(f.norm == ExtRational(Rational(1))))
        throw std::logic_error("norming functional must have dual norm one");
    return f;
}

/// Adjoint data: the transpose acting between the dual cones, with the dual
/// balls kept for exact norm computations.
struct AdjointOp {
    QMat matrix; // source_dim x target_dim, i.e. A transposed
    NormedCone source;
    NormedCone target;
    Polyhedron source_ball;        // B_{q-flat} with V-representation
    Polyhedron primal_source_ball; // B_p with V-representation
};

inline AdjointOp adjoint(const LinearOp& a, const Caps& caps = Caps{}) {
    AdjointOp adj;
    adj.matrix = mat_transpose(a.matrix);
    adj.source = dual_cone(a.target, caps);
    adj.target = dual_cone(a.source, caps);
    adj.source_ball = dual_ball(a.target, caps);
    adj.primal_source_ball = enumerate_v_rep(unit_ball(a.source), caps);
    return adj;
}

/// Norm of the adjoint sup { p-flat(A^T psi) : q-flat(psi) <= 1 }, computed
/// as an exact bilinear maximization of psi^T (A x) over
/// B_{q-flat} x B_p. This route shares nothing with the LP route of
/// op_norm, which is what makes the norm equality a real check.
inline ExtRational adjoint_norm(const AdjointOp& adj, const LinearOp& a) {
    return max_bilinear_over_product(a.matrix, *adj.source_ball.v_rep,
                                     *adj.primal_source_ball.v_rep)
        .value;
}

namespace detail {

inline QVec barycenter(const std::vector<QVec>& pts) {
    QVec c = zero_vec(pts[0].size());
    for (const auto& p : pts) c = add(c, p);
    return scale_vec(Rational(1, static_cast<long long>(pts.size())), c);
}

/// Covering net of conv(W) for the one-sided pseudo-distance
/// rho(c, psi) = max_k <psi - c, z_k>: every psi in conv(W) gets a net point
/// c with rho(c, psi) <= eps.
///
/// Every point of conv(W) lies in a simplex on at most dim+1 of the W
/// (Caratheodory), so all such subsets are covered. A simplex S with
/// barycenter c satisfies rho(c, psi) <= max_{vertex s of S} max_k
/// <s - c, z_k> for psi in S; simplices failing the bound are refined by
/// barycentric subdivision until it holds.
inline std::vector<QVec> simplex_cover_net(const std::vector<QVec>& w,
                                           const std::vector<QVec>& zs, const Rational& eps) {
    if (w.empty()) throw input_error("simplex_cover_net: no vertices");
    const std::size_t dim = w[0].size();
    const std::size_t m = std::min(w.size(), dim + 1);

    std::vector<std::vector<QVec>> queue;
    std::vector<std::size_t> pick(m, 0);
    std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t start,
                                                               std::size_t depth) {
        if (depth == m) {
            std::vector<QVec> simplex;
            for (std::size_t d = 0; d < m; ++d) simplex.push_back(w[pick[d]]);
            queue.push_back(std::move(simplex));
            return;
        }
        for (std::size_t i = start; i + (m - depth) <= w.size(); ++i) {
            pick[depth] = i;
            choose(i + 1, depth + 1);
        }
    };
    choose(0, 0);
    if (queue.size() > 5000) throw capacity_error("dual ball has too many vertex simplices");

    std::vector<QVec> net;
    std::size_t processed = 0;
    while (!queue.empty()) {
        if (++processed > 200000) throw capacity_error("simplex refinement did not stabilize");
        std::vector<QVec> simplex = std::move(queue.back());
        queue.pop_back();
        QVec c = barycenter(simplex);
        Rational worst(0);
        for (const auto& s : simplex) {
            QVec diff = sub(s, c);
            for (const auto& z : zs) {
                Rational v = dot(diff, z);
                if (v > worst) worst = v;
            }
        }
        if (worst <= eps) {
            if (std::find(net.begin(), net.end(), c) == net.end()) net.push_back(c);
            continue;
        }
        // barycentric subdivision: one subsimplex per vertex ordering,
        // built from the prefix barycenters
        std::vector<std::size_t> perm(simplex.size());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
        do {
            std::vector<QVec> sub_simplex;
            std::vector<QVec> prefix;
            for (std::size_t i = 0; i < perm.size(); ++i) {
                prefix.push_back(simplex[perm[i]]);
                sub_simplex.push_back(barycenter(prefix));
            }
            queue.push_back(std::move(sub_simplex));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return net;
}

} // namespace detail

/// Outcome of the linear Schauder construction: an eps net certificate for
/// the image A(B_p) under the symmetrized target norm, and a 3 eps net for
/// the adjoint image A-flat(B_{q-flat}) under the dual gauge.
struct LinearSchauderResult {
    bool refused = false;
    std::optional<QVec> refusal_ray; // ray of B_p whose image does not vanish

    std::vector<QVec> net_preimages; // x_k in B_p
    EpsNetCertificate image_cert;    // centers A x_k under the symmetrized norm

    std::vector<QVec> dual_net;   // psi_i in B_{q-flat}
    Rational dual_radius;         // 3 eps
    Rational measured_radius;     // worst verified min-distance over the checks
    bool dual_verified = false;
};

/// Precompactness of A(B_p) under q^s transfers to the adjoint with a 3 eps
/// net, mirroring the bilinear construction specialized to one variable:
/// (psi - psi_i)(A x) telescopes through the image net (x_k) as
/// psi(Ax - Ax_k) + (psi - psi_i)(Ax_k) + psi_i(Ax_k - Ax) <= eps + eps + eps.
inline LinearSchauderResult schauder_linear_check(const LinearOp& a, const Rational& eps,
                                                  const Caps& caps = Caps{}) {
    if (eps <= 0) throw input_error("schauder_linear_check: eps must be positive");
    LinearSchauderResult res;
    res.dual_radius = 3 * eps;
    res.measured_radius = Rational(0);

    Polyhedron ball = enumerate_v_rep(unit_ball(a.source), caps);
    for (const auto& r : ball.v_rep->rays) {
        if (!is_zero(apply_op(a, r))) { // q^s(Ar) > 0 for a norm q^s
            res.refused = true;
            res.refusal_ray = r;
            return res;
        }
    }

    AsymNorm qs = symmetrize(a.target);
    // q^s(A d) <= ||d||_inf * sum_i q^s(A e_i)
    Rational h(0);
    for (int i = 0; i < a.source.dim; ++i)
        h += eval_norm(qs, apply_op(a, unit_vec(a.source.dim, i)));

    if (h == 0) {
        res.net_preimages = {ball.v_rep->vertices.front()};
    } else {
        res.net_preimages = detail::grid_inside_net(ball, eps / h);
    }

    res.image_cert.eps = eps;
    res.image_cert.net_location = NetLocation::Inside;
    std::vector<QVec> zs;
    for (const auto& x : res.net_preimages) {
        zs.push_back(apply_op(a, x));
        res.image_cert.net.push_back(zs.back());
    }
    std::vector<QVec> image_samples;
    for (const auto& v : ball.v_rep->vertices) image_samples.push_back(apply_op(a, v));
    for (std::size_t i = 0; i < image_samples.size(); ++i) {
        bool covered = false;
        for (std::size_t zi = 0; zi < res.image_cert.net.size(); ++zi) {
            if (quasi_metric(qs, res.image_cert.net[zi], image_samples[i]) <= eps) {
                res.image_cert.coverage.push_back({i, zi});
                covered = true;
                break;
            }
        }
        if (!covered) throw std::logic_error("image net failed to cover a vertex image");
    }

    Polyhedron dball = dual_ball(a.target, caps);
    res.dual_net = detail::simplex_cover_net(dball.v_rep->vertices, zs, eps);

    // independent re-verification on the dual ball vertices:
    // min_i p-flat(A^T (psi - psi_i)) <= 3 eps, each value a fresh LP
    Polyhedron pball = unit_ball(a.source);
    res.dual_verified = true;
    for (const auto& psi : dball.v_rep->vertices) {
        ExtRational best = ExtRational::infinity();
        for (const auto& center : res.dual_net) {
            QVec diff = mat_tapply(a.matrix, sub(psi, center));
            auto out = solve_lp(diff, pball);
            ExtRational v = out.status == LpStatus::Unbounded ? ExtRational::infinity()
                                                              : ExtRational(*out.optimum);
            if (v < best) best = v;
        }
        if (!(best <= ExtRational(res.dual_radius)))
            res.dual_verified = false;
        if (best.is_finite() && best.value() > res.measured_radius)
            res.measured_radius = best.value();
    }
    return res;
}

} // namespace asymlin
