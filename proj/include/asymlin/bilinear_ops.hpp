#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "asymlin/linear_ops.hpp"
#include "asymlin/rng.hpp"

namespace asymlin {

/// Bilinear operator as an order-3 tensor indexed [target][source1][source2].
struct BilinearOp {
    QTensor tensor;
    AsymNorm source1;
    AsymNorm source2;
    AsymNorm target;
};

inline BilinearOp make_bilinear_op(QTensor tensor, AsymNorm s1, AsymNorm s2, AsymNorm t) {
    if (static_cast<int>(tensor.size()) != t.dim)
        throw input_error("bilinear op: tensor target extent mismatch");
    for (const auto& slice : tensor) {
        if (static_cast<int>(slice.size()) != s1.dim)
            throw input_error("bilinear op: tensor source1 extent mismatch");
        for (const auto& row : slice)
            if (static_cast<int>(row.size()) != s2.dim)
                throw input_error("bilinear op: tensor source2 extent mismatch");
    }
    return BilinearOp{std::move(tensor), std::move(s1), std::move(s2), std::move(t)};
}

inline QVec apply_bilinear(const BilinearOp& t, const QVec& x, const QVec& y) {
    if (static_cast<int>(x.size()) != t.source1.dim ||
        static_cast<int>(y.size()) != t.source2.dim)
        throw input_error("apply_bilinear: dimension mismatch");
    QVec z(t.tensor.size(), Rational(0));
    for (std::size_t k = 0; k < t.tensor.size(); ++k) {
        Rational s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0) continue;
            for (std::size_t j = 0; j < y.size(); ++j) s += t.tensor[k][i][j] * x[i] * y[j];
        }
        z[k] = s;
    }
    return z;
}

/// Contraction of the target index against a covector: the bilinear form
/// psi o T.
inline QMat contract_target(const QTensor& tensor, const QVec& psi) {
    if (tensor.size() != psi.size()) throw input_error("contract_target: dimension mismatch");
    if (tensor.empty()) return {};
    QMat m(tensor[0].size(), QVec(tensor[0][0].size(), Rational(0)));
    for (std::size_t k = 0; k < tensor.size(); ++k) {
        if (psi[k] == 0) continue;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (std::size_t j = 0; j < m[i].size(); ++j) m[i][j] += psi[k] * tensor[k][i][j];
    }
    return m;
}

/// Scalar-valued bilinear form with its two source spaces.
struct BilinearForm {
    QMat matrix;
    AsymNorm source1;
    AsymNorm source2;
};

inline BilinearForm make_bilinear_form(QMat m, AsymNorm s1, AsymNorm s2) {
    if (static_cast<int>(m.size()) != s1.dim)
        throw input_error("bilinear form: row count mismatch");
    for (const auto& row : m)
        if (static_cast<int>(row.size()) != s2.dim)
            throw input_error("bilinear form: column count mismatch");
    return BilinearForm{std::move(m), std::move(s1), std::move(s2)};
}

inline Rational eval_form(const BilinearForm& b, const QVec& x, const QVec& y) {
    Rational s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0) continue;
        for (std::size_t j = 0; j < y.size(); ++j) s += b.matrix[i][j] * x[i] * y[j];
    }
    return s;
}

namespace detail {

inline bool same_norm(const AsymNorm& a, const AsymNorm& b) {
    return a.dim == b.dim && a.generators == b.generators;
}

inline VRep ball_vrep(const AsymNorm& p, const Caps& caps) {
    return *enumerate_v_rep(unit_ball(p), caps).v_rep;
}

/// sup of gamma(T(x, y)) over a product of generator-represented sets:
/// one exact product maximization per gamma generator.
inline ExtRational sup_gamma_over_product(const QTensor& tensor, const AsymNorm& gamma,
                                          const VRep& b1, const VRep& b2) {
    ExtRational best(Rational(0));
    bool first = true;
    for (const auto& g : gamma.generators) {
        ExtRational v = max_bilinear_over_product(contract_target(tensor, g), b1, b2).value;
        if (first || best < v) best = v;
        first = false;
    }
    return best;
}

} // namespace detail

/// Operator norm sup { q(T(x, y)) : (x, y) in B_{p1} x B_{p2} }. Finite
/// values are attained at vertex pairs; infinity is detected on ray
/// combinations of the two balls.
inline ExtRational bilin_norm(const BilinearOp& t, const Caps& caps = Caps{}) {
    VRep b1 = detail::ball_vrep(t.source1, caps);
    VRep b2 = detail::ball_vrep(t.source2, caps);
    return detail::sup_gamma_over_product(t.tensor, t.target, b1, b2);
}

/// Norm with every space symmetrized; always finite since symmetric unit
/// balls are bounded.
inline Rational sym_norm(const BilinearOp& t, const Caps& caps = Caps{}) {
    VRep b1 = detail::ball_vrep(symmetrize(t.source1), caps);
    VRep b2 = detail::ball_vrep(symmetrize(t.source2), caps);
    ExtRational v = detail::sup_gamma_over_product(t.tensor, symmetrize(t.target), b1, b2);
    if (!v.is_finite()) throw std::logic_error("symmetric bilinear norm must be finite");
    return v.value();
}

/// Form norm sup { b(x, y) } over the product of unit balls (the target norm
/// is the upper norm on Q, so the sup runs over raw values).
inline ExtRational form_norm(const BilinearForm& b, const Caps& caps = Caps{}) {
    VRep b1 = detail::ball_vrep(b.source1, caps);
    VRep b2 = detail::ball_vrep(b.source2, caps);
    return max_bilinear_over_product(b.matrix, b1, b2).value;
}

/// Alternating maximization between the two factors; a fast exact lower
/// bound on bilin_norm used as a cross check, not as the norm itself.
inline ExtRational bilin_norm_alternating(const BilinearOp& t, int rounds = 6,
                                          const Caps& caps = Caps{}) {
    VRep b2 = detail::ball_vrep(t.source2, caps);
    Polyhedron ball1 = unit_ball(t.source1);
    Polyhedron ball2 = unit_ball(t.source2);
    QVec y = b2.vertices.front();
    Rational best(0);
    QVec x;
    for (int round = 0; round < rounds; ++round) {
        // maximize over x with y fixed
        bool improved = false;
        for (const auto& g : t.target.generators) {
            QMat m = contract_target(t.tensor, g);
            QVec obj = mat_apply(m, y);
            auto out = solve_lp(obj, ball1);
            if (out.status == LpStatus::Unbounded) return ExtRational::infinity();
            if (*out.optimum > best) {
                best = *out.optimum;
                x = *out.witness;
                improved = true;
            }
        }
        if (x.empty()) break;
        for (const auto& g : t.target.generators) {
            QMat m = contract_target(t.tensor, g);
            QVec obj = mat_tapply(m, x);
            auto out = solve_lp(obj, ball2);
            if (out.status == LpStatus::Unbounded) return ExtRational::infinity();
            if (*out.optimum > best) {
                best = *out.optimum;
                y = *out.witness;
                improved = true;
            }
        }
        if (!improved) break;
    }
    return ExtRational(best);
}

/// Both routes of the rescaling equivalence: (i) the unit-ball bound
/// beta / r^2 against bilin_norm, (ii) the direct bound beta over the
/// r-scaled balls. The routes must agree.
struct RescalingVerdict {
    bool condition_unit = false;   // ||T| <= beta / r^2
    bool condition_scaled = false; // sup over the r-balls <= beta
    bool agree = false;
    ExtRational unit_norm;   // ||T|
    ExtRational scaled_sup;  // sup over r-balls, equals r^2 ||T|
};

inline RescalingVerdict rescaling_equivalence_check(const BilinearOp& t, const Rational& beta,
                                                    const Rational& r, const Caps& caps = Caps{}) {
    if (r <= 0) throw input_error("rescaling check: r must be positive");
    if (beta < 0) throw input_error("rescaling check: beta must be nonnegative");
    RescalingVerdict v;
    v.unit_norm = bilin_norm(t, caps);
    v.condition_unit = v.unit_norm <= ExtRational(beta / (r * r));

    VRep b1 = detail::ball_vrep(t.source1, caps);
    VRep b2 = detail::ball_vrep(t.source2, caps);
    for (auto& vertex : b1.vertices) vertex = scale_vec(r, vertex);
    for (auto& vertex : b2.vertices) vertex = scale_vec(r, vertex);
    v.scaled_sup = detail::sup_gamma_over_product(t.tensor, t.target, b1, b2);
    v.condition_scaled = v.scaled_sup <= ExtRational(beta);
    v.agree = v.condition_unit == v.condition_scaled;
    return v;
}

/// Adjoint of a bilinear operator at a target functional: the bilinear form
/// psi o T.
inline BilinearForm bilinear_adjoint(const BilinearOp& t, const Functional& psi) {
    if (static_cast<int>(psi.vector.size()) != t.target.dim)
        throw input_error("bilinear_adjoint: functional dimension mismatch");
    if (!detail::same_norm(psi.space, t.target))
        throw input_error("bilinear_adjoint: functional lives on a different space");
    return BilinearForm{contract_target(t.tensor, psi.vector), t.source1, t.source2};
}

/// Norm of the adjoint sup { || psi o T | : q-flat(psi) <= 1 }. The map
/// psi -> || psi o T | is a sup of linear functions of psi, so the sup over
/// the dual ball is attained at its vertices, which double description
/// provides independently of the generator route of bilin_norm.
inline ExtRational bilinear_adjoint_norm(const BilinearOp& t, const Caps& caps = Caps{}) {
    Polyhedron dball = dual_ball(t.target, caps);
    VRep b1 = detail::ball_vrep(t.source1, caps);
    VRep b2 = detail::ball_vrep(t.source2, caps);
    ExtRational best(Rational(0));
    bool first = true;
    for (const auto& psi : dball.v_rep->vertices) {
        ExtRational v = max_bilinear_over_product(contract_target(t.tensor, psi), b1, b2).value;
        if (first || best < v) best = v;
        first = false;
    }
    return best;
}

/// The extended quasi-metric d and extended metric d_s between operators
/// with identical space signatures.
struct OperatorDistance {
    ExtRational forward;   // sup q(T2 - T1) over the unit balls
    ExtRational symmetric; // sup q^s(T2 - T1), at least the forward value
};

namespace detail {

inline QTensor tensor_difference(const QTensor& a, const QTensor& b) {
    QTensor d = b;
    for (std::size_t k = 0; k < d.size(); ++k)
        for (std::size_t i = 0; i < d[k].size(); ++i)
            for (std::size_t j = 0; j < d[k][i].size(); ++j) d[k][i][j] -= a[k][i][j];
    return d;
}

inline void require_same_signature(const BilinearOp& t1, const BilinearOp& t2) {
    if (!same_norm(t1.source1, t2.source1) || !same_norm(t1.source2, t2.source2) ||
        !same_norm(t1.target, t2.target))
        throw input_error("bilinear operators have different space signatures");
}

} // namespace detail

inline OperatorDistance operator_distance(const BilinearOp& t1, const BilinearOp& t2,
                                          const Caps& caps = Caps{}) {
    detail::require_same_signature(t1, t2);
    QTensor diff = detail::tensor_difference(t1.tensor, t2.tensor);
    VRep b1 = detail::ball_vrep(t1.source1, caps);
    VRep b2 = detail::ball_vrep(t1.source2, caps);
    OperatorDistance d;
    d.forward = detail::sup_gamma_over_product(diff, t1.target, b1, b2);
    d.symmetric = detail::sup_gamma_over_product(diff, symmetrize(t1.target), b1, b2);
    return d;
}

/// The delta quasi-pseudometric on forms: || b2 - b1 | when the difference
/// is a continuous form, infinity otherwise (the infinite branch is exactly
/// the infinite form norm).
inline ExtRational form_delta(const BilinearForm& b1, const BilinearForm& b2,
                              const Caps& caps = Caps{}) {
    if (!detail::same_norm(b1.source1, b2.source1) || !detail::same_norm(b1.source2, b2.source2))
        throw input_error("form_delta: signature mismatch");
    QMat diff = b2.matrix;
    for (std::size_t i = 0; i < diff.size(); ++i)
        for (std::size_t j = 0; j < diff[i].size(); ++j) diff[i][j] -= b1.matrix[i][j];
    return form_norm(BilinearForm{std::move(diff), b1.source1, b1.source2}, caps);
}

/// Pointwise convergence verdicts of a sequence of forms at probe pairs,
/// for both the upper-norm and the absolute-value distances on Q. On
/// mirrored probes {(x, y), (-x, y)} the pair of one-sided verdicts must
/// reproduce the two-sided verdict, which the report asserts.
struct W2Report {
    struct Probe {
        std::vector<TailVerdict> upper_tails;
        std::vector<TailVerdict> abs_tails;
        bool upper_convergent = false;
        bool abs_convergent = false;
    };
    std::vector<Probe> probes;
    bool mirrored_agreement = true;
};

inline W2Report w2_converges(const std::vector<BilinearForm>& seq, const BilinearForm& limit,
                             const std::vector<std::pair<QVec, QVec>>& probes,
                             const std::vector<Rational>& eps_schedule) {
    if (seq.empty()) throw input_error("w2_converges: empty sequence");
    W2Report rep;
    auto probe_tails = [&](const QVec& x, const QVec& y, bool absolute) {
        std::vector<TailVerdict> out;
        Rational lim = eval_form(limit, x, y);
        for (const auto& eps : eps_schedule) {
            TailVerdict tv{eps, std::nullopt};
            std::size_t tail = seq.size();
            for (std::size_t i = seq.size(); i-- > 0;) {
                Rational gap = eval_form(seq[i], x, y) - lim;
                bool ok = absolute ? (gap < eps && -gap < eps) : (gap < eps);
                if (ok) tail = i;
                else break;
            }
            if (tail < seq.size()) tv.tail_index = tail;
            out.push_back(tv);
        }
        return out;
    };
    auto convergent = [](const std::vector<TailVerdict>& tails) {
        for (const auto& t : tails)
            if (!t.tail_index) return false;
        return true;
    };
    for (const auto& [x, y] : probes) {
        W2Report::Probe pr;
        pr.upper_tails = probe_tails(x, y, false);
        pr.abs_tails = probe_tails(x, y, true);
        pr.upper_convergent = convergent(pr.upper_tails);
        pr.abs_convergent = convergent(pr.abs_tails);
        rep.probes.push_back(pr);

        // Remark-level agreement: one-sided convergence at (x, y) and at
        // (-x, y) together coincide with two-sided convergence at (x, y).
        auto mirror = probe_tails(neg(x), y, false);
        for (std::size_t e = 0; e < eps_schedule.size(); ++e) {
            std::optional<std::size_t> combined;
            if (pr.upper_tails[e].tail_index && mirror[e].tail_index)
                combined = std::max(*pr.upper_tails[e].tail_index, *mirror[e].tail_index);
            if (combined != pr.abs_tails[e].tail_index) rep.mirrored_agreement = false;
        }
    }
    return rep;
}

/// Desk-scale sequential rendition of the dual-ball compactness statement
/// for forms: entrywise bound, nested monotone subsequence extraction, and
/// the closedness check that the exhibited limit is again a form of norm at
/// most one.
struct AlaogluResult {
    std::vector<std::size_t> subsequence; // indices into the input sequence
    QMat limit;
    std::vector<TailVerdict> tails; // max entry gap to the limit per epsilon
    bool entry_bound_ok = true;     // |b(x,y)| <= p1^s(x) p2^s(y) on probes
    bool limit_in_ball = false;     // form norm of the limit <= 1
    bool converged = false;         // every epsilon admits a tail
};

inline AlaogluResult alaoglu_desk_check(const AsymNorm& p1, const AsymNorm& p2,
                                        const std::vector<BilinearForm>& seq,
                                        const std::vector<std::pair<QVec, QVec>>& probes,
                                        const std::vector<Rational>& eps_schedule,
                                        const std::optional<QMat>& claimed_limit = std::nullopt,
                                        const Caps& caps = Caps{}) {
    if (seq.empty()) throw input_error("alaoglu_desk_check: empty sequence");
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (!(form_norm(seq[i], caps) <= ExtRational(Rational(1))))
            throw precondition_error("form " + std::to_string(i) + " violates the ball constraint");
    }
    AlaogluResult res;
    AsymNorm p1s = symmetrize(p1), p2s = symmetrize(p2);
    for (const auto& [x, y] : probes) {
        Rational bound = eval_norm(p1s, x) * eval_norm(p2s, y);
        for (const auto& b : seq) {
            Rational v = eval_form(b, x, y);
            if (v > bound || -v > bound) res.entry_bound_ok = false;
        }
    }

    // nested extraction: for each matrix entry keep the longest monotone
    // subsequence of the current indices (earliest on ties)
    res.subsequence.resize(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) res.subsequence[i] = i;
    const std::size_t rows = seq[0].matrix.size();
    const std::size_t cols = rows == 0 ? 0 : seq[0].matrix[0].size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            auto& idx = res.subsequence;
            auto longest = [&](bool increasing) {
                std::vector<std::size_t> len(idx.size(), 1), prev(idx.size(), idx.size());
                std::size_t best = 0;
                for (std::size_t i = 0; i < idx.size(); ++i) {
                    for (std::size_t j = 0; j < i; ++j) {
                        const Rational& vi = seq[idx[i]].matrix[r][c];
                        const Rational& vj = seq[idx[j]].matrix[r][c];
                        bool ok = increasing ? vj <= vi : vj >= vi;
                        if (ok && len[j] + 1 > len[i]) {
                            len[i] = len[j] + 1;
                            prev[i] = j;
                        }
                    }
                    if (len[i] > len[best]) best = i;
                }
                std::vector<std::size_t> out;
                for (std::size_t at = best; at != idx.size(); at = prev[at]) {
                    out.push_back(idx[at]);
                    if (prev[at] == idx.size()) break;
                }
                std::reverse(out.begin(), out.end());
                return out;
            };
            auto up = longest(true);
            auto down = longest(false);
            auto monotone = up.size() >= down.size() ? up : down;
            // a constant subsequence is the sharpest witness; take it when it
            // is at least half as long as the best monotone one
            std::vector<std::size_t> constant;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                std::vector<std::size_t> run;
                const Rational& v = seq[idx[i]].matrix[r][c];
                for (std::size_t j = i; j < idx.size(); ++j)
                    if (seq[idx[j]].matrix[r][c] == v) run.push_back(idx[j]);
                if (run.size() > constant.size()) constant = run;
            }
            res.subsequence = 2 * constant.size() >= monotone.size() ? constant : monotone;
        }
    }

    res.limit = claimed_limit ? *claimed_limit : seq[res.subsequence.back()].matrix;
    for (const auto& eps : eps_schedule) {
        TailVerdict tv{eps, std::nullopt};
        std::size_t tail = res.subsequence.size();
        for (std::size_t i = res.subsequence.size(); i-- > 0;) {
            Rational worst(0);
            const QMat& m = seq[res.subsequence[i]].matrix;
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c) {
                    Rational gap = m[r][c] - res.limit[r][c];
                    if (gap < 0) gap = -gap;
                    if (gap > worst) worst = gap;
                }
            if (worst < eps) tail = i;
            else break;
        }
        if (tail < res.subsequence.size()) tv.tail_index = tail;
        res.tails.push_back(tv);
    }
    res.converged = std::all_of(res.tails.begin(), res.tails.end(),
                                [](const TailVerdict& t) { return t.tail_index.has_value(); });
    res.limit_in_ball =
        form_norm(BilinearForm{res.limit, p1, p2}, caps) <= ExtRational(Rational(1));
    return res;
}

// ---------------------------------------------------------------------------
// Precompactness of bilinear operators.

enum class ClassStatus { Certified, Refuted, Undetermined };

/// Conic generators of the convex relaxation of the image
/// T(B_{p1} x B_{p2}): images of (ray, vertex), (vertex, ray) and
/// (ray, ray) combinations. The image lies in
/// conv(vertex-pair images) + cone(these generators).
struct ImageGenerators {
    std::vector<QVec> vertex_pair_images;
    std::vector<QVec> conic;
};

namespace detail {

inline ImageGenerators image_generators(const BilinearOp& t, const VRep& b1, const VRep& b2) {
    ImageGenerators g;
    for (const auto& v : b1.vertices)
        for (const auto& w : b2.vertices) g.vertex_pair_images.push_back(apply_bilinear(t, v, w));
    for (const auto& r : b1.rays)
        for (const auto& w : b2.vertices) g.conic.push_back(apply_bilinear(t, r, w));
    for (const auto& v : b1.vertices)
        for (const auto& rho : b2.rays) g.conic.push_back(apply_bilinear(t, v, rho));
    for (const auto& r : b1.rays)
        for (const auto& rho : b2.rays) g.conic.push_back(apply_bilinear(t, r, rho));
    return g;
}

} // namespace detail

/// Three-valued classification of image precompactness under the target
/// norm and its symmetrization. For polyhedral data the recession test is
/// exact in both directions, so Undetermined is reserved for inputs outside
/// this class.
struct PrecompactClassification {
    ClassStatus forward = ClassStatus::Undetermined;   // w.r.t. q
    ClassStatus symmetric = ClassStatus::Undetermined; // w.r.t. q^s
    std::optional<QVec> forward_escape;   // image generator with q > 0
    std::optional<QVec> symmetric_escape; // nonzero image generator
};

inline PrecompactClassification precompact_class(const BilinearOp& t, const Caps& caps = Caps{}) {
    VRep b1 = detail::ball_vrep(t.source1, caps);
    VRep b2 = detail::ball_vrep(t.source2, caps);
    ImageGenerators gens = detail::image_generators(t, b1, b2);
    PrecompactClassification cls;
    cls.forward = ClassStatus::Certified;
    cls.symmetric = ClassStatus::Certified;
    for (const auto& g : gens.conic) {
        if (!cls.forward_escape && eval_norm(t.target, g) > 0) {
            cls.forward = ClassStatus::Refuted;
            cls.forward_escape = g;
        }
        if (!cls.symmetric_escape && !is_zero(g)) {
            cls.symmetric = ClassStatus::Refuted;
            cls.symmetric_escape = g;
        }
    }
    return cls;
}

/// Inside net of the image of B_{p1} x B_{p2} under T for the covering norm
/// gamma, with the preimage pairs retained. Requires every conic image
/// generator to be gamma-null, which is exactly the certified case: ray
/// parts of the arguments then contribute nothing to the covering distance
/// and product grids over the bounded parts suffice.
struct ImageNet {
    Rational eps;
    std::vector<std::pair<QVec, QVec>> pairs; // (x_k, y_k) in the balls
    std::vector<QVec> centers;                // T(x_k, y_k)
};

inline ImageNet image_net(const BilinearOp& t, const AsymNorm& gamma, const Rational& eps,
                          const Caps& caps = Caps{}) {
    if (eps <= 0) throw input_error("image_net: eps must be positive");
    if (gamma.dim != t.target.dim) throw input_error("image_net: gamma dimension mismatch");
    Polyhedron ball1 = enumerate_v_rep(unit_ball(t.source1), caps);
    Polyhedron ball2 = enumerate_v_rep(unit_ball(t.source2), caps);
    ImageGenerators gens = detail::image_generators(t, *ball1.v_rep, *ball2.v_rep);
    for (const auto& g : gens.conic)
        if (eval_norm(gamma, g) > 0)
            throw precondition_error("image_net: image is not precompact for the covering norm");

    AsymNorm gs = symmetrize(gamma);
    const auto& v1 = ball1.v_rep->vertices;
    const auto& v2 = ball2.v_rep->vertices;
    // gamma^s(T(d, y)) <= ||d||_inf * G1 for y in conv(V2), and symmetrically
    Rational g1(0);
    for (int i = 0; i < t.source1.dim; ++i) {
        Rational col(0);
        for (const auto& w : v2) {
            Rational v = eval_norm(gs, apply_bilinear(t, unit_vec(t.source1.dim, i), w));
            if (v > col) col = v;
        }
        g1 += col;
    }
    Rational g2(0);
    for (int j = 0; j < t.source2.dim; ++j) {
        Rational col(0);
        for (const auto& v : v1) {
            Rational val = eval_norm(gs, apply_bilinear(t, v, unit_vec(t.source2.dim, j)));
            if (val > col) col = val;
        }
        g2 += col;
    }

    std::vector<QVec> net1 = g1 == 0 ? std::vector<QVec>{v1.front()}
                                     : detail::grid_inside_net(ball1, eps / (4 * g1));
    std::vector<QVec> net2 = g2 == 0 ? std::vector<QVec>{v2.front()}
                                     : detail::grid_inside_net(ball2, eps / (4 * g2));
    if (net1.size() * net2.size() > 500000)
        throw capacity_error("image_net: candidate pair count above guard");

    // candidate pairs cover the image within eps/2; a streaming greedy pass
    // at eps/2 keeps the emitted net small, and the triangle inequality
    // restores the full radius eps
    ImageNet net;
    net.eps = eps;
    for (const auto& x : net1) {
        for (const auto& y : net2) {
            QVec z = apply_bilinear(t, x, y);
            bool covered = false;
            for (const auto& c : net.centers) {
                if (quasi_metric(gamma, c, z) <= eps / 2) {
                    covered = true;
                    break;
                }
            }
            if (!covered) {
                net.pairs.push_back({x, y});
                net.centers.push_back(std::move(z));
            }
        }
    }
    return net;
}

/// Re-verify an image net against sample argument pairs: every sampled
/// image point must be within the stated radius of some center.
inline bool verify_image_net(const BilinearOp& t, const ImageNet& net, const AsymNorm& gamma,
                             const std::vector<std::pair<QVec, QVec>>& test_pairs,
                             const Rational& radius) {
    for (const auto& [x, y] : test_pairs) {
        QVec z = apply_bilinear(t, x, y);
        bool covered = false;
        for (const auto& c : net.centers) {
            if (quasi_metric(gamma, c, z) <= radius) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

/// Deterministic sample of ball points: convex combinations of vertices
/// plus nonnegative ray pushes.
inline QVec sample_ball_point(const VRep& ball, Rng& rng) {
    const std::size_t nv = ball.vertices.size();
    QVec x = zero_vec(ball.vertices.front().size());
    Rational total(0);
    std::vector<Rational> w(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        w[i] = Rational(rng.int_in(0, 4));
        total += w[i];
    }
    if (total == 0) {
        w[0] = 1;
        total = 1;
    }
    for (std::size_t i = 0; i < nv; ++i) x = add(x, scale_vec(w[i] / total, ball.vertices[i]));
    for (const auto& r : ball.rays)
        if (rng.flip()) x = add(x, scale_vec(Rational(rng.int_in(0, 6)), r));
    return x;
}

/// The Schauder-type construction: from an eps net of the image under the
/// symmetrized target norm, a finite functional net over the dual ball
/// whose adjoint images form a 3 eps net of the adjoint image in the form
/// norm. The emitted certificate is re-verified functional by functional.
struct BilinearSchauderResult {
    ImageNet image;             // eps net of T(B x B) under q^s
    std::vector<QVec> dual_net; // psi_i in B_{q-flat}
    Rational dual_radius;       // 3 eps
    Rational measured_radius;   // worst verified covering distance
    bool verified = false;
};

inline BilinearSchauderResult schauder_bilinear_net(const BilinearOp& t, const Rational& eps,
                                                    const Caps& caps = Caps{}) {
    if (eps <= 0) throw input_error("schauder_bilinear_net: eps must be positive");
    auto cls = precompact_class(t, caps);
    if (cls.symmetric != ClassStatus::Certified)
        throw precondition_error("schauder_bilinear_net: operator is not certified precompact "
                                 "for the symmetrized target norm");

    BilinearSchauderResult res;
    res.dual_radius = 3 * eps;
    res.measured_radius = Rational(0);
    res.image = image_net(t, symmetrize(t.target), eps, caps);

    Polyhedron dball = dual_ball(t.target, caps);
    res.dual_net = detail::simplex_cover_net(dball.v_rep->vertices, res.image.centers, eps);

    res.verified = true;
    for (const auto& psi : dball.v_rep->vertices) {
        ExtRational best = ExtRational::infinity();
        for (const auto& center : res.dual_net) {
            BilinearForm diff{contract_target(t.tensor, sub(psi, center)), t.source1, t.source2};
            ExtRational v = form_norm(diff, caps);
            if (v < best) best = v;
        }
        if (!(best <= ExtRational(res.dual_radius))) res.verified = false;
        if (best.is_finite() && best.value() > res.measured_radius)
            res.measured_radius = best.value();
    }
    return res;
}

// ---------------------------------------------------------------------------
// Bideal operations.

/// Post-composition R o T; R must be anchored on the target norm of T
/// (plain mode) or on its symmetrization (symmetric mode).
inline BilinearOp bideal_compose_left(const LinearOp& r, const BilinearOp& t) {
    bool plain = detail::same_norm(r.source, t.target);
    bool symmetric = detail::same_norm(r.source, symmetrize(t.target));
    if (!plain && !symmetric)
        throw input_error("bideal_compose_left: source norm of the factor does not match");
    QTensor out(r.matrix.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].assign(t.tensor[0].size(), QVec(t.tensor[0][0].size(), Rational(0)));
        for (std::size_t m = 0; m < t.tensor.size(); ++m) {
            if (r.matrix[k][m] == 0) continue;
            for (std::size_t i = 0; i < out[k].size(); ++i)
                for (std::size_t j = 0; j < out[k][i].size(); ++j)
                    out[k][i][j] += r.matrix[k][m] * t.tensor[m][i][j];
        }
    }
    return BilinearOp{std::move(out), t.source1, t.source2, r.target};
}

/// Transport of an image net through a left factor: centers map through R
/// and radii scale by the matching operator norm of R.
inline ImageNet transport_net_left(const ImageNet& net, const LinearOp& r, bool symmetric_mode) {
    LinearOp bound_op = r;
    if (symmetric_mode) {
        bound_op.source = symmetrize(r.source);
        bound_op.target = symmetrize(r.target);
    }
    ExtRational rn = op_norm(bound_op);
    if (!rn.is_finite())
        throw precondition_error("transport_net_left: factor is not continuous in this mode");
    ImageNet out;
    out.eps = rn.value() * net.eps;
    out.pairs = net.pairs;
    for (const auto& c : net.centers) out.centers.push_back(mat_apply(r.matrix, c));
    return out;
}

/// Pre-composition T o (S1, S2) with the scaling data of the ideal law:
/// beta_i = ||S_i|, beta = max, the inclusion S_i(B') in beta B verified by
/// one LP per ball generator, and the transported net radius scaled by
/// beta1 beta2 (the exact homogeneity factor of the bilinear image).
struct RightComposition {
    BilinearOp composed;
    ExtRational beta1, beta2, beta;
    bool inclusion_verified = false;
    std::optional<Rational> transported_radius;
    std::vector<QVec> transported_centers; // beta1 beta2 * centers, outside net
};

inline RightComposition bideal_compose_right(const BilinearOp& t, const LinearOp& s1,
                                             const LinearOp& s2,
                                             const std::optional<ImageNet>& net = std::nullopt) {
    if (!detail::same_norm(s1.target, t.source1) || !detail::same_norm(s2.target, t.source2))
        throw input_error("bideal_compose_right: factor targets do not match the sources");
    QTensor out(t.tensor.size());
    const std::size_t d1 = s1.matrix[0].size(), d2 = s2.matrix[0].size();
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k].assign(d1, QVec(d2, Rational(0)));
        for (std::size_t i = 0; i < t.tensor[k].size(); ++i)
            for (std::size_t j = 0; j < t.tensor[k][i].size(); ++j) {
                if (t.tensor[k][i][j] == 0) continue;
                for (std::size_t a = 0; a < d1; ++a) {
                    if (s1.matrix[i][a] == 0) continue;
                    for (std::size_t b = 0; b < d2; ++b)
                        out[k][a][b] += t.tensor[k][i][j] * s1.matrix[i][a] * s2.matrix[j][b];
                }
            }
    }
    RightComposition rc{BilinearOp{std::move(out), s1.source, s2.source, t.target},
                        op_norm(s1),
                        op_norm(s2),
                        ExtRational(Rational(0)),
                        false,
                        std::nullopt,
                        {}};
    rc.beta = max(rc.beta1, rc.beta2);
    if (!rc.beta.is_finite()) return rc; // discontinuous factor: no certificate

    // S_i(B') subset of beta * B, one LP per generator of the target ball
    Rational beta = rc.beta.value();
    rc.inclusion_verified = true;
    for (const auto& [s, space] : {std::pair<const LinearOp&, const AsymNorm&>{s1, t.source1},
                                   std::pair<const LinearOp&, const AsymNorm&>{s2, t.source2}}) {
        Polyhedron sball = unit_ball(s.source);
        for (const auto& a : space.generators) {
            auto outlp = solve_lp(mat_tapply(s.matrix, a), sball);
            if (outlp.status == LpStatus::Unbounded || *outlp.optimum > beta) {
                rc.inclusion_verified = false;
                break;
            }
        }
        if (!rc.inclusion_verified) break;
    }

    if (net && rc.beta1.is_finite() && rc.beta2.is_finite()) {
        Rational factor = rc.beta1.value() * rc.beta2.value();
        rc.transported_radius = factor * net->eps;
        for (const auto& c : net->centers) rc.transported_centers.push_back(scale_vec(factor, c));
    }
    return rc;
}

/// Rank-one operator (phi (x) z)(x, y) = phi(x, y) z.
inline BilinearOp rank_one_form_tensor(const BilinearForm& phi, const QVec& z,
                                       const AsymNorm& target) {
    if (static_cast<int>(z.size()) != target.dim)
        throw input_error("rank_one_form_tensor: z does not live in the target space");
    QTensor tensor(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        tensor[k].assign(phi.matrix.size(), QVec(phi.matrix[0].size(), Rational(0)));
        if (z[k] == 0) continue;
        for (std::size_t i = 0; i < phi.matrix.size(); ++i)
            for (std::size_t j = 0; j < phi.matrix[i].size(); ++j)
                tensor[k][i][j] = phi.matrix[i][j] * z[k];
    }
    return BilinearOp{std::move(tensor), phi.source1, phi.source2, target};
}

/// d_s-closedness of the certified class: a uniformly convergent sequence
/// of certified operators passes its nets to the limit with radius 3 eps.
struct ClosednessResult {
    struct PerEps {
        Rational eps;
        std::optional<std::size_t> tail_index; // least n0 with d_s(T_n, T) <= eps beyond
        bool certificate_verified = false;
        Rational radius;                       // 3 eps
        std::vector<QVec> centers;             // T at the net pairs of T_{n0}
    };
    std::vector<PerEps> entries;
    bool all_tails_found = true;
    bool all_verified = true;
};

inline ClosednessResult closedness_limit_check(
    const std::vector<std::pair<BilinearOp, PrecompactClassification>>& seq,
    const BilinearOp& limit, const std::vector<Rational>& eps_schedule,
    const Caps& caps = Caps{}) {
    if (seq.empty()) throw input_error("closedness_limit_check: empty sequence");
    for (const auto& [op, cls] : seq) {
        detail::require_same_signature(op, limit);
        if (cls.symmetric != ClassStatus::Certified)
            throw input_error("closedness_limit_check: a term lacks a precompactness certificate");
    }
    std::vector<ExtRational> ds;
    for (const auto& [op, cls] : seq) ds.push_back(operator_distance(op, limit, caps).symmetric);

    AsymNorm qs = symmetrize(limit.target);
    VRep b1 = detail::ball_vrep(limit.source1, caps);
    VRep b2 = detail::ball_vrep(limit.source2, caps);
    Rng rng(20240915);
    std::vector<std::pair<QVec, QVec>> test_pairs;
    for (const auto& v : b1.vertices)
        for (const auto& w : b2.vertices) test_pairs.push_back({v, w});
    for (int s = 0; s < 25; ++s)
        test_pairs.push_back({sample_ball_point(b1, rng), sample_ball_point(b2, rng)});

    ClosednessResult res;
    for (const auto& eps : eps_schedule) {
        ClosednessResult::PerEps entry{eps, std::nullopt, false, 3 * eps, {}};
        for (std::size_t n0 = 0; n0 < seq.size() && !entry.tail_index; ++n0) {
            bool ok = true;
            for (std::size_t n = n0; n < seq.size(); ++n)
                if (!(ds[n] <= ExtRational(eps))) {
                    ok = false;
                    break;
                }
            if (ok) entry.tail_index = n0;
        }
        if (entry.tail_index) {
            ImageNet base = image_net(seq[*entry.tail_index].first, qs, eps, caps);
            ImageNet transported;
            transported.eps = entry.radius;
            transported.pairs = base.pairs;
            for (const auto& [x, y] : base.pairs)
                transported.centers.push_back(apply_bilinear(limit, x, y));
            entry.centers = transported.centers;
            entry.certificate_verified =
                verify_image_net(limit, transported, qs, test_pairs, entry.radius);
            if (!entry.certificate_verified) res.all_verified = false;
        } else {
            res.all_tails_found = false;
        }
        res.entries.push_back(std::move(entry));
    }
    return res;
}

/// Arens adjoint at (psi, x): the functional y -> psi(T(x, y)) on the
/// second source space.
inline Functional arens_adjoint(const BilinearOp& t, const Functional& psi, const QVec& x) {
    if (static_cast<int>(psi.vector.size()) != t.target.dim ||
        static_cast<int>(x.size()) != t.source1.dim)
        throw input_error("arens_adjoint: signature mismatch");
    QMat form = contract_target(t.tensor, psi.vector);
    QVec g = mat_tapply(form, x);
    return make_functional(std::move(g), t.source2);
}

/// || T-star || over the symmetric spaces: the sup of psi(T(x, y)) over the
/// dual ball of q^s and the two symmetric unit balls, attained at vertex
/// triples. Equality with the symmetric norm of T is the checked identity.
inline Rational arens_norm(const BilinearOp& t, const Caps& caps = Caps{}) {
    Polyhedron dq = dual_ball(symmetrize(t.target), caps);
    VRep b1 = detail::ball_vrep(symmetrize(t.source1), caps);
    VRep b2 = detail::ball_vrep(symmetrize(t.source2), caps);
    Rational best(0);
    for (const auto& psi : dq.v_rep->vertices) {
        QMat form = contract_target(t.tensor, psi);
        for (const auto& x : b1.vertices)
            for (const auto& y : b2.vertices) {
                Rational v = 0;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    if (x[i] == 0) continue;
                    for (std::size_t j = 0; j < y.size(); ++j) v += form[i][j] * x[i] * y[j];
                }
                if (v > best) best = v;
            }
    }
    return best;
}

} // namespace asymlin
