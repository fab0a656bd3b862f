#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "asymlin/generate.hpp"

namespace asymlin {

struct SuiteOptions {
    std::uint64_t seed = 0;
    Caps caps{};
    std::vector<Rational> eps_schedule; // empty: suite default
    int count = 0;                      // 0: suite default
    std::optional<std::string> only_instance; // replay filter
    std::string instance_text;          // for the instance-directives suite
};

struct CheckRecord {
    std::string tag;      // which identity or property was checked
    std::string instance; // instance id within the suite
    std::string status;   // pass | fail | refused
    std::string witness;  // exact values involved, as rational strings
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CheckRecord> records;
    std::size_t passed = 0, failed = 0, refused = 0;
    double wall_ms = 0.0;

    bool ok() const { return failed == 0; }

    std::string to_text() const {
        std::string s = "suite " + suite + " (seed " + std::to_string(seed) + ")\n";
        for (const auto& r : records) {
            s += "  [" + r.status + "] " + r.instance + " " + r.tag;
            if (!r.witness.empty()) s += "  :: " + r.witness;
            s += "\n";
        }
        s += "summary: " + std::to_string(passed) + " passed, " + std::to_string(failed) +
             " failed, " + std::to_string(refused) + " refused\n";
        return s;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["format"] = "asymlin-report/1";
        j["suite"] = suite;
        j["seed"] = seed;
        nlohmann::ordered_json recs = nlohmann::ordered_json::array();
        for (const auto& r : records)
            recs.push_back({{"tag", r.tag},
                            {"instance", r.instance},
                            {"status", r.status},
                            {"witness", r.witness}});
        j["records"] = std::move(recs);
        j["summary"] = {{"passed", passed}, {"failed", failed}, {"refused", refused}};
        // everything under "timestamp" is exempt from byte-identical
        // reproducibility
        j["timestamp"] = {{"wall_ms", wall_ms}};
        return j;
    }
};

namespace detail {

class Checker {
  public:
    Checker(SuiteReport& rep, const SuiteOptions& opts) : rep_(rep), opts_(opts) {}

    void set_instance(const std::string& id) { instance_ = id; }
    bool active() const {
        return !opts_.only_instance || *opts_.only_instance == instance_;
    }

    void check(const std::string& tag, bool ok, const std::string& witness) {
        if (!active()) return;
        std::string w = witness;
        if (!ok && w.empty()) w = "replay: seed " + std::to_string(rep_.seed) + ", instance " + instance_;
        rep_.records.push_back({tag, instance_, ok ? "pass" : "fail", std::move(w)});
        if (ok) ++rep_.passed;
        else ++rep_.failed;
    }

    void refused(const std::string& tag, const std::string& witness) {
        if (!active()) return;
        rep_.records.push_back({tag, instance_, "refused", witness});
        ++rep_.refused;
    }

  private:
    SuiteReport& rep_;
    const SuiteOptions& opts_;
    std::string instance_;
};

inline std::string inst_id(const char* prefix, int n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s-%03d", prefix, n);
    return buf;
}

inline std::vector<Rational> default_schedule(const SuiteOptions& o,
                                              std::initializer_list<Rational> def) {
    return o.eps_schedule.empty() ? std::vector<Rational>(def) : o.eps_schedule;
}

inline std::vector<std::pair<QVec, QVec>> product_test_pairs(const BilinearOp& t, Rng& rng,
                                                             int extra, const Caps& caps) {
    VRep b1 = ball_vrep(t.source1, caps);
    VRep b2 = ball_vrep(t.source2, caps);
    std::vector<std::pair<QVec, QVec>> pairs;
    for (const auto& v : b1.vertices)
        for (const auto& w : b2.vertices) pairs.push_back({v, w});
    for (int s = 0; s < extra; ++s)
        pairs.push_back({sample_ball_point(b1, rng), sample_ball_point(b2, rng)});
    return pairs;
}

} // namespace detail

// --------------------------------------------------------------------------
// Suites. Each one checks a family of identities over a seeded corpus and is
// keyed by the acceptance criterion it discharges.

/// Norm and quasi-metric axioms over a 200-instance corpus.
inline SuiteReport suite_axioms(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "axioms";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    int count = opts.count ? opts.count : 200;
    for (int n = 0; n < count; ++n) {
        ck.set_instance(detail::inst_id("axiom", n));
        int dim = 1 + n % 4;
        AsymNorm p = gen_norm(rng, dim, rng.flip());
        if (!ck.active()) continue;

        // (AN1): the zero sets of p and its conjugate meet only at 0,
        // decided exactly by LP per coordinate direction
        bool an1 = true;
        Polyhedron both = from_h(dim, {});
        for (const auto& g : p.generators) {
            both.h_rep.push_back({g, Rational(0)});
            both.h_rep.push_back({neg(g), Rational(0)});
        }
        for (int k = 0; k < dim && an1; ++k)
            for (int sgn : {1, -1}) {
                QVec obj = zero_vec(dim);
                obj[k] = sgn;
                auto out = solve_lp(obj, both);
                if (out.status != LpStatus::Optimal || *out.optimum != 0) {
                    an1 = false;
                    break;
                }
            }
        ck.check("an1-zero-sets", an1, "");

        bool an23 = true, qm = true;
        std::string witness;
        for (int s = 0; s < 200 && an23; ++s) {
            QVec x = rng.small_vector(dim, 3, 2);
            QVec y = rng.small_vector(dim, 3, 2);
            Rational alpha = rng.positive_rational(3, 2);
            if (eval_norm(p, x) < 0 ||
                eval_norm(p, scale_vec(alpha, x)) != alpha * eval_norm(p, x) ||
                eval_norm(p, add(x, y)) > eval_norm(p, x) + eval_norm(p, y)) {
                an23 = false;
                witness = "x=" + serialize_vector(x) + " y=" + serialize_vector(y);
            }
        }
        ck.check("an2-an3-samples", an23, witness);

        witness.clear();
        for (int s = 0; s < 1000 && qm; ++s) {
            QVec x = rng.small_vector(dim, 3, 2);
            QVec y = rng.small_vector(dim, 3, 2);
            QVec z = rng.small_vector(dim, 3, 2);
            if (quasi_metric(p, x, x) != 0 ||
                quasi_metric(p, x, z) > quasi_metric(p, x, y) + quasi_metric(p, y, z) ||
                (quasi_metric(p, x, y) == 0 && quasi_metric(p, y, x) == 0 && x != y)) {
                qm = false;
                witness = "x=" + serialize_vector(x) + " y=" + serialize_vector(y) +
                          " z=" + serialize_vector(z);
            }
        }
        ck.check("qm1-qm3-triples", qm, witness);
    }
    return rep;
}

/// Conjugation and symmetrization identities for quasi-metrics.
inline SuiteReport suite_conjugation(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "conjugation";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    int count = opts.count ? opts.count : 100;
    for (int n = 0; n < count; ++n) {
        ck.set_instance(detail::inst_id("conj", n));
        int dim = 1 + n % 3;
        AsymNorm p = gen_norm(rng, dim, rng.flip());
        if (!ck.active()) continue;
        AsymNorm pb = conjugate(p);
        AsymNorm ps = symmetrize(p);
        AsymNorm pbb = conjugate(pb);
        bool conj_ok = true, sym_ok = true, inv_ok = true;
        std::string witness;
        for (int s = 0; s < 500; ++s) {
            QVec x = rng.small_vector(dim, 3, 2);
            QVec y = rng.small_vector(dim, 3, 2);
            if (quasi_metric(pb, x, y) != quasi_metric(p, y, x)) conj_ok = false;
            if (quasi_metric(ps, x, y) !=
                std::max(quasi_metric(p, x, y), quasi_metric(p, y, x)))
                sym_ok = false;
            if (eval_norm(pbb, x) != eval_norm(p, x)) inv_ok = false;
            if (!(conj_ok && sym_ok && inv_ok)) {
                witness = "x=" + serialize_vector(x) + " y=" + serialize_vector(y);
                break;
            }
        }
        ck.check("conjugate-metric-flip", conj_ok, witness);
        ck.check("symmetrized-metric-max", sym_ok, witness);
        ck.check("conjugation-involution", inv_ok, witness);
    }
    return rep;
}

/// Linear operator norm identities: conjugation invariance, symmetric
/// domination, adjoint norm equality, smallest-constant property.
inline SuiteReport suite_adjoint_norm_equality(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "adjoint-norm-equality";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    int count = opts.count ? opts.count : 100;
    for (int n = 0; n < count; ++n) {
        ck.set_instance(detail::inst_id("lin", n));
        int sdim = 1 + static_cast<int>(rng.below(3));
        int tdim = 1 + static_cast<int>(rng.below(3));
        LinearOp a = gen_linear_op(rng, sdim, tdim, Profile::Mixed);
        if (!ck.active()) continue;

        auto res = op_norm_witnessed(a);
        LinearOp abar = a;
        abar.source = conjugate(a.source);
        abar.target = conjugate(a.target);
        ck.check("conjugate-pair-invariance", op_norm(abar) == res.value,
                 to_string(res.value) + " vs " + to_string(op_norm(abar)));

        LinearOp asym = a;
        asym.source = symmetrize(a.source);
        asym.target = symmetrize(a.target);
        ck.check("symmetric-domination", op_norm(asym) <= res.value,
                 to_string(op_norm(asym)) + " <= " + to_string(res.value));

        auto adj = adjoint(a, opts.caps);
        ck.check("adjoint-norm-equality", adjoint_norm(adj, a) == res.value,
                 to_string(res.value) + " vs " + to_string(adjoint_norm(adj, a)));

        if (res.value.is_finite() && res.value.value() > 0) {
            Rational beta = res.value.value() * Rational(999, 1000);
            const QVec& x = *res.maximizer;
            bool beaten =
                eval_norm(a.target, apply_op(a, x)) > beta * eval_norm(a.source, x);
            ck.check("smallest-constant-witness", beaten,
                     "beta=" + to_string(beta) + " x=" + serialize_vector(x));
        } else if (!res.value.is_finite()) {
            const QVec& r = *res.ray;
            QVec far = scale_vec(Rational(4096), r);
            bool beaten =
                eval_norm(a.target, apply_op(a, far)) > Rational(1000) * eval_norm(a.source, far);
            ck.check("smallest-constant-witness", beaten, "ray=" + serialize_vector(r));
        }
    }
    return rep;
}

/// sup over the conjugate source ball of q(Ax) equals sup over the source
/// ball of the conjugate target norm.
inline SuiteReport suite_sup_equivalence(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "sup-equivalence";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    int count = opts.count ? opts.count : 100;
    for (int n = 0; n < count; ++n) {
        ck.set_instance(detail::inst_id("sup", n));
        int sdim = 1 + static_cast<int>(rng.below(3));
        int tdim = 1 + static_cast<int>(rng.below(3));
        LinearOp a = gen_linear_op(rng, sdim, tdim, Profile::Mixed);
        if (!ck.active()) continue;
        LinearOp lhs = a;
        lhs.source = conjugate(a.source);
        LinearOp rhs = a;
        rhs.target = conjugate(a.target);
        auto l = op_norm(lhs), r = op_norm(rhs);
        ck.check("conjugate-ball-sup-swap", l == r, to_string(l) + " vs " + to_string(r));
    }
    return rep;
}

/// The two routes of the rescaling equivalence at several radii, with
/// degenerate instances whose source norm vanishes on a nontrivial ray.
inline SuiteReport suite_rescaling(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "rescaling";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    int count = opts.count ? opts.count : 50;
    std::vector<Rational> radii{Rational(1, 2), Rational(1), Rational(3)};
    for (int n = 0; n < count; ++n) {
        ck.set_instance(detail::inst_id("resc", n));
        BilinearOp t = [&] {
            if (n % 10 == 0) {
                // degenerate branch: the ball of the first source is
                // unbounded along a ray the tensor annihilates
                AsymNorm p1 = make_asym_norm(2, {{Rational(1), Rational(0)},
                                                 {Rational(-1), Rational(0)},
                                                 {Rational(0), Rational(1)},
                                                 {Rational(0), Rational(0)}});
                AsymNorm p2 = gen_norm(rng, 1, false);
                AsymNorm q = gen_norm(rng, 1, true);
                QTensor tensor(1, QMat(2, QVec(1, Rational(0))));
                tensor[0][0][0] = rng.small_rational(2, 2);
                return make_bilinear_op(tensor, p1, p2, q);
            }
            return gen_bilinear_op(rng, 1 + static_cast<int>(rng.below(2)),
                                   1 + static_cast<int>(rng.below(2)),
                                   1 + static_cast<int>(rng.below(2)), Profile::Mixed,
                                   Rational(1));
        }();
        if (!ck.active()) continue;

        Rational beta = rng.positive_rational(4, 2);
        for (const auto& r : radii) {
            auto v = rescaling_equivalence_check(t, beta, r, opts.caps);
            ck.check("rescaling-routes-agree", v.agree,
                     "r=" + to_string(r) + " beta=" + to_string(beta) + " unit=" +
                         to_string(v.unit_norm) + " scaled=" + to_string(v.scaled_sup));
            if (v.unit_norm.is_finite())
                ck.check("rescaling-exact-scale",
                         v.scaled_sup == ExtRational(r * r * v.unit_norm.value()),
                         "r=" + to_string(r));
        }
        if (n % 10 == 0) {
            // on the annihilated ray the semi-Lipschitz bound forces zero
            QVec x{Rational(0), Rational(-3 - static_cast<long long>(rng.below(5)))};
            bool zero_branch = eval_norm(t.source1, x) == 0;
            QVec y = rng.small_vector(1, 3, 2);
            zero_branch =
                zero_branch && eval_norm(t.target, apply_bilinear(t, x, y)) == 0;
            ck.check("rescaling-degenerate-zero-branch", zero_branch,
                     "x=" + serialize_vector(x) + " y=" + serialize_vector(y));
        }
    }
    return rep;
}

/// Bilinear norm identities: symmetric domination, adjoint norm equality
/// through the dual ball, the Arens identity, and the strict-gap corpus.
inline SuiteReport suite_bilinear_norms(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "bilinear-norm-identities";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    int count = opts.count ? opts.count : 100;
    int gap_seen = 0;
    for (int n = 0; n < count; ++n) {
        ck.set_instance(detail::inst_id("bil", n));
        BilinearOp t = [&] {
            if (n % 10 == 9) {
                // strict-gap pattern: a product form over upper-norm lines
                AsymNorm u = upper_norm();
                QTensor tensor(1, QMat(1, QVec(1, rng.positive_rational(3, 2))));
                return make_bilinear_op(tensor, u, u, u);
            }
            return gen_bilinear_op(rng, 1 + static_cast<int>(rng.below(2)),
                                   1 + static_cast<int>(rng.below(2)),
                                   1 + static_cast<int>(rng.below(2)), Profile::Mixed,
                                   Rational(1));
        }();
        if (!ck.active()) continue;

        ExtRational fwd = bilin_norm(t, opts.caps);
        Rational symv = sym_norm(t, opts.caps);
        ck.check("symmetric-below-forward", ExtRational(symv) <= fwd,
                 to_string(symv) + " <= " + to_string(fwd));
        ExtRational adj = bilinear_adjoint_norm(t, opts.caps);
        ck.check("bilinear-adjoint-norm-equality", adj == fwd,
                 to_string(fwd) + " vs " + to_string(adj));
        Rational arens = arens_norm(t, opts.caps);
        ck.check("arens-norm-identity", arens == symv,
                 to_string(symv) + " vs " + to_string(arens));
        if (n % 10 == 9) {
            bool gap = fwd.is_infinite() && symv > 0;
            if (gap) ++gap_seen;
            ck.check("strict-gap-instance", gap, "sym=" + to_string(symv));
        }
    }
    ck.set_instance("summary");
    ck.check("strict-gap-count", gap_seen >= 10, std::to_string(gap_seen) + " >= 10");
    return rep;
}

/// The bilinear Schauder construction at the acceptance epsilons, with the
/// emitted 3-eps bound re-verified and the measured covering radius
/// recorded.
inline SuiteReport suite_schauder_bilinear(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "schauder-bilinear";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    int count = opts.count ? opts.count : 20;
    auto schedule = detail::default_schedule(opts, {Rational(1, 2), Rational(1, 4)});
    for (int n = 0; n < count; ++n) {
        ck.set_instance(detail::inst_id("schb", n));
        int d1 = 1 + n % 2, d2 = 1 + (n / 2) % 2, dz = 1 + (n / 4) % 2;
        BilinearOp t =
            gen_bilinear_op(rng, d1, d2, dz, Profile::SymmetricBounded, Rational(1, 16));
        if (!ck.active()) continue;
        auto cls = precompact_class(t, opts.caps);
        ck.check("precompact-certified", cls.symmetric == ClassStatus::Certified, "");
        for (const auto& eps : schedule) {
            auto res = schauder_bilinear_net(t, eps, opts.caps);
            ck.check("dual-net-three-eps", res.verified,
                     "eps=" + to_string(eps) + " measured=" + to_string(res.measured_radius) +
                         " bound=" + to_string(res.dual_radius) +
                         " net=" + std::to_string(res.dual_net.size()));
        }
    }
    return rep;
}

/// Ideal laws: left and right composition transport certificates that
/// re-verify from scratch, the scaled-ball inclusion is checked by LP, and
/// rank-one operators obey the product formula.
inline SuiteReport suite_bideal(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "bideal";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    int count = opts.count ? opts.count : 20;
    Rational eps(1, 2);

    for (int n = 0; n < count; ++n) {
        ck.set_instance(detail::inst_id("bidl", n));
        int d1 = 1 + n % 2, d2 = 1 + (n / 2) % 2, dz = 1 + n % 2;
        BilinearOp t =
            gen_bilinear_op(rng, d1, d2, dz, Profile::SymmetricBounded, Rational(1, 16));
        if (!ck.active()) continue;
        AsymNorm qs = symmetrize(t.target);
        ImageNet net = image_net(t, qs, eps, opts.caps);

        // left composition in the symmetric mode
        QMat rm(dz);
        for (auto& row : rm) row = rng.small_vector(dz, 2, 2);
        LinearOp r = make_linear_op(rm, qs, gen_norm(rng, dz, false));
        BilinearOp rt = bideal_compose_left(r, t);
        ImageNet moved = transport_net_left(net, r, false);
        Rng vr(opts.seed ^ (0x9e3779b97f4a7c15ULL + n));
        auto tests = detail::product_test_pairs(rt, vr, 15, opts.caps);
        bool left_ok = verify_image_net(rt, moved, symmetrize(rt.target), tests, moved.eps);
        ck.check("left-composition-reverified", left_ok,
                 "radius=" + to_string(moved.eps) + " net=" + std::to_string(moved.centers.size()));

        // right composition with bounded factors
        AsymNorm s1src = gen_norm(rng, d1, false);
        AsymNorm s2src = gen_norm(rng, d2, false);
        QMat m1(d1), m2(d2);
        for (auto& row : m1) row = rng.small_vector(d1, 2, 2);
        for (auto& row : m2) row = rng.small_vector(d2, 2, 2);
        LinearOp s1 = make_linear_op(m1, s1src, t.source1);
        LinearOp s2 = make_linear_op(m2, s2src, t.source2);
        auto rc = bideal_compose_right(t, s1, s2, net);
        ck.check("right-composition-inclusion-lp",
                 rc.inclusion_verified && rc.beta == max(rc.beta1, rc.beta2),
                 "beta1=" + to_string(rc.beta1) + " beta2=" + to_string(rc.beta2));
        if (rc.transported_radius) {
            ImageNet tnet;
            tnet.eps = *rc.transported_radius;
            tnet.centers = rc.transported_centers;
            auto tests2 = detail::product_test_pairs(rc.composed, vr, 15, opts.caps);
            bool right_ok = verify_image_net(rc.composed, tnet, symmetrize(rc.composed.target),
                                             tests2, tnet.eps);
            ck.check("right-composition-reverified", right_ok,
                     "radius=" + to_string(tnet.eps));
        }

        // rank-one operator and its product formula
        QMat fm(d1);
        for (auto& row : fm) row = rng.small_vector(d2, 2, 2);
        BilinearForm phi = make_bilinear_form(fm, linf_norm(d1), linf_norm(d2));
        QVec z = rng.small_vector(dz, 2, 2);
        BilinearOp rank1 = rank_one_form_tensor(phi, z, t.target);
        QMat fneg = fm;
        for (auto& row : fneg)
            for (auto& v : row) v = -v;
        BilinearForm phin = make_bilinear_form(fneg, linf_norm(d1), linf_norm(d2));
        ExtRational expect = max(scale(eval_norm(t.target, z), form_norm(phi, opts.caps)),
                                 scale(eval_norm(t.target, neg(z)), form_norm(phin, opts.caps)));
        ck.check("rank-one-norm-formula", bilin_norm(rank1, opts.caps) == expect,
                 to_string(expect));
        auto r1class = precompact_class(rank1, opts.caps);
        ck.check("rank-one-certified", r1class.symmetric == ClassStatus::Certified, "");
    }

    // a discontinuous factor is refused with the infinite norm reported
    ck.set_instance("bidl-refusal");
    AsymNorm u = upper_norm();
    BilinearOp prod = make_bilinear_op({{{Rational(1)}}}, linf_norm(1), linf_norm(1), u);
    LinearOp neg_op = make_linear_op({{Rational(-1)}}, u, linf_norm(1));
    auto rc = bideal_compose_right(prod, neg_op, make_linear_op({{Rational(1)}}, linf_norm(1),
                                                                linf_norm(1)));
    if (!opts.only_instance || *opts.only_instance == "bidl-refusal") {
        ck.check("right-composition-refusal",
                 rc.beta1.is_infinite() && !rc.transported_radius.has_value(),
                 "beta1=" + to_string(rc.beta1));
    }
    return rep;
}

/// d_s-closedness: uniformly convergent certified sequences pass a 3-eps
/// certificate to the limit; sequences without a uniform tail are refused.
inline SuiteReport suite_closedness(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "closedness";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    auto schedule = detail::default_schedule(opts, {Rational(1, 2), Rational(1, 4)});
    int uniform_count = opts.count ? opts.count : 10;
    for (int n = 0; n < uniform_count; ++n) {
        ck.set_instance(detail::inst_id("clos", n));
        BilinearOp base = gen_bilinear_op(rng, 1 + n % 2, 1 + (n / 2) % 2, 1 + n % 2,
                                          Profile::SymmetricBounded, Rational(1, 16));
        if (!ck.active()) continue;
        std::vector<std::pair<BilinearOp, PrecompactClassification>> seq;
        for (int k = 1; k <= 8; ++k) {
            BilinearOp tk = base;
            for (auto& slice : tk.tensor)
                for (auto& row : slice)
                    for (auto& v : row) v *= Rational(k - 1, k);
            seq.push_back({tk, precompact_class(tk, opts.caps)});
        }
        auto res = closedness_limit_check(seq, base, schedule, opts.caps);
        ck.check("closedness-uniform-limit", res.all_tails_found && res.all_verified, "");
    }
    for (int n = 0; n < 5; ++n) {
        ck.set_instance(detail::inst_id("clos-div", n));
        // rescale so the symmetric norm is exactly 2: the gaps (k-1)*2 can
        // never settle below the schedule epsilons
        BilinearOp base = gen_bilinear_op(rng, 1, 1, 1, Profile::SymmetricBounded, Rational(1));
        if (!ck.active()) continue;
        Rational s = sym_norm(base, opts.caps);
        if (s == 0) {
            base.tensor[0][0][0] = 1;
            s = sym_norm(base, opts.caps);
        }
        for (auto& slice : base.tensor)
            for (auto& row : slice)
                for (auto& v : row) v = v * 2 / s;
        std::vector<std::pair<BilinearOp, PrecompactClassification>> seq;
        for (int k = 1; k <= 6; ++k) {
            BilinearOp tk = base;
            for (auto& slice : tk.tensor)
                for (auto& row : slice)
                    for (auto& v : row) v *= Rational(k);
            seq.push_back({tk, precompact_class(tk, opts.caps)});
        }
        auto res = closedness_limit_check(seq, base, schedule, opts.caps);
        bool refused_all = !res.all_tails_found;
        if (refused_all) ck.refused("closedness-no-uniform-tail", "gaps grow linearly");
        ck.check("closedness-divergent-refused", refused_all, "");
    }
    return rep;
}

/// Sequential dual-ball compactness for forms: entrywise bound, extraction,
/// and the closedness of the ball under the exhibited limits.
inline SuiteReport suite_alaoglu(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "alaoglu";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    int count = opts.count ? opts.count : 20;
    auto schedule = detail::default_schedule(opts, {Rational(1, 2), Rational(1, 8)});
    for (int n = 0; n < count; ++n) {
        ck.set_instance(detail::inst_id("alao", n));
        int d1 = 1 + n % 2, d2 = 1 + (n / 2) % 2;
        AsymNorm p1 = linf_norm(d1), p2 = linf_norm(d2);
        if (!ck.active()) continue;

        // base and perturbation with entry mass <= 1/2 each, so every term
        // stays in the unit ball exactly
        auto small_form = [&](const Rational& budget) {
            QMat m(d1, QVec(d2, Rational(0)));
            Rational left = budget;
            for (auto& row : m)
                for (auto& v : row) {
                    Rational mag = rng.positive_rational(2, 8) / 4;
                    if (mag > left) mag = left;
                    v = rng.flip() ? mag : -mag;
                    left -= mag;
                }
            return m;
        };
        QMat base = small_form(Rational(1, 2));
        QMat dir = small_form(Rational(1, 2));

        std::vector<BilinearForm> seq;
        QMat limit = base;
        int pattern = n % 3;
        for (int i = 1; i <= 64; ++i) {
            QMat m = base;
            if (pattern == 0) { // decaying perturbation
                for (std::size_t r = 0; r < m.size(); ++r)
                    for (std::size_t c = 0; c < m[r].size(); ++c)
                        m[r][c] += dir[r][c] / i;
            } else if (pattern == 1) { // alternating: the constant run wins
                if (i % 2 == 0)
                    for (std::size_t r = 0; r < m.size(); ++r)
                        for (std::size_t c = 0; c < m[r].size(); ++c) m[r][c] += dir[r][c];
            } else { // constant
            }
            seq.push_back(make_bilinear_form(m, p1, p2));
        }
        if (pattern == 1) {
            // the extractor settles on one parity class; both are valid
            // limits, so claim the even one
            limit = base;
        }

        std::vector<std::pair<QVec, QVec>> probes;
        for (int i = 0; i < d1; ++i)
            for (int j = 0; j < d2; ++j) probes.push_back({unit_vec(d1, i), unit_vec(d2, j)});
        for (int s = 0; s < 3; ++s)
            probes.push_back({rng.small_vector(d1, 3, 2), rng.small_vector(d2, 3, 2)});

        auto res = alaoglu_desk_check(p1, p2, seq, probes, schedule, limit, opts.caps);
        ck.check("entrywise-product-bound", res.entry_bound_ok, "");
        ck.check("subsequence-converges", res.converged,
                 "len=" + std::to_string(res.subsequence.size()));
        ck.check("limit-form-in-ball", res.limit_in_ball, "");
    }
    return rep;
}

/// The polyhedral precompactness decision rule against the sampling oracle,
/// plus precompact-implies-bounded.
inline SuiteReport suite_precompactness(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "precompactness";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    Rng rng(opts.seed);
    int count = opts.count ? opts.count : 100;
    for (int n = 0; n < count; ++n) {
        ck.set_instance(detail::inst_id("prec", n));
        int dim = 1 + n % 2;
        AsymNorm ball_norm = gen_norm(rng, dim, rng.flip());
        AsymNorm q = gen_norm(rng, dim, rng.flip());
        if (!ck.active()) continue;
        Polyhedron region = enumerate_v_rep(unit_ball(ball_norm), opts.caps);

        std::vector<QVec> sample;
        for (int s = 0; s < 1000; ++s) {
            QVec x = rng.small_vector(dim, 4, 2);
            if (member(region, x)) sample.push_back(x);
        }
        for (const auto& r : region.v_rep->rays)
            for (int t : {3, 20, 200})
                sample.push_back(add(region.v_rep->vertices[0], scale_vec(Rational(t), r)));

        auto verdict = polyhedron_precompact(region, q, Rational(1, 2), sample);
        if (verdict.status == PrecompactStatus::Precompact) {
            std::vector<QVec> covered = region.v_rep->vertices;
            for (const auto& s : sample)
                if (member(region, s)) covered.push_back(s);
            QuasiMetricFn dq = [&q](const QVec& a, const QVec& b) {
                return ExtRational(quasi_metric(q, a, b));
            };
            bool ok = verify_eps_net(*verdict.certificate, covered, dq,
                                     [&](const QVec& z) { return member(region, z); });
            ck.check("certificate-coverage", ok,
                     "net=" + std::to_string(verdict.certificate->net.size()) + " over " +
                         std::to_string(covered.size()) + " points");
            ck.check("precompact-implies-bounded", is_bounded(region, q).is_finite(), "");
        } else {
            std::vector<QVec> escape_sample;
            const QVec& base = region.v_rep->vertices.front();
            for (int k = 1; k <= 10; ++k)
                escape_sample.push_back(
                    add(base, scale_vec(Rational(3 * k), *verdict.escaping_ray)));
            bool escapes = true;
            try {
                QVec w = escape_witness(region, q, *verdict.escaping_ray, escape_sample,
                                        Rational(1, 2));
                escapes = member(region, w);
            } catch (const std::exception&) {
                escapes = false;
            }
            ck.check("escaping-ray-witness", escapes,
                     "ray=" + serialize_vector(*verdict.escaping_ray));
        }
    }
    return rep;
}

/// Run the directives of a parsed instance file as checks.
inline SuiteReport suite_instance_directives(const SuiteOptions& opts) {
    SuiteReport rep;
    rep.suite = "instance-directives";
    rep.seed = opts.seed;
    detail::Checker ck(rep, opts);
    InstanceFile f = parse_instance(opts.instance_text, opts.caps);
    for (std::size_t i = 0; i < f.directives.size(); ++i) {
        ck.set_instance("directive-" + std::to_string(i));
        if (!ck.active()) continue;
        auto res = run_directive(f, f.directives[i], opts.caps);
        if (res.checked)
            ck.check(res.description, res.ok,
                     "value=" + res.value + " expected=" + *f.directives[i].expect);
        else
            ck.check(res.description + " (report)", true, "value=" + res.value);
    }
    return rep;
}

inline const std::map<std::string, SuiteReport (*)(const SuiteOptions&)>& suite_registry() {
    static const std::map<std::string, SuiteReport (*)(const SuiteOptions&)> reg{
        {"axioms", &suite_axioms},
        {"conjugation", &suite_conjugation},
        {"adjoint-norm-equality", &suite_adjoint_norm_equality},
        {"sup-equivalence", &suite_sup_equivalence},
        {"rescaling", &suite_rescaling},
        {"bilinear-norm-identities", &suite_bilinear_norms},
        {"schauder-bilinear", &suite_schauder_bilinear},
        {"bideal", &suite_bideal},
        {"closedness", &suite_closedness},
        {"alaoglu", &suite_alaoglu},
        {"precompactness", &suite_precompactness},
        {"instance-directives", &suite_instance_directives},
    };
    return reg;
}

inline std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : suite_registry()) names.push_back(name);
    return names;
}

inline SuiteReport run_suite(const std::string& name, const SuiteOptions& opts) {
    auto it = suite_registry().find(name);
    if (it == suite_registry().end()) {
        std::string msg = "unknown suite '" + name + "'; available:";
        for (const auto& s : suite_names()) msg += " " + s;
        throw input_error(msg);
    }
    auto t0 = std::chrono::steady_clock::now();
    SuiteReport rep = it->second(opts);
    auto t1 = std::chrono::steady_clock::now();
    rep.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    std::stable_sort(rep.records.begin(), rep.records.end(),
                     [](const CheckRecord& a, const CheckRecord& b) {
                         return a.instance < b.instance;
                     });
    return rep;
}

} // namespace asymlin
