#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "asymlin/asym_norm.hpp"

namespace asymlin {

using QuasiMetricFn = std::function<ExtRational(const QVec&, const QVec&)>;

enum class NetLocation { Inside, OutsideAllowed };

/// A finite covering witness: every listed sample point w is covered by the
/// net point of its record, with d(z, w) <= eps verified exactly. Inside
/// certificates additionally promise that all net points belong to the
/// covered set.
struct EpsNetCertificate {
    Rational eps;
    std::vector<QVec> net;
    std::vector<std::pair<std::size_t, std::size_t>> coverage; // (sample index, net index)
    NetLocation net_location = NetLocation::Inside;
};

/// Greedy covering of a finite sample by quasi-metric balls B_d(z, eps).
/// Centers are drawn from the sample in order (first uncovered point becomes
/// the next center), which keeps selections deterministic. With exact_min
/// set, an exhaustive set-cover search replaces the greedy choice (samples
/// of at most 20 points).
inline EpsNetCertificate greedy_eps_net(const std::vector<QVec>& sample, const QuasiMetricFn& d,
                                        const Rational& eps, NetLocation location,
                                        bool exact_min = false) {
    if (eps <= 0) throw input_error("greedy_eps_net: eps must be positive");
    const std::size_t n = sample.size();
    EpsNetCertificate cert;
    cert.eps = eps;
    cert.net_location = location;
    if (n == 0) return cert;

    std::vector<std::vector<bool>> covers(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) covers[i][j] = d(sample[i], sample[j]) <= eps;

    std::vector<std::size_t> chosen;
    if (exact_min) {
        if (n > 20) throw capacity_error("exact minimum cover limited to 20 sample points");
        std::vector<std::size_t> subset;
        std::function<bool(std::size_t, std::size_t)> search = [&](std::size_t start,
                                                                   std::size_t want) {
            if (want == 0) {
                std::vector<bool> cov(n, false);
                for (auto c : subset)
                    for (std::size_t j = 0; j < n; ++j)
                        if (covers[c][j]) cov[j] = true;
                for (std::size_t j = 0; j < n; ++j)
                    if (!cov[j]) return false;
                return true;
            }
            for (std::size_t c = start; c + want <= n; ++c) {
                subset.push_back(c);
                if (search(c + 1, want - 1)) return true;
                subset.pop_back();
            }
            return false;
        };
        for (std::size_t k = 1; k <= n; ++k) {
            subset.clear();
            if (search(0, k)) {
                chosen = subset;
                break;
            }
        }
    } else {
        std::vector<bool> covered(n, false);
        for (std::size_t j = 0; j < n; ++j) {
            if (covered[j]) continue;
            chosen.push_back(j);
            for (std::size_t w = 0; w < n; ++w)
                if (covers[j][w]) covered[w] = true;
        }
    }

    for (auto c : chosen) cert.net.push_back(sample[c]);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t zi = 0; zi < chosen.size(); ++zi) {
            if (covers[chosen[zi]][j]) {
                cert.coverage.push_back({j, zi});
                break;
            }
        }
    }
    return cert;
}

/// Re-evaluate every recorded witness of a certificate. An optional member
/// predicate enforces the inside-net promise. Each sample point must carry a
/// coverage record.
inline bool verify_eps_net(const EpsNetCertificate& cert, const std::vector<QVec>& sample,
                           const QuasiMetricFn& d,
                           const std::function<bool(const QVec&)>& member_fn = nullptr) {
    if (cert.net_location == NetLocation::Inside && member_fn)
        for (const auto& z : cert.net)
            if (!member_fn(z)) return false;
    std::vector<bool> seen(sample.size(), false);
    for (const auto& [si, zi] : cert.coverage) {
        if (si >= sample.size() || zi >= cert.net.size()) return false;
        if (!(d(cert.net[zi], sample[si]) <= cert.eps)) return false;
        seen[si] = true;
    }
    for (bool s : seen)
        if (!s) return false;
    return true;
}

enum class PrecompactStatus { Precompact, NotPrecompact };

/// Verdict with exactly one witness form: a coverage certificate when
/// precompact, an escaping ray with q(r) > 0 otherwise.
struct PrecompactVerdict {
    PrecompactStatus status = PrecompactStatus::NotPrecompact;
    std::optional<EpsNetCertificate> certificate;
    std::optional<QVec> escaping_ray;
};

namespace detail {

/// Comparison constant between the symmetrized gauge and the grid metric:
/// L = sup { q^s(z) : ||z||_inf <= 1 }, one LP per symmetrized generator.
inline Rational grid_comparison_constant(const AsymNorm& q) {
    AsymNorm qs = symmetrize(q);
    Polyhedron box = unit_ball(linf_norm(q.dim));
    Rational best(0);
    for (const auto& g : qs.generators) {
        auto out = solve_lp(g, box);
        if (out.status != LpStatus::Optimal) throw input_error("grid constant: degenerate gauge");
        if (*out.optimum > best) best = *out.optimum;
    }
    return best;
}

/// A point of conv(points) within the given sup-norm box radius of g, if any.
inline std::optional<QVec> convex_point_near(const std::vector<QVec>& points, const QVec& g,
                                             const Rational& radius) {
    const std::size_t np = points.size(), dim = g.size();
    QMat a;
    QVec b;
    for (std::size_t j = 0; j < dim; ++j) {
        QVec row(np);
        for (std::size_t i = 0; i < np; ++i) row[i] = points[i][j];
        a.push_back(row);
        b.push_back(g[j] + radius);
        a.push_back(neg(row));
        b.push_back(radius - g[j]);
    }
    QVec ones(np, Rational(1));
    a.push_back(ones);
    b.push_back(Rational(1));
    a.push_back(neg(ones));
    b.push_back(Rational(-1));
    for (std::size_t i = 0; i < np; ++i) {
        QVec row = zero_vec(np);
        row[i] = -1;
        a.push_back(row);
        b.push_back(Rational(0));
    }
    auto lam = lp_feasible_point(a, b, np);
    if (!lam) return std::nullopt;
    QVec y = zero_vec(dim);
    for (std::size_t i = 0; i < np; ++i) y = add(y, scale_vec((*lam)[i], points[i]));
    return y;
}

inline void enumerate_grid(const QVec& lo, const QVec& hi, const Rational& delta,
                           const std::function<void(const QVec&)>& visit) {
    const std::size_t dim = lo.size();
    std::vector<Integer> klo(dim), khi(dim);
    Integer total = 1;
    for (std::size_t j = 0; j < dim; ++j) {
        klo[j] = rational_floor(lo[j] / delta - Rational(1, 2));
        khi[j] = rational_ceil(hi[j] / delta + Rational(1, 2));
        total *= khi[j] - klo[j] + 1;
        if (total > 200000) throw capacity_error("grid net too fine for the configured guard");
    }
    std::vector<Integer> k = klo;
    for (;;) {
        QVec g(dim);
        for (std::size_t j = 0; j < dim; ++j) g[j] = Rational(k[j]) * delta;
        visit(g);
        std::size_t j = 0;
        while (j < dim) {
            if (k[j] < khi[j]) {
                ++k[j];
                break;
            }
            k[j] = klo[j];
            ++j;
        }
        if (j == dim) break;
    }
}

/// Inside net for the bounded part of a polyhedron: points of the region
/// such that every x in conv(vertices) has a net point within the sup-norm
/// distance delta. Grid cells separated from the region are skipped.
inline std::vector<QVec> grid_inside_net(const Polyhedron& region, const Rational& delta) {
    const auto& verts = region.v_rep->vertices;
    std::vector<QVec> net;
    if (verts.empty()) return net;
    QVec lo = verts[0], hi = verts[0];
    for (const auto& v : verts)
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] < lo[j]) lo[j] = v[j];
            if (v[j] > hi[j]) hi[j] = v[j];
        }
    Rational half = delta / 2;
    enumerate_grid(lo, hi, delta, [&](const QVec& g) {
        if (member(region, g)) {
            net.push_back(g);
            return;
        }
        for (const auto& ineq : region.h_rep)
            if (dot(ineq.normal, g) - half * l1_norm(ineq.normal) > ineq.offset) return;
        for (const auto& v : verts)
            if (linf_dist(v, g) <= half) {
                net.push_back(v);
                return;
            }
        auto y = convex_point_near(verts, g, half);
        if (y) net.push_back(*y);
    });
    return net;
}

} // namespace detail

/// Decide q-precompactness of a polyhedron exactly: P = conv(V) + cone(R) is
/// q-precompact iff q vanishes on every recession generator. Sufficiency:
/// ray parts are absorbed by q(x + t r - z) <= q(x - z) + t q(r). Necessity:
/// q(t r + v) >= t q(r) - q(-v), so points along a q-positive ray escape any
/// finite ball family. When precompact and given eps, an inside grid net
/// over the bounded part is built with spacing eps / (2 L); coverage is
/// recorded for the vertices plus any extra sample points (non-members are
/// ignored).
inline PrecompactVerdict polyhedron_precompact(const Polyhedron& region, const AsymNorm& q,
                                               const std::optional<Rational>& eps = std::nullopt,
                                               const std::vector<QVec>& extra_sample = {}) {
    if (!region.v_rep) throw input_error("polyhedron_precompact: V-representation required");
    if (q.dim != region.dim) throw input_error("polyhedron_precompact: dimension mismatch");
    PrecompactVerdict verdict;
    for (const auto& r : region.v_rep->rays) {
        if (eval_norm(q, r) > 0) {
            verdict.status = PrecompactStatus::NotPrecompact;
            verdict.escaping_ray = r;
            return verdict;
        }
    }
    verdict.status = PrecompactStatus::Precompact;
    if (!eps) return verdict;
    if (*eps <= 0) throw input_error("polyhedron_precompact: eps must be positive");

    EpsNetCertificate cert;
    cert.eps = *eps;
    cert.net_location = NetLocation::Inside;
    const auto& verts = region.v_rep->vertices;
    if (verts.empty()) { // empty set: nothing to cover
        verdict.certificate = std::move(cert);
        return verdict;
    }

    Rational big_l = detail::grid_comparison_constant(q);
    if (big_l == 0) throw input_error("polyhedron_precompact: degenerate gauge");
    Rational delta = *eps / (2 * big_l);
    cert.net = detail::grid_inside_net(region, delta);

    std::vector<QVec> to_cover = verts;
    for (const auto& s : extra_sample)
        if (member(region, s)) to_cover.push_back(s);
    for (std::size_t i = 0; i < to_cover.size(); ++i) {
        bool covered = false;
        for (std::size_t zi = 0; zi < cert.net.size(); ++zi) {
            if (quasi_metric(q, cert.net[zi], to_cover[i]) <= *eps) {
                cert.coverage.push_back({i, zi});
                covered = true;
                break;
            }
        }
        if (!covered)
            throw std::logic_error("grid net failed to cover a member point");
    }
    verdict.certificate = std::move(cert);
    return verdict;
}

/// A member of the region beyond every ball of the candidate net: along a
/// ray with q(r) > 0 the reverse triangle inequality pushes the distance
/// from every net point above eps.
inline QVec escape_witness(const Polyhedron& region, const AsymNorm& q, const QVec& ray,
                           const std::vector<QVec>& net, const Rational& eps) {
    if (!region.v_rep || region.v_rep->vertices.empty())
        throw input_error("escape_witness: vertices required");
    Rational qr = eval_norm(q, ray);
    if (qr <= 0) throw input_error("escape_witness: ray is not escaping");
    const QVec& base = region.v_rep->vertices.front();
    Rational worst(0);
    for (const auto& z : net) {
        Rational b = eval_norm(q, sub(z, base));
        if (b > worst) worst = b;
    }
    Rational t = (eps + worst + 1) / qr;
    QVec w = add(base, scale_vec(t, ray));
    for (const auto& z : net) {
        if (!(quasi_metric(q, z, w) > eps))
            throw std::logic_error("escape witness failed to escape");
    }
    return w;
}

struct KCauchyVerdict {
    Rational eps;
    std::optional<std::size_t> tail_index; // least n with d(x_n, x_m) < eps for all n <= m
};

/// Left K-Cauchy analysis of a finite sequence: for each epsilon, the least
/// tail index past which every ordered pair stays below epsilon.
inline std::vector<KCauchyVerdict> left_k_cauchy(const std::vector<QVec>& seq,
                                                 const QuasiMetricFn& d,
                                                 const std::vector<Rational>& eps_schedule) {
    if (seq.empty()) throw input_error("left_k_cauchy: empty sequence");
    const std::size_t n = seq.size();
    std::vector<std::vector<ExtRational>> dist(n, std::vector<ExtRational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) dist[i][j] = d(seq[i], seq[j]);
    std::vector<KCauchyVerdict> out;
    for (const auto& eps : eps_schedule) {
        KCauchyVerdict v{eps, std::nullopt};
        for (std::size_t start = 0; start < n && !v.tail_index; ++start) {
            bool ok = true;
            for (std::size_t i = start; i < n && ok; ++i)
                for (std::size_t j = i; j < n; ++j)
                    if (!(dist[i][j] < ExtRational(eps))) {
                        ok = false;
                        break;
                    }
            if (ok) v.tail_index = start;
        }
        out.push_back(v);
    }
    return out;
}

/// Greedy search for a long subsequence whose ordered pairs all stay below
/// eps. Sound but not guaranteed maximal; used as the hereditary
/// precompactness falsifier at sample scale.
inline std::vector<std::size_t> left_k_cauchy_subsequence(const std::vector<QVec>& seq,
                                                          const QuasiMetricFn& d,
                                                          const Rational& eps) {
    const std::size_t n = seq.size();
    std::vector<std::size_t> best;
    for (std::size_t start = 0; start < n; ++start) {
        std::vector<std::size_t> chain{start};
        for (std::size_t j = start + 1; j < n; ++j) {
            bool ok = true;
            for (auto i : chain)
                if (!(d(seq[i], seq[j]) < ExtRational(eps))) {
                    ok = false;
                    break;
                }
            if (ok) chain.push_back(j);
        }
        if (chain.size() > best.size()) best = chain;
    }
    return best;
}

/// sup { p(x) : x in P } via one LP per generator; infinity iff some LP is
/// unbounded.
inline ExtRational is_bounded(const Polyhedron& region, const AsymNorm& p) {
    if (p.dim != region.dim) throw input_error("is_bounded: dimension mismatch");
    ExtRational best(Rational(0));
    bool first = true;
    for (const auto& g : p.generators) {
        auto out = solve_lp(g, region);
        if (out.status == LpStatus::Infeasible) throw domain_error("is_bounded: empty region");
        if (out.status == LpStatus::Unbounded) return ExtRational::infinity();
        ExtRational v{*out.optimum};
        if (first || best < v) best = v;
        first = false;
    }
    return best;
}

} // namespace asymlin
