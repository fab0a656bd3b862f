#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asymlin/lp.hpp"

namespace asymlin {

/// One closed halfspace <normal, x> <= offset.
struct Inequality {
    QVec normal;
    Rational offset;
};

/// Generator form: conv(vertices) + cone(rays). Lineality is folded into the
/// ray list as +/- pairs. Empty vertex list means the empty set.
struct VRep {
    std::vector<QVec> vertices;
    std::vector<QVec> rays;
};

/// A convex polyhedron in Q^dim. The H-representation is always present; the
/// V-representation is filled by enumerate_v_rep (or at construction from
/// generators).
struct Polyhedron {
    int dim = 0;
    std::vector<Inequality> h_rep;
    std::optional<VRep> v_rep;
};

inline bool member(const Polyhedron& p, const QVec& x) {
    if (static_cast<int>(x.size()) != p.dim) throw input_error("member: dimension mismatch");
    for (const auto& ineq : p.h_rep)
        if (dot(ineq.normal, x) > ineq.offset) return false;
    return true;
}

inline Polyhedron from_h(int dim, std::vector<Inequality> rows) {
    if (dim <= 0) throw input_error("polyhedron dimension must be positive");
    for (const auto& r : rows)
        if (static_cast<int>(r.normal.size()) != dim)
            throw input_error("inequality dimension mismatch");
    Polyhedron p;
    p.dim = dim;
    p.h_rep = std::move(rows);
    return p;
}

/// Exactly maximize <objective, x> over the region's H-representation.
inline LpOutcome solve_lp(const QVec& objective, const Polyhedron& region) {
    if (static_cast<int>(objective.size()) != region.dim)
        throw input_error("solve_lp: objective length != region dimension");
    QMat a;
    QVec b;
    for (const auto& ineq : region.h_rep) {
        a.push_back(ineq.normal);
        b.push_back(ineq.offset);
    }
    return lp_maximize(objective, a, b);
}

namespace detail {

// Bitset over processed inequality indices (tight sets for rays).
class TightSet {
  public:
    explicit TightSet(std::size_t nbits = 0) : bits_((nbits + 63) / 64, 0) {}
    void set(std::size_t i) { bits_[i / 64] |= std::uint64_t(1) << (i % 64); }
    bool subset_of(const TightSet& other) const {
        for (std::size_t w = 0; w < bits_.size(); ++w)
            if (bits_[w] & ~other.bits_[w]) return false;
        return true;
    }
    TightSet intersect(const TightSet& other) const {
        TightSet r = *this;
        for (std::size_t w = 0; w < bits_.size(); ++w) r.bits_[w] &= other.bits_[w];
        return r;
    }

  private:
    std::vector<std::uint64_t> bits_;
};

struct DDRay {
    QVec v;
    TightSet tight;
};

struct DDPair {
    std::vector<QVec> lines;
    std::vector<DDRay> rays;
};

/// Double description for the cone {v : <row_i, v> <= 0}. Starts from the
/// whole space as a line basis; lines are eliminated one hyperplane at a
/// time, then the classical ray step with the combinatorial adjacency test
/// (Fukuda-Prodon) keeps the pair minimal.
inline DDPair dd_cone(const std::vector<QVec>& rows, std::size_t dim, std::size_t ray_cap) {
    DDPair dd;
    for (std::size_t j = 0; j < dim; ++j) dd.lines.push_back(unit_vec(dim, j));

    const std::size_t nrows = rows.size();
    for (std::size_t k = 0; k < nrows; ++k) {
        const QVec& a = rows[k];
        if (is_zero(a)) {
            for (auto& r : dd.rays) r.tight.set(k);
            continue;
        }

        std::size_t il = dd.lines.size();
        for (std::size_t i = 0; i < dd.lines.size(); ++i) {
            if (dot(a, dd.lines[i]) != 0) {
                il = i;
                break;
            }
        }
        if (il < dd.lines.size()) {
            QVec pivot = dd.lines[il];
            Rational pv = dot(a, pivot);
            dd.lines.erase(dd.lines.begin() + il);
            for (auto& l : dd.lines) {
                Rational lv = dot(a, l);
                if (lv != 0) l = primitive(sub(l, scale_vec(lv / pv, pivot)));
            }
            for (auto& r : dd.rays) {
                Rational rv = dot(a, r.v);
                if (rv != 0) r.v = primitive(sub(r.v, scale_vec(rv / pv, pivot)));
                r.tight.set(k);
            }
            DDRay nr;
            nr.v = pv > 0 ? primitive(neg(pivot)) : primitive(pivot);
            nr.tight = TightSet(nrows);
            for (std::size_t j = 0; j < k; ++j) nr.tight.set(j);
            dd.rays.push_back(std::move(nr));
            continue;
        }

        std::vector<std::size_t> pos, zero, negi;
        std::vector<Rational> val(dd.rays.size());
        for (std::size_t i = 0; i < dd.rays.size(); ++i) {
            val[i] = dot(a, dd.rays[i].v);
            if (val[i] > 0) pos.push_back(i);
            else if (val[i] == 0) zero.push_back(i);
            else negi.push_back(i);
        }
        if (pos.empty()) {
            for (auto i : zero) dd.rays[i].tight.set(k);
            continue;
        }

        std::vector<DDRay> created;
        for (auto ip : pos) {
            for (auto in : negi) {
                TightSet common = dd.rays[ip].tight.intersect(dd.rays[in].tight);
                bool adjacent = true;
                for (std::size_t i = 0; i < dd.rays.size(); ++i) {
                    if (i == ip || i == in) continue;
                    if (common.subset_of(dd.rays[i].tight)) {
                        adjacent = false;
                        break;
                    }
                }
                if (!adjacent) continue;
                DDRay nr;
                nr.v = primitive(sub(scale_vec(val[ip], dd.rays[in].v),
                                     scale_vec(val[in], dd.rays[ip].v)));
                nr.tight = common;
                nr.tight.set(k);
                created.push_back(std::move(nr));
            }
        }

        std::vector<DDRay> next;
        for (auto i : negi) next.push_back(std::move(dd.rays[i]));
        for (auto i : zero) {
            dd.rays[i].tight.set(k);
            next.push_back(std::move(dd.rays[i]));
        }
        for (auto& nr : created) {
            bool dup = false;
            for (const auto& ex : next)
                if (ex.v == nr.v) {
                    dup = true;
                    break;
                }
            if (!dup) next.push_back(std::move(nr));
        }
        dd.rays = std::move(next);
        if (dd.rays.size() > ray_cap)
            throw capacity_error("double description ray count exceeded cap");
    }
    return dd;
}

inline bool conic_combination_exists(const std::vector<QVec>& gens, const QVec& target) {
    // feasibility of sum mu_i g_i = target, mu >= 0
    if (gens.empty()) return is_zero(target);
    std::size_t m = gens.size(), d = target.size();
    QMat a;
    QVec b;
    for (std::size_t j = 0; j < d; ++j) {
        QVec row(m);
        for (std::size_t i = 0; i < m; ++i) row[i] = gens[i][j];
        a.push_back(row);
        b.push_back(target[j]);
        a.push_back(neg(row));
        b.push_back(-target[j]);
    }
    for (std::size_t i = 0; i < m; ++i) {
        QVec row = zero_vec(m);
        row[i] = -1;
        a.push_back(row);
        b.push_back(Rational(0));
    }
    return lp_feasible_point(a, b, m).has_value();
}

inline bool convex_conic_combination_exists(const std::vector<QVec>& points,
                                            const std::vector<QVec>& gens, const QVec& target) {
    // feasibility of sum l_i p_i + sum mu_j g_j = target, l,mu >= 0, sum l = 1
    if (points.empty()) return false;
    std::size_t np = points.size(), ng = gens.size(), d = target.size();
    std::size_t m = np + ng;
    QMat a;
    QVec b;
    for (std::size_t j = 0; j < d; ++j) {
        QVec row(m);
        for (std::size_t i = 0; i < np; ++i) row[i] = points[i][j];
        for (std::size_t i = 0; i < ng; ++i) row[np + i] = gens[i][j];
        a.push_back(row);
        b.push_back(target[j]);
        a.push_back(neg(row));
        b.push_back(-target[j]);
    }
    QVec ones = zero_vec(m);
    for (std::size_t i = 0; i < np; ++i) ones[i] = 1;
    a.push_back(ones);
    b.push_back(Rational(1));
    a.push_back(neg(ones));
    b.push_back(Rational(-1));
    for (std::size_t i = 0; i < m; ++i) {
        QVec row = zero_vec(m);
        row[i] = -1;
        a.push_back(row);
        b.push_back(Rational(0));
    }
    return lp_feasible_point(a, b, m).has_value();
}

/// Drop duplicate / non-extreme vertices and redundant rays.
inline void minimize_v_rep(VRep& v) {
    std::vector<QVec> verts;
    for (const auto& x : v.vertices)
        if (std::find(verts.begin(), verts.end(), x) == verts.end()) verts.push_back(x);
    std::vector<QVec> rays;
    for (const auto& r : v.rays) {
        QVec c = primitive(r);
        if (is_zero(c)) continue;
        if (std::find(rays.begin(), rays.end(), c) == rays.end()) rays.push_back(c);
    }
    if (verts.size() > 1 || !rays.empty()) {
        std::vector<QVec> kept;
        for (std::size_t i = 0; i < verts.size(); ++i) {
            std::vector<QVec> others;
            for (std::size_t j = 0; j < verts.size(); ++j)
                if (j != i) others.push_back(verts[j]);
            if (!convex_conic_combination_exists(others, rays, verts[i]))
                kept.push_back(verts[i]);
        }
        verts = std::move(kept);
    }
    if (rays.size() > 1) {
        std::vector<QVec> kept;
        for (std::size_t i = 0; i < rays.size(); ++i) {
            std::vector<QVec> others;
            for (std::size_t j = 0; j < rays.size(); ++j)
                if (j != i) others.push_back(rays[j]);
            if (!conic_combination_exists(others, rays[i])) kept.push_back(rays[i]);
        }
        rays = std::move(kept);
    }
    v.vertices = std::move(verts);
    v.rays = std::move(rays);
}

constexpr std::size_t kDDRayCap = 4096;

} // namespace detail

/// Populate the V-representation by double description on the homogenization
/// cone {(x, t) : <a_i, x> - c_i t <= 0, t >= 0}.
inline Polyhedron enumerate_v_rep(const Polyhedron& region, const Caps& caps = Caps{}) {
    if (region.dim > caps.dim_cap)
        throw capacity_error("enumerate_v_rep: dimension " + std::to_string(region.dim) +
                             " above cap " + std::to_string(caps.dim_cap));
    const std::size_t d = static_cast<std::size_t>(region.dim);
    std::vector<QVec> rows;
    for (const auto& ineq : region.h_rep) {
        QVec row = ineq.normal;
        row.push_back(-ineq.offset);
        rows.push_back(std::move(row));
    }
    QVec trow = zero_vec(d + 1);
    trow[d] = -1;
    rows.push_back(std::move(trow));

    detail::DDPair dd = detail::dd_cone(rows, d + 1, detail::kDDRayCap);

    VRep v;
    for (const auto& r : dd.rays) {
        Rational t = r.v[d];
        QVec sp(r.v.begin(), r.v.begin() + d);
        if (t > 0) {
            for (auto& q : sp) q /= t;
            v.vertices.push_back(std::move(sp));
        } else {
            v.rays.push_back(std::move(sp));
        }
    }
    for (const auto& l : dd.lines) {
        QVec sp(l.begin(), l.begin() + d);
        v.rays.push_back(sp);
        v.rays.push_back(neg(sp));
    }
    if (v.vertices.empty()) {
        v.rays.clear(); // empty set
    }
    detail::minimize_v_rep(v);

    Polyhedron out = region;
    out.v_rep = std::move(v);
    return out;
}

/// Build a polyhedron from generators; the H-representation is recovered by
/// double description on the polar of the homogenization cone.
inline Polyhedron from_v(int dim, std::vector<QVec> vertices, std::vector<QVec> rays,
                         const Caps& caps = Caps{}) {
    if (dim <= 0) throw input_error("polyhedron dimension must be positive");
    if (dim > caps.dim_cap) throw capacity_error("from_v: dimension above cap");
    const std::size_t d = static_cast<std::size_t>(dim);
    for (const auto& x : vertices)
        if (x.size() != d) throw input_error("vertex dimension mismatch");
    for (const auto& r : rays) {
        if (r.size() != d) throw input_error("ray dimension mismatch");
        if (is_zero(r)) throw input_error("rays must be nonzero");
    }

    Polyhedron p;
    p.dim = dim;
    VRep v{std::move(vertices), std::move(rays)};
    detail::minimize_v_rep(v);
    if (v.vertices.empty()) {
        QVec zn = zero_vec(d);
        p.h_rep.push_back({zn, Rational(-1)});
        p.v_rep = VRep{};
        return p;
    }

    std::vector<QVec> polar_rows;
    for (const auto& vx : v.vertices) {
        QVec row = vx;
        row.push_back(Rational(1));
        polar_rows.push_back(std::move(row));
    }
    for (const auto& r : v.rays) {
        QVec row = r;
        row.push_back(Rational(0));
        polar_rows.push_back(std::move(row));
    }
    detail::DDPair dd = detail::dd_cone(polar_rows, d + 1, detail::kDDRayCap);
    for (const auto& w : dd.rays) {
        QVec a(w.v.begin(), w.v.begin() + d);
        Rational beta = w.v[d];
        if (is_zero(a)) continue;
        p.h_rep.push_back({std::move(a), -beta});
    }
    for (const auto& l : dd.lines) {
        QVec a(l.begin(), l.begin() + d);
        Rational beta = l[d];
        if (is_zero(a)) continue;
        p.h_rep.push_back({a, -beta});
        p.h_rep.push_back({neg(a), beta});
    }
    p.v_rep = std::move(v);
    return p;
}

/// Polar of a set containing the origin: {phi : <phi, v> <= 1 on vertices,
/// <phi, r> <= 0 on rays}.
inline Polyhedron polar(const Polyhedron& region) {
    if (!region.v_rep) throw input_error("polar: V-representation required");
    if (!member(region, zero_vec(region.dim)))
        throw domain_error("polar: region does not contain the origin");
    std::vector<Inequality> rows;
    for (const auto& v : region.v_rep->vertices) rows.push_back({v, Rational(1)});
    for (const auto& r : region.v_rep->rays) rows.push_back({r, Rational(0)});
    return from_h(region.dim, std::move(rows));
}

/// Recession cone {r : <a_i, r> <= 0 for every inequality}.
inline Polyhedron recession_cone(const Polyhedron& region) {
    std::vector<Inequality> rows;
    for (const auto& ineq : region.h_rep) rows.push_back({ineq.normal, Rational(0)});
    return from_h(region.dim, std::move(rows));
}

/// Exact subset test; needs the V-representation of the inner polyhedron.
inline bool contains(const Polyhedron& outer, const Polyhedron& inner) {
    if (!inner.v_rep) throw input_error("contains: inner V-representation required");
    for (const auto& v : inner.v_rep->vertices)
        if (!member(outer, v)) return false;
    for (const auto& r : inner.v_rep->rays)
        for (const auto& ineq : outer.h_rep)
            if (dot(ineq.normal, r) > 0) return false;
    return true;
}

inline bool is_empty(const Polyhedron& region) {
    QMat a;
    QVec b;
    for (const auto& ineq : region.h_rep) {
        a.push_back(ineq.normal);
        b.push_back(ineq.offset);
    }
    return !lp_feasible_point(a, b, region.dim).has_value();
}

} // namespace asymlin
