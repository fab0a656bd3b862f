#include <catch2/catch_amalgamated.hpp>

#include "asymlin/polyhedron.hpp"
#include "asymlin/rng.hpp"

using namespace asymlin;

namespace {

Polyhedron half_line_dim1() {
    // { a <= 1 }
    return from_h(1, {{{Rational(1)}, Rational(1)}});
}

Polyhedron square2() {
    // [-1,1]^2
    return from_h(2, {{{Rational(1), Rational(0)}, Rational(1)},
                      {{Rational(-1), Rational(0)}, Rational(1)},
                      {{Rational(0), Rational(1)}, Rational(1)},
                      {{Rational(0), Rational(-1)}, Rational(1)}});
}

} // namespace

TEST_CASE("maximize over a half line") {
    auto out = solve_lp({Rational(1)}, half_line_dim1());
    REQUIRE(out.status == LpStatus::Optimal);
    REQUIRE(*out.optimum == 1);
    REQUIRE((*out.witness)[0] == 1);
}

TEST_CASE("objective unbounded below the constraint") {
    auto out = solve_lp({Rational(-1)}, half_line_dim1());
    REQUIRE(out.status == LpStatus::Unbounded);
    REQUIRE(out.witness.has_value());
    const QVec& ray = *out.witness;
    REQUIRE(ray[0] == -1);
}

TEST_CASE("maximize x+y over the square") {
    // Oracle: enumerate the four corners by hand.
    QVec c{Rational(1), Rational(1)};
    Rational best(-1000);
    for (int sx : {-1, 1})
        for (int sy : {-1, 1}) best = std::max(best, Rational(sx) + Rational(sy));
    REQUIRE(best == 2);

    auto out = solve_lp(c, square2());
    REQUIRE(out.status == LpStatus::Optimal);
    REQUIRE(*out.optimum == best);
    REQUIRE(*out.witness == QVec{Rational(1), Rational(1)});
}

TEST_CASE("infeasible region is reported") {
    auto p = from_h(1, {{{Rational(1)}, Rational(-1)}, {{Rational(-1)}, Rational(-1)}});
    auto out = solve_lp({Rational(1)}, p);
    REQUIRE(out.status == LpStatus::Infeasible);
    REQUIRE(is_empty(p));
}

TEST_CASE("dimension mismatch rejected") {
    REQUIRE_THROWS_AS(solve_lp({Rational(1), Rational(2)}, half_line_dim1()), input_error);
}

TEST_CASE("no constraints: zero objective optimal, nonzero unbounded") {
    auto whole = from_h(2, {});
    auto z = solve_lp(zero_vec(2), whole);
    REQUIRE(z.status == LpStatus::Optimal);
    REQUIRE(*z.optimum == 0);
    auto u = solve_lp({Rational(3), Rational(-1)}, whole);
    REQUIRE(u.status == LpStatus::Unbounded);
    REQUIRE(dot({Rational(3), Rational(-1)}, *u.witness) > 0);
}

TEST_CASE("strong duality certificate on seeded random instances") {
    Rng rng(2024);
    int optimal_seen = 0;
    for (int inst = 0; inst < 80; ++inst) {
        int n = 1 + static_cast<int>(rng.below(3));
        int m = 1 + static_cast<int>(rng.below(6));
        QMat a;
        QVec b;
        for (int i = 0; i < m; ++i) {
            QVec row(n);
            for (int j = 0; j < n; ++j) row[j] = rng.small_rational(4, 3);
            a.push_back(row);
            b.push_back(rng.small_rational(5, 2));
        }
        QVec c(n);
        for (int j = 0; j < n; ++j) c[j] = rng.small_rational(4, 3);

        auto out = lp_maximize(c, a, b);
        if (out.status == LpStatus::Unbounded) {
            const QVec& r = *out.witness;
            REQUIRE(dot(c, r) > 0);
            for (int i = 0; i < m; ++i) REQUIRE(dot(a[i], r) <= 0);
            continue;
        }
        if (out.status == LpStatus::Infeasible) continue;
        ++optimal_seen;
        const QVec& x = *out.witness;
        for (int i = 0; i < m; ++i) REQUIRE(dot(a[i], x) <= b[i]);
        REQUIRE(dot(c, x) == *out.optimum);

        // dual certificate: y >= 0, y^T A = c, y^T b = optimum, exactly
        const QVec& y = *out.dual;
        REQUIRE(y.size() == static_cast<std::size_t>(m));
        Rational yb = 0;
        for (int i = 0; i < m; ++i) {
            REQUIRE(y[i] >= 0);
            yb += y[i] * b[i];
        }
        for (int j = 0; j < n; ++j) {
            Rational yaj = 0;
            for (int i = 0; i < m; ++i) yaj += y[i] * a[i][j];
            REQUIRE(yaj == c[j]);
        }
        REQUIRE(yb == *out.optimum);
    }
    REQUIRE(optimal_seen > 10);
}

TEST_CASE("phase one handles negative right-hand sides") {
    // { x >= 2, x <= 5 } maximize -x -> optimum -2 at x = 2
    auto p = from_h(1, {{{Rational(-1)}, Rational(-2)}, {{Rational(1)}, Rational(5)}});
    auto out = solve_lp({Rational(-1)}, p);
    REQUIRE(out.status == LpStatus::Optimal);
    REQUIRE(*out.optimum == -2);
    REQUIRE((*out.witness)[0] == 2);
}
