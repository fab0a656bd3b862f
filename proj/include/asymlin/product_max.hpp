#pragma once

#include <cstddef>
#include <string>

#include "asymlin/polyhedron.hpp"

namespace asymlin {

/// Where a product maximization attains its value (vertex pair) or along
/// which generator combination it escapes to infinity.
struct ProductMaxWitness {
    enum class Kind { VertexPair, RayVertex, VertexRay, RayRay };
    Kind kind = Kind::VertexPair;
    std::size_t i = 0;
    std::size_t j = 0;
};

struct ProductMaxResult {
    ExtRational value;
    ProductMaxWitness witness;
};

/// Exact sup of the bilinear function (x, y) -> x^T f y over a product of
/// polyhedra given by generators.
///
/// For fixed y the map is linear in x and conversely, so a finite sup is
/// attained at a vertex pair. The sup is infinite exactly when some
/// (ray, vertex), (vertex, ray) or (ray, ray) combination has positive
/// value: such a combination grows linearly (or quadratically) in the ray
/// scale, and if all of them are nonpositive every generator expansion is
/// dominated by the vertex-pair maximum.
inline ProductMaxResult max_bilinear_over_product(const QMat& f, const VRep& a, const VRep& b) {
    if (a.vertices.empty() || b.vertices.empty())
        throw input_error("max_bilinear_over_product: empty factor");
    auto value = [&](const QVec& x, const QVec& y) {
        if (x.size() != f.size() || (!f.empty() && y.size() != f[0].size()))
            throw input_error("max_bilinear_over_product: dimension mismatch");
        Rational s = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0) continue;
            for (std::size_t j = 0; j < y.size(); ++j) s += x[i] * f[i][j] * y[j];
        }
        return s;
    };

    ProductMaxResult out;
    for (std::size_t i = 0; i < a.rays.size(); ++i)
        for (std::size_t j = 0; j < b.vertices.size(); ++j)
            if (value(a.rays[i], b.vertices[j]) > 0) {
                out.value = ExtRational::infinity();
                out.witness = {ProductMaxWitness::Kind::RayVertex, i, j};
                return out;
            }
    for (std::size_t i = 0; i < a.vertices.size(); ++i)
        for (std::size_t j = 0; j < b.rays.size(); ++j)
            if (value(a.vertices[i], b.rays[j]) > 0) {
                out.value = ExtRational::infinity();
                out.witness = {ProductMaxWitness::Kind::VertexRay, i, j};
                return out;
            }
    for (std::size_t i = 0; i < a.rays.size(); ++i)
        for (std::size_t j = 0; j < b.rays.size(); ++j)
            if (value(a.rays[i], b.rays[j]) > 0) {
                out.value = ExtRational::infinity();
                out.witness = {ProductMaxWitness::Kind::RayRay, i, j};
                return out;
            }

    Rational best;
    bool first = true;
    for (std::size_t i = 0; i < a.vertices.size(); ++i) {
        for (std::size_t j = 0; j < b.vertices.size(); ++j) {
            Rational v = value(a.vertices[i], b.vertices[j]);
            if (first || v > best) {
                best = v;
                out.witness = {ProductMaxWitness::Kind::VertexPair, i, j};
                first = false;
            }
        }
    }
    out.value = ExtRational(best);
    return out;
}

} // namespace asymlin
