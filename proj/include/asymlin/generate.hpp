#pragma once

#include <string>
#include <vector>

#include "asymlin/instance.hpp"

namespace asymlin {

enum class Profile { SymmetricBounded, AsymmetricUnbounded, Mixed };

inline Profile profile_from_string(const std::string& s) {
    if (s == "symmetric-bounded") return Profile::SymmetricBounded;
    if (s == "asymmetric-unbounded") return Profile::AsymmetricUnbounded;
    if (s == "mixed") return Profile::Mixed;
    throw input_error("unknown profile '" + s +
                      "' (symmetric-bounded, asymmetric-unbounded, mixed)");
}

/// Random asymmetric norm passing all construction invariants. Unbounded
/// norms are a spanning set plus the zero functional, so the norm vanishes
/// on a nontrivial cone and the unit ball has recession rays. Bounded norms
/// are sign-symmetric generator pairs.
inline AsymNorm gen_norm(Rng& rng, int dim, bool unbounded, int max_gens = 8) {
    for (;;) {
        std::vector<QVec> gens;
        if (unbounded) {
            for (int i = 0; i < dim; ++i) gens.push_back(rng.small_vector(dim, 2, 1));
            QMat m(gens.begin(), gens.end());
            if (rank(m) != static_cast<std::size_t>(dim)) continue;
            gens.push_back(zero_vec(dim));
        } else {
            int pairs = std::max(dim, 1 + static_cast<int>(rng.below(max_gens / 2)));
            pairs = std::min(pairs, max_gens / 2);
            for (int i = 0; i < pairs; ++i) {
                QVec g = rng.small_vector(dim, 2, 1);
                if (is_zero(g)) g[static_cast<std::size_t>(rng.below(dim))] = 1;
                gens.push_back(g);
                gens.push_back(neg(g));
            }
        }
        try {
            return make_asym_norm(dim, gens);
        } catch (const input_error&) {
        }
    }
}

inline bool profile_unbounded(Rng& rng, Profile p) {
    switch (p) {
        case Profile::SymmetricBounded: return false;
        case Profile::AsymmetricUnbounded: return true;
        default: return rng.flip();
    }
}

inline LinearOp gen_linear_op(Rng& rng, int sdim, int tdim, Profile profile) {
    AsymNorm src = gen_norm(rng, sdim, profile_unbounded(rng, profile));
    AsymNorm tgt = gen_norm(rng, tdim, profile_unbounded(rng, profile));
    QMat m(tdim);
    for (auto& row : m) row = rng.small_vector(sdim, 2, 1);
    return make_linear_op(std::move(m), std::move(src), std::move(tgt));
}

/// Random bilinear operator; entry_scale shrinks the tensor so grid-based
/// constructions stay small at the acceptance epsilons.
inline BilinearOp gen_bilinear_op(Rng& rng, int d1, int d2, int dz, Profile profile,
                                  const Rational& entry_scale) {
    AsymNorm s1 = gen_norm(rng, d1, profile_unbounded(rng, profile));
    AsymNorm s2 = gen_norm(rng, d2, profile_unbounded(rng, profile));
    AsymNorm tg = gen_norm(rng, dz, profile_unbounded(rng, profile));
    QTensor t(dz, QMat(d1, QVec(d2)));
    for (auto& slice : t)
        for (auto& row : slice)
            for (auto& v : row) v = rng.small_rational(2, 2) * entry_scale;
    return make_bilinear_op(std::move(t), std::move(s1), std::move(s2), std::move(tg));
}

/// Deterministic corpus of instance files for a seed and profile. Every
/// generated norm passes the construction invariants; unbounded profiles
/// guarantee a recession ray in the first space of every instance.
inline std::vector<InstanceFile> generate_instances(std::uint64_t seed, Profile profile,
                                                    int count) {
    Rng rng(seed);
    std::vector<InstanceFile> out;
    for (int n = 0; n < count; ++n) {
        InstanceFile f;
        int dim = 1 + static_cast<int>(rng.below(3));
        bool unbounded = profile == Profile::AsymmetricUnbounded ||
                         (profile == Profile::Mixed && rng.flip());
        f.spaces.emplace("P", gen_norm(rng, dim, unbounded));
        f.spaces.emplace("Q", gen_norm(rng, dim, profile_unbounded(rng, profile)));
        InstanceFile::OpDef op;
        op.source = "P";
        op.target = "Q";
        for (int i = 0; i < dim; ++i) op.matrix.push_back(rng.small_vector(dim, 2, 1));
        f.ops.emplace("A", std::move(op));

        QVec x = rng.small_vector(dim, 3, 2);
        InstanceFile::Directive d0{"eval", {"P", serialize_vector(x)}, std::nullopt};
        d0.expect = to_string(eval_norm(f.spaces.at("P"), x));
        f.directives.push_back(std::move(d0));
        f.directives.push_back({"opnorm", {"A"}, std::nullopt});
        out.push_back(std::move(f));
    }
    return out;
}

} // namespace asymlin
