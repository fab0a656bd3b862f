#pragma once

#include <cstdint>
#include <random>

#include "asymlin/linalg.hpp"

namespace asymlin {

/// Deterministic seeded generator. mt19937_64 has a standard-fixed output
/// sequence; bounded draws are done by rejection here because the standard
/// distributions are implementation-defined and would break byte-identical
/// report reproducibility across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw input_error("Rng::below(0)");
        std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
        for (;;) {
            std::uint64_t v = eng_();
            if (v < limit) return v % n;
        }
    }

    // uniform integer in [lo, hi]
    long long int_in(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool flip() { return below(2) == 1; }

    /// Random rational with |numerator| <= num_max and 1 <= denominator <= den_max.
    Rational small_rational(long long num_max, long long den_max) {
        Integer n(int_in(-num_max, num_max));
        Integer d(int_in(1, den_max));
        return Rational(n) / Rational(d);
    }

    Rational positive_rational(long long num_max, long long den_max) {
        Integer n(int_in(1, num_max));
        Integer d(int_in(1, den_max));
        return Rational(n) / Rational(d);
    }

    QVec small_vector(std::size_t dim, long long num_max, long long den_max) {
        QVec v(dim);
        for (auto& q : v) q = small_rational(num_max, den_max);
        return v;
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace asymlin
