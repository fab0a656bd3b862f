#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>
#include <vector>

#include "asymlin/errors.hpp"

namespace asymlin {

// Exact arithmetic carrier. cpp_rational keeps values in lowest terms with a
// positive denominator, which is exactly the representation invariant we need.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Build num/den with sign normalization. Throws on zero denominator.
inline Rational make_rational(const Integer& num, const Integer& den) {
    if (den == 0) throw input_error("rational with zero denominator");
    return Rational(num) / Rational(den);
}

inline std::string to_string(const Rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) {
        s += "/";
        s += denominator(q).str();
    }
    return s;
}

/// floor(q) as an integer.
inline Integer rational_floor(const Rational& q) {
    Integer n = numerator(q), d = denominator(q);
    Integer t = n / d;
    if (n < 0 && t * d != n) --t;
    return t;
}

inline Integer rational_ceil(const Rational& q) { return -rational_floor(-q); }

/// A nonnegative rational extended with a single distinguished infinity.
/// Infinity is a first-class value here, never an overflow sentinel.
class ExtRational {
  public:
    ExtRational() : finite_(true), value_(0) {}
    ExtRational(const Rational& v) : finite_(true), value_(v) {}
    ExtRational(int v) : finite_(true), value_(v) {}

    static ExtRational infinity() {
        ExtRational e;
        e.finite_ = false;
        e.value_ = 0;
        return e;
    }

    bool is_finite() const { return finite_; }
    bool is_infinite() const { return !finite_; }

    const Rational& value() const {
        if (!finite_) throw domain_error("value() on infinite ExtRational");
        return value_;
    }

    friend bool operator==(const ExtRational& a, const ExtRational& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.value_ == b.value_;
    }
    friend bool operator!=(const ExtRational& a, const ExtRational& b) { return !(a == b); }
    friend bool operator<(const ExtRational& a, const ExtRational& b) {
        if (!a.finite_) return false;
        if (!b.finite_) return true;
        return a.value_ < b.value_;
    }
    friend bool operator<=(const ExtRational& a, const ExtRational& b) { return a < b || a == b; }
    friend bool operator>(const ExtRational& a, const ExtRational& b) { return b < a; }
    friend bool operator>=(const ExtRational& a, const ExtRational& b) { return b <= a; }

    friend ExtRational operator+(const ExtRational& a, const ExtRational& b) {
        if (!a.finite_ || !b.finite_) return infinity();
        return ExtRational(a.value_ + b.value_);
    }
    /// Scale by a nonnegative rational; t * inf = inf for t > 0, 0 * inf = 0.
    friend ExtRational scale(const Rational& t, const ExtRational& a) {
        if (t < 0) throw input_error("scale by negative factor");
        if (t == 0) return ExtRational(Rational(0));
        if (!a.finite_) return infinity();
        return ExtRational(t * a.value_);
    }
    friend ExtRational max(const ExtRational& a, const ExtRational& b) { return a < b ? b : a; }

    std::string str() const { return finite_ ? asymlin::to_string(value_) : std::string("inf"); }

  private:
    bool finite_;
    Rational value_;
};

inline std::string to_string(const ExtRational& e) { return e.str(); }

/// Parse "n" or "n/d" (optional leading '-'). Returns nullopt on malformed
/// text or zero denominator.
inline std::optional<Rational> parse_rational(const std::string& tok) {
    if (tok.empty()) return std::nullopt;
    auto digits_ok = [](const std::string& s, std::size_t from) {
        if (from >= s.size()) return false;
        for (std::size_t i = from; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    auto slash = tok.find('/');
    std::string num = slash == std::string::npos ? tok : tok.substr(0, slash);
    std::string den = slash == std::string::npos ? std::string("1") : tok.substr(slash + 1);
    std::size_t noff = (!num.empty() && num[0] == '-') ? 1 : 0;
    if (!digits_ok(num, noff) || !digits_ok(den, 0)) return std::nullopt;
    Integer n(num), d(den);
    if (d == 0) return std::nullopt;
    return Rational(n) / Rational(d);
}

} // namespace asymlin
