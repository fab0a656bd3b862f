#pragma once

#include <stdexcept>
#include <string>

namespace asymlin {

/// Malformed or inconsistent caller input (dimension mismatch, bad argument,
/// unknown name, signature mismatch).
struct input_error : std::invalid_argument {
    explicit input_error(const std::string& what) : std::invalid_argument(what) {}
};

/// A configured size cap would be exceeded (dimension cap, generator cap,
/// enumeration blowup guards).
struct capacity_error : std::length_error {
    explicit capacity_error(const std::string& what) : std::length_error(what) {}
};

/// The input is well formed but outside the mathematical domain of the
/// operation (empty region, origin missing, zero vector where a nonzero one
/// is required).
struct domain_error : std::domain_error {
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

/// A stated precondition of an operation does not hold (e.g. an operator is
/// not precompact, a form violates a ball constraint).
struct precondition_error : std::runtime_error {
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

/// Global size limits. Enumeration of vertices is exponential in the worst
/// case, so dimensions and generator counts are capped.
struct Caps {
    int dim_cap = 6;
    int generator_cap = 32;
};

} // namespace asymlin
