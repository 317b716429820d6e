#pragma once

#include <stdexcept>
#include <string>

namespace lapse {

/// Argument outside the mathematical domain of an evaluator (negative
/// duration, age beyond the table ceiling).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A value object or configuration violates one of its invariants.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An integration produced a non-finite value or a degenerate linear solve.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested transform is not defined for the given model kind.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace lapse
