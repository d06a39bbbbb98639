#pragma once

#include <stdexcept>
#include <string>

namespace ombb {

/// Rejected input: caller passed values violating an operation's contract
/// (length mismatch, out-of-range value, malformed data).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An enumeration or search would exceed the configured desk-scale budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid experiment/run configuration (parameter combination rejected
/// before any query is issued).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A structural precondition that honest callers always satisfy was violated
/// (strict mode converts the probabilistic fallback branches into faults).
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

/// An internal invariant failed; indicates a bug, not bad input.
struct InvariantError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace ombb
