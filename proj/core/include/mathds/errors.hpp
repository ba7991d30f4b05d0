#pragma once

#include <stdexcept>
#include <string>

namespace mathds {

// Error taxonomy. The CLI maps each class onto a distinct exit code.

/// Input outside an operation's mathematical domain (bad n, mismatched
/// partitions, degenerate samples, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or inconsistent input data (files, rows, labels).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A request that exceeds a configured size/time budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative method failed to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant was violated. Always indicates a bug, never bad
/// input.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace mathds
