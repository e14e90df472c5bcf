#pragma once

#include <stdexcept>
#include <string>

namespace sparareal {

// Invalid arguments and index errors use std::invalid_argument and
// std::out_of_range directly; the types below cover solver failures.

/// A propagator produced a non-finite state.
class OverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The drift-implicit Newton iteration failed to converge.
class NonlinearSolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A theta-scheme denominator vanished.
class SingularSchemeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The mean-square bound is not defined for the given coefficients.
class BoundUndefinedError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Requested functionality is not available for this model or grid.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace sparareal
