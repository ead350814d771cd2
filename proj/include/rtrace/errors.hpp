#pragma once

#include <stdexcept>
#include <string>

namespace rtrace {

/// Precondition violation: unsupported l, k = 0, r = 0 with a centrifugal
/// term, and similar argument-domain problems.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Function evaluated at a pole of its closed form (e.g. Riccati-Hankel at z = 0).
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite value produced during the Numerov ratio recursion.
class NumericOverflowError : public std::runtime_error {
public:
    NumericOverflowError(const std::string& msg, int index)
        : std::runtime_error(msg + " (grid index " + std::to_string(index) + ")"),
          grid_index(index) {}
    int grid_index;
};

/// S = 1 within tolerance: the regularized function F_l = k^{2l+1}/(S-1)
/// has no meaningful value.
class FUndefinedError : public std::runtime_error {
public:
    explicit FUndefinedError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Residual-map evaluation failed inside the continuation engine.  `column`
/// is the finite-difference column being formed when the failure happened,
/// or -1 for a plain evaluation.
class EvaluationError : public std::runtime_error {
public:
    explicit EvaluationError(const std::string& msg, int column_ = -1)
        : std::runtime_error(column_ < 0 ? msg
                                         : msg + " (jacobian column " +
                                               std::to_string(column_) + ")"),
          column(column_) {}
    int column;
};

/// Bordered tangent system is numerically singular (expected exactly at
/// bifurcation points).
class SingularSystemError : public std::runtime_error {
public:
    explicit SingularSystemError(const std::string& msg) : std::runtime_error(msg) {}
};

/// solve_abe: nullspace dimension is not 2, or the bifurcation equation has
/// no real roots.
class BifurcationError : public std::runtime_error {
public:
    explicit BifurcationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Configuration / study-definition problems (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File-system problems while writing or reading study data (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rtrace
