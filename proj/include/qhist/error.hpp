#pragma once

#include <stdexcept>
#include <string>

namespace qhist {

/// Rejected input: malformed documents, invalid matrices, violated preconditions.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public InputError {
public:
    DimensionMismatch(std::size_t expected, std::size_t actual, const std::string& what)
        : InputError(what + ": dimension mismatch (expected " + std::to_string(expected) +
                     ", got " + std::to_string(actual) + ")") {}
};

/// A numeric routine failed to produce a trustworthy result (e.g. eigensolver
/// did not converge). Distinct from InputError so callers can tell the two apart.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class UndefinedReason {
    non_commuting,
    zero_conditioning,
    inconsistent_family,
};

const char* to_string(UndefinedReason reason);

/// A probability the formalism refuses to assign. This is an answer about the
/// physics, not a malfunction: the CLI reports it and exits 0.
class UndefinedProbability : public std::runtime_error {
public:
    UndefinedProbability(UndefinedReason reason, double residual, const std::string& what)
        : std::runtime_error(what), reason_(reason), residual_(residual) {}

    UndefinedReason reason() const noexcept { return reason_; }
    /// Commutator norm, conditioning weight, or worst off-diagonal, by reason.
    double residual() const noexcept { return residual_; }

private:
    UndefinedReason reason_;
    double residual_;
};

}  // namespace qhist
