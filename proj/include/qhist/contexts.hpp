#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include "qhist/error.hpp"
#include "qhist/index_set.hpp"
#include "qhist/linalg.hpp"

namespace qhist {

/// Density operator: Hermitian, unit trace, positive semidefinite.
class State {
public:
    /// Throws InputError naming the violated condition and its residual.
    static State from_density(CMatrix rho, double tol = kDefaultTolerance);
    /// |ψ⟩⟨ψ|; ‖ψ‖ must be 1 within tol.
    static State from_pure(const CVector& psi, double tol = kDefaultTolerance);
    static State maximally_mixed(std::size_t dim);

    const CMatrix& rho() const noexcept { return rho_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(rho_.rows()); }

private:
    explicit State(CMatrix rho) : rho_(std::move(rho)) {}
    friend State condition_on(const State&, const Projector&, double);

    CMatrix rho_;
};

/// What went wrong in validate_context; `first`/`second` are atom indices
/// (second is unused for single-atom failures).
struct ContextViolation {
    enum class Kind { empty, not_projector, dimension, zero_atom, orthogonality, completeness };
    Kind kind;
    std::size_t first = 0;
    std::size_t second = 0;
    double residual = 0.0;
};

const char* to_string(ContextViolation::Kind kind);

class ContextError : public InputError {
public:
    ContextError(ContextViolation violation, const std::string& what)
        : InputError(what), violation_(violation) {}
    const ContextViolation& violation() const noexcept { return violation_; }

private:
    ContextViolation violation_;
};

class Property;

/// A projective decomposition of the identity: the atoms of one context.
/// Cheap to copy; copies share the same immutable atoms and compare as the
/// same context.
class Context {
public:
    std::size_t dim() const noexcept;
    std::size_t size() const noexcept;
    const std::vector<Projector>& atoms() const noexcept;
    const Projector& atom(std::size_t k) const;
    /// Tolerance the atoms were validated with.
    double tolerance() const noexcept;

    bool same_as(const Context& other) const noexcept { return impl_ == other.impl_; }

    /// Throws InputError for labels outside the context.
    Property property(const IndexSet& labels) const;
    Property property(std::initializer_list<std::size_t> labels) const;
    Property full() const;
    Property empty() const;

private:
    struct Impl;
    explicit Context(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    friend Context validate_context(std::vector<Projector> atoms, double tol);

    std::shared_ptr<const Impl> impl_;
};

/// Checks Σ_k Π^k = I and Π^k Π^k' = δ_kk' Π^k within tol, every atom nonzero.
/// Throws ContextError carrying the offending index pair and residual.
Context validate_context(std::vector<Projector> atoms, double tol = kDefaultTolerance);
/// Same, starting from raw matrices (each must first pass as a projector).
Context validate_context(const std::vector<CMatrix>& atoms, double tol = kDefaultTolerance);

/// An element of a context's lattice: a subset of its atom labels.
class Property {
public:
    Property(Context context, IndexSet labels);

    const Context& context() const noexcept { return context_; }
    const IndexSet& labels() const noexcept { return labels_; }

    /// Σ_{k ∈ labels} Π^k; the zero projector for the empty set.
    Projector projector() const;

    bool operator==(const Property& other) const {
        return context_.same_as(other.context_) && labels_ == other.labels_;
    }

private:
    Context context_;
    IndexSet labels_;
};

Property complement(const Property& p);
/// Lattice operations; throw InputError when the operands live in different contexts.
Property meet(const Property& p, const Property& q);
Property join(const Property& p, const Property& q);
bool leq(const Property& p, const Property& q);

/// Tr(ρΠ), unclamped. Throws DimensionMismatch.
double born_probability(const State& rho, const Projector& p);
double born_probability(const State& rho, const Property& p);

/// ρ* = Π_r ρ Π_r / Tr(Π_r ρ Π_r). Throws UndefinedProbability (zero_conditioning)
/// when Tr(ρΠ_r) ≤ tol.
State condition_on(const State& rho, const Projector& r, double tol = kDefaultTolerance);

/// Pr_ρ(p | r) = Tr(ρ* Π_p). Throws UndefinedProbability when p and r do not
/// commute (the conditional has no meaning) or when Tr(ρΠ_r) ≤ tol.
double conditional_probability(const State& rho, const Projector& p, const Projector& r,
                               double tol = kDefaultTolerance);

/// Range(p) ⊆ Range(I − q). Cross-checked against Π_pΠ_q = Π_qΠ_p = 0; a
/// disagreement between the two tests throws NumericalError.
bool is_contrary(const Projector& p, const Projector& q, double tol = kDefaultTolerance);

/// Clamp to [0, 1] for display.
double clamp_probability(double p) noexcept;

}  // namespace qhist
