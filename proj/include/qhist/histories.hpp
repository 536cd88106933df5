#pragma once

#include <cstddef>
#include <memory>
#include <variant>
#include <vector>

#include "qhist/contexts.hpp"
#include "qhist/index_set.hpp"
#include "qhist/linalg.hpp"

namespace qhist {

struct TimedContext {
    Time time;
    Context context;
};

/// Π_{p,0} = U(t₀,t_i) Π_p U(t_i,t₀). Returns p itself for trivial dynamics or
/// t_i = t₀. Throws NumericalError if conjugation changes the rank.
Projector heisenberg_translate(const Projector& p, const Propagator& u, Time t_i, Time t0,
                               double tol = kDefaultTolerance);

/// Translates every atom of a timed context to t₀ and re-validates the
/// decomposition (unitary conjugation preserves it up to roundoff).
Context heisenberg_context(const TimedContext& tc, const Propagator& u, Time t0,
                           double tol = kDefaultTolerance);

/// Common checks for multi-time constructions: at least one context, strictly
/// increasing times, dimensions agreeing with the propagator.
void require_history_layout(const std::vector<TimedContext>& tcs, const Propagator& u);

/// One failed commutation [Π_{i,0}^{k_i}, Π_{j,0}^{k_j}] ≠ 0 (positions and
/// atom labels are zero-based).
struct NonCommutingPair {
    std::size_t context_a;
    std::size_t atom_a;
    std::size_t context_b;
    std::size_t atom_b;
    double norm;
    /// Commutator below 100× the threshold: numerically borderline.
    bool marginal;
};

/// The substantive "no generalized context exists" answer. Lists every
/// non-commuting pair of Heisenberg atoms in (i, k_i, j, k_j) order.
struct IncompatibleVerdict {
    std::vector<NonCommutingPair> pairs;
    double max_norm() const noexcept;
};

class GeneralizedProperty;
class CompatibilityResult;

/// Compatible timed contexts together with their generalized atoms
/// Π₀^k = Π_{1,0}^{k₁} ⋯ Π_{n,0}^{k_n}, indexed by k ∈ σ₁×…×σ_n. Atoms of rank
/// zero stay in the index space and are flagged. Cheap to copy.
class GeneralizedContext {
public:
    Time reference_time() const noexcept;
    const std::vector<TimedContext>& timed_contexts() const noexcept;
    /// Per-time contexts translated to the reference time.
    const std::vector<Context>& heisenberg_contexts() const noexcept;
    const MultiIndexSpace& space() const noexcept;
    std::size_t dim() const noexcept;

    /// Flat (lexicographic) access; see MultiIndexSpace.
    const std::vector<Projector>& atoms() const noexcept;
    const Projector& atom(const std::vector<std::size_t>& k) const;
    bool is_zero_atom(std::size_t flat) const;

    bool same_as(const GeneralizedContext& other) const noexcept { return impl_ == other.impl_; }

    GeneralizedProperty property(const IndexSet& labels) const;
    GeneralizedProperty full() const;
    GeneralizedProperty empty() const;
    GeneralizedProperty history(const std::vector<std::size_t>& k) const;
    /// "Property with labels `labels` at time t_position", lifted to the
    /// generalized lattice (all other positions unconstrained).
    GeneralizedProperty at(std::size_t position, const IndexSet& labels) const;

private:
    struct Impl;
    explicit GeneralizedContext(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    friend CompatibilityResult build_generalized_context(Time, std::vector<TimedContext>,
                                                         const Propagator&, double);

    std::shared_ptr<const Impl> impl_;
};

class CompatibilityResult {
public:
    explicit CompatibilityResult(GeneralizedContext gc) : value_(std::move(gc)) {}
    explicit CompatibilityResult(IncompatibleVerdict v) : value_(std::move(v)) {}

    bool compatible() const noexcept { return value_.index() == 0; }
    /// Throw std::bad_variant_access when called on the wrong alternative.
    const GeneralizedContext& context() const { return std::get<GeneralizedContext>(value_); }
    const IncompatibleVerdict& verdict() const { return std::get<IncompatibleVerdict>(value_); }

private:
    std::variant<GeneralizedContext, IncompatibleVerdict> value_;
};

/// Translates each context to t0, checks pairwise commutation of atoms from
/// different times, and on success builds and verifies the generalized atoms.
/// Consumes no state: the verdict depends on contexts, dynamics and times only.
/// Throws InputError for invalid layouts; incompatibility is returned, not thrown.
CompatibilityResult build_generalized_context(Time t0, std::vector<TimedContext> tcs,
                                              const Propagator& u,
                                              double tol = kDefaultTolerance);

/// A subset σ_p ⊆ σ₁×…×σ_n of generalized atoms.
class GeneralizedProperty {
public:
    GeneralizedProperty(GeneralizedContext gc, IndexSet labels);

    const GeneralizedContext& context() const noexcept { return gc_; }
    const IndexSet& labels() const noexcept { return labels_; }
    Projector projector() const;

    bool operator==(const GeneralizedProperty& other) const {
        return gc_.same_as(other.gc_) && labels_ == other.labels_;
    }

private:
    GeneralizedContext gc_;
    IndexSet labels_;
};

GeneralizedProperty complement(const GeneralizedProperty& p);
GeneralizedProperty meet(const GeneralizedProperty& p, const GeneralizedProperty& q);
GeneralizedProperty join(const GeneralizedProperty& p, const GeneralizedProperty& q);
bool leq(const GeneralizedProperty& p, const GeneralizedProperty& q);

/// Pr(p) = Tr(ρ₀Π_p), accumulated atom by atom. Throws DimensionMismatch.
double generalized_probability(const State& rho0, const GeneralizedProperty& p);

/// Pr(a ∧ b) / Pr(b). Throws UndefinedProbability (zero_conditioning) when
/// Pr(b) ≤ tol, InputError when a and b come from different generalized contexts.
double generalized_conditional(const State& rho0, const GeneralizedProperty& a,
                               const GeneralizedProperty& b, double tol = kDefaultTolerance);

}  // namespace qhist
