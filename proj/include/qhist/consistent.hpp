#pragma once

#include <cstddef>
#include <vector>

#include "qhist/contexts.hpp"
#include "qhist/histories.hpp"
#include "qhist/index_set.hpp"
#include "qhist/linalg.hpp"

namespace qhist {

/// n timed contexts with their Heisenberg atoms. Unlike GeneralizedContext no
/// commutation is required; whether probabilities exist depends on the state.
class HistoryFamily {
public:
    /// Throws InputError for an empty list, unordered times or dimension mismatch.
    HistoryFamily(Time t0, std::vector<TimedContext> tcs, const Propagator& u,
                  double tol = kDefaultTolerance);

    Time reference_time() const noexcept { return t0_; }
    const std::vector<TimedContext>& timed_contexts() const noexcept { return timed_; }
    const std::vector<Context>& heisenberg_contexts() const noexcept { return heisenberg_; }
    const MultiIndexSpace& space() const noexcept { return space_; }
    std::size_t dim() const noexcept { return heisenberg_.front().dim(); }

    /// C_α = Π_{n,0}^{α_n} ⋯ Π_{1,0}^{α_1}. Throws InputError for a bad index.
    CMatrix class_operator(const std::vector<std::size_t>& alpha) const;
    CMatrix class_operator(std::size_t flat) const;

    /// Histories with a given label set at time position i (all others free).
    IndexSet at(std::size_t position, const IndexSet& labels) const {
        return space_.cylinder(position, labels);
    }

private:
    Time t0_;
    std::vector<TimedContext> timed_;
    std::vector<Context> heisenberg_;
    MultiIndexSpace space_;
};

/// D(α, β) = Tr(C_α ρ₀ C_β†) over flat history indices. Only the upper
/// triangle is computed; the lower is its conjugate, so D is exactly Hermitian.
class DecoherenceMatrix {
public:
    DecoherenceMatrix(MultiIndexSpace space, CMatrix values)
        : space_(std::move(space)), values_(std::move(values)) {}

    const MultiIndexSpace& space() const noexcept { return space_; }
    const CMatrix& values() const noexcept { return values_; }
    Complex operator()(std::size_t alpha, std::size_t beta) const { return values_(alpha, beta); }
    double diagonal(std::size_t alpha) const { return values_(alpha, alpha).real(); }
    Complex total() const { return values_.sum(); }

private:
    MultiIndexSpace space_;
    CMatrix values_;
};

DecoherenceMatrix decoherence_functional(const HistoryFamily& family, const State& rho0);

struct ConsistencyReport {
    bool consistent;
    double max_off_diagonal;
    /// Worst offending pair (flat indices); equal when there are no pairs.
    std::size_t worst_alpha;
    std::size_t worst_beta;
    double tolerance;
};

/// Medium decoherence: max_{α≠β} |D(α,β)| ≤ consistency_tol.
ConsistencyReport check_consistency(const DecoherenceMatrix& d, double consistency_tol);
ConsistencyReport check_consistency(const HistoryFamily& family, const State& rho0,
                                    double consistency_tol = kDefaultTolerance);
inline bool is_consistent(const HistoryFamily& family, const State& rho0,
                          double consistency_tol = kDefaultTolerance) {
    return check_consistency(family, rho0, consistency_tol).consistent;
}

/// D(α, α); throws UndefinedProbability (inconsistent_family) when the family
/// fails the consistency test for this state.
double history_probability(const HistoryFamily& family, const State& rho0,
                           const std::vector<std::size_t>& alpha,
                           double consistency_tol = kDefaultTolerance);

/// Σ_{α∈a∩b} D(α,α) / Σ_{α∈b} D(α,α). Throws UndefinedProbability for an
/// inconsistent family or when the denominator is ≤ tol.
double family_conditional(const HistoryFamily& family, const State& rho0, const IndexSet& a,
                          const IndexSet& b, double consistency_tol = kDefaultTolerance,
                          double tol = kDefaultTolerance);

}  // namespace qhist
