#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qhist/consistent.hpp"
#include "qhist/contexts.hpp"
#include "qhist/histories.hpp"
#include "qhist/linalg.hpp"
#include "qhist/scenario.hpp"

namespace qhist {

enum class Conclusion {
    /// Both consistent families retrodict p and q with certainty while the
    /// generalized-context checks pass. Unreachable in exact arithmetic.
    contrary_inference_in_ch,
    /// Consistent histories retrodict both contraries; the generalized-context
    /// compatibility conditions fail, so no generalized context supports them.
    blocked_by_gc_incompatibility,
    /// Neither framework retrodicts both contraries.
    both_frameworks_agree,
    not_contrary,
};

const char* to_string(Conclusion c);

/// A probability or the reason the formalism declines to give one.
struct Outcome {
    std::optional<double> value;
    std::optional<UndefinedReason> reason;
    /// Conditioning weight, commutator norm or off-diagonal size for undefined outcomes.
    double residual = 0.0;

    bool defined() const noexcept { return value.has_value(); }
};

struct FamilyResult {
    std::string label;  // "p" or "q"
    bool consistent;
    double max_off_diagonal;
    Outcome conditional;  // Pr(label, t₁ | r, t₂) within this family
};

struct CommutationCheck {
    std::string pair;  // "p,r", "q,r", "p,q"
    double norm;
    bool commutes;
};

struct RetrodictionReport {
    std::string scenario_id;
    bool contrary;
    std::vector<FamilyResult> ch_results;
    std::vector<CommutationCheck> gc_checks;
    bool gc_compatible;
    /// Pr(p|r), Pr(q|r) in the generalized context; present only when compatible.
    std::vector<Outcome> gc_conditionals;
    Conclusion conclusion;
};

/// The decision rule, as a pure function of the recorded verdicts.
Conclusion conclude(bool contrary, const std::vector<FamilyResult>& ch, bool gc_compatible,
                    double tol);

struct RetrodictionInput {
    std::string scenario_id;
    State rho0;
    Time t0;
    Projector p;
    Projector q;
    Time t1;
    Projector r;
    Time t2;
};

/// Runs the two consistent families {p, p̄}@t₁ ∪ {r, r̄}@t₂ and {q, q̄}@t₁ ∪ {r, r̄}@t₂,
/// then the three commutation checks of the translated projectors. Undefined
/// conditionals are recorded in the report. Throws InputError unless t₁ < t₂
/// and dimensions agree.
RetrodictionReport analyze_retrodiction(const RetrodictionInput& in, const Propagator& u,
                                        Tolerances tol = {});

/// d = 3, ψ = (1,1,1)/√3 at t₀ = 0, p = ray(e₁), q = ray(e₂) at t₁ = 1,
/// r = ray((1,1,−1)/√3) at t₂ = 2, trivial dynamics.
///
/// Contexts: 0 = {p, p̄}@t₁, 1 = {q, q̄}@t₁, 2 = {r, r̄}@t₂, 3 = {e₁, e₂, e₃}@t₁.
/// Queries: the retrodiction, both family conditionals, the joint family, and
/// the generalized-context attempt.
Scenario three_box_scenario();

/// {P, I − P} with zero atoms dropped, plus the labels that make up P.
struct BinaryContext {
    Context context;
    IndexSet labels;
};
BinaryContext binary_context(const Projector& p, double tol = kDefaultTolerance);

struct ContraryPair {
    Property first;
    Property second;
    std::size_t first_context;
    std::size_t second_context;
};

struct ContraryScan {
    std::vector<ContraryPair> pairs;
    std::size_t examined = 0;
    bool budget_exceeded = false;
};

inline constexpr std::size_t kDefaultScanBudget = 10000;

/// Every non-empty property of every context, paired (i < j) and tested with
/// is_contrary. Pairs are visited as (0,1), (0,2), (1,2), (0,3), … over the list
/// ordered by context then label bitmask, so only the properties the budget
/// reaches are ever built. Throws InputError for contexts with more than 62 atoms.
ContraryScan scan_contrary_pairs(const std::vector<Context>& contexts,
                                 std::size_t budget = kDefaultScanBudget,
                                 double tol = kDefaultTolerance);

/// A fixed family that is consistent for one state and not for another.
struct StateDependenceWitness {
    double fixture_off_diagonal;
    CVector random_state;
    double random_off_diagonal;
    std::size_t trials;
};

/// Draws random pure states (seeded) until the three-box p-family fails the
/// consistency test. Throws NumericalError if none is found in max_trials.
StateDependenceWitness demonstrate_state_dependence(std::uint64_t seed, Tolerances tol = {},
                                                    std::size_t max_trials = 1000);

}  // namespace qhist
