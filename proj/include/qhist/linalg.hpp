#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qhist {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Time = double;

/// Default absolute/relative tolerance for all projector and commutator tests.
inline constexpr double kDefaultTolerance = 1e-9;

double frobenius(const CMatrix& m);
bool all_finite(const CMatrix& m);
bool all_finite(const CVector& v);

/// ‖M − M†‖_F
double hermiticity_residual(const CMatrix& m);
/// ‖M² − M‖_F
double idempotency_residual(const CMatrix& m);
/// ‖AB − BA‖_F
double commutator_norm(const CMatrix& a, const CMatrix& b);

/// Hermitian within tol (absolute) and idempotent within tol·max(1, ‖M‖_F).
/// Non-square or non-finite input is simply not a projector.
bool is_projector(const CMatrix& m, double tol = kDefaultTolerance);

/// An orthogonal projector: the representation of a property. Instances are
/// validated on construction and immutable afterwards.
class Projector {
public:
    /// Throws InputError if `m` is not a projector within tol or its trace is
    /// not within tol·max(1, ‖M‖_F) of an integer.
    static Projector from_matrix(CMatrix m, double tol = kDefaultTolerance);
    static Projector zero(std::size_t dim);
    static Projector identity(std::size_t dim);

    const CMatrix& matrix() const noexcept { return matrix_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
    std::size_t rank() const noexcept { return rank_; }
    bool is_zero() const noexcept { return rank_ == 0; }

    /// I − P
    Projector complement() const;

private:
    Projector(CMatrix m, std::size_t rank) : matrix_(std::move(m)), rank_(rank) {}

    CMatrix matrix_;
    std::size_t rank_;
};

/// ‖AB − BA‖_F ≤ tol · max(1, ‖A‖_F‖B‖_F). Throws DimensionMismatch.
bool commutes(const Projector& a, const Projector& b, double tol = kDefaultTolerance);

/// Range(P) ⊆ Range(Q), tested as ‖QP − P‖_F ≤ tol. Throws DimensionMismatch.
bool subspace_leq(const Projector& p, const Projector& q, double tol = kDefaultTolerance);

/// Orthogonal projector onto span(vs) by modified Gram-Schmidt with one
/// reorthogonalization pass. Vectors whose residual norm falls to ≤ tol are
/// dropped. Throws InputError on an empty list, unequal dimensions or a
/// zero span.
Projector projector_from_vectors(std::span<const CVector> vs, double tol = kDefaultTolerance);

/// Rank-one projector onto the line through v (v need not be normalized).
Projector ray(const CVector& v, double tol = kDefaultTolerance);

/// Time-evolution operator U(t_to, t_from) with ħ = 1.
class Propagator {
public:
    enum class Mode { trivial, hamiltonian, explicit_unitaries };

    struct Step {
        Time from;
        Time to;
        CMatrix unitary;  // U(to, from)
    };

    static Propagator trivial(std::size_t dim);
    /// Throws InputError unless h is finite and Hermitian within tol;
    /// NumericalError if the eigensolver fails.
    static Propagator from_hamiltonian(CMatrix h, double tol = kDefaultTolerance);
    /// Each step must be unitary within tol; a step with from == to must be I.
    static Propagator from_unitaries(std::size_t dim, std::vector<Step> steps,
                                     double tol = kDefaultTolerance);

    Mode mode() const noexcept { return mode_; }
    std::size_t dim() const noexcept { return dim_; }
    /// Only meaningful in hamiltonian mode.
    const CMatrix& hamiltonian() const noexcept { return hamiltonian_; }
    const std::vector<Step>& steps() const noexcept { return steps_; }

    /// U(t_to, t_from). Hamiltonian mode: V e^{−iΛ(t_to − t_from)} V†, and exactly
    /// I when the times coincide. Explicit mode composes registered steps
    /// (inverses via U†); throws InputError if no chain connects the times.
    CMatrix propagate(Time t_from, Time t_to) const;

private:
    Propagator(Mode mode, std::size_t dim) : mode_(mode), dim_(dim) {}

    Mode mode_;
    std::size_t dim_;
    CMatrix hamiltonian_;
    CMatrix eigenvectors_;
    Eigen::VectorXd eigenvalues_;
    std::vector<Step> steps_;
};

const char* to_string(Propagator::Mode mode);

}  // namespace qhist
