#include "qhist/contexts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qhist {

namespace {

std::string sci(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

void require_dim(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual) {
        throw DimensionMismatch(expected, actual, what);
    }
}

void require_same_context(const Property& p, const Property& q, const char* what) {
    if (!p.context().same_as(q.context())) {
        throw InputError(std::string(what) + ": properties belong to different contexts");
    }
}

}  // namespace

// State --------------------------------------------------------------------

State State::from_density(CMatrix rho, double tol) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) {
        throw InputError("density matrix must be a non-empty square matrix");
    }
    if (!rho.allFinite()) {
        throw InputError("density matrix has non-finite entries");
    }
    const double herm = hermiticity_residual(rho);
    if (herm > tol) {
        throw InputError("density matrix is not Hermitian (residual " + sci(herm) + ")");
    }
    const Complex trace = rho.trace();
    if (std::abs(trace - Complex(1.0, 0.0)) > tol) {
        throw InputError("density matrix trace is " + sci(trace.real()) + ", expected 1");
    }
    const CMatrix sym = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("density matrix eigendecomposition did not converge");
    }
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -tol) {
        throw InputError("density matrix is not positive semidefinite (min eigenvalue " +
                         sci(min_eig) + ")");
    }
    return State(std::move(rho));
}

State State::from_pure(const CVector& psi, double tol) {
    if (psi.size() == 0) {
        throw InputError("state vector is empty");
    }
    if (!psi.allFinite()) {
        throw InputError("state vector has non-finite entries");
    }
    const double norm = psi.norm();
    if (std::abs(norm - 1.0) > tol) {
        throw InputError("state vector norm is " + sci(norm) + ", expected 1");
    }
    return State(psi * psi.adjoint());
}

State State::maximally_mixed(std::size_t dim) {
    if (dim == 0) {
        throw InputError("state dimension must be positive");
    }
    const auto d = static_cast<Eigen::Index>(dim);
    return State(CMatrix::Identity(d, d) / static_cast<double>(dim));
}

// Context ------------------------------------------------------------------

struct Context::Impl {
    std::vector<Projector> atoms;
    double tol;
};

const char* to_string(ContextViolation::Kind kind) {
    using K = ContextViolation::Kind;
    switch (kind) {
        case K::empty: return "empty";
        case K::not_projector: return "not_projector";
        case K::dimension: return "dimension";
        case K::zero_atom: return "zero_atom";
        case K::orthogonality: return "orthogonality";
        case K::completeness: return "completeness";
    }
    return "unknown";
}

std::size_t Context::dim() const noexcept { return impl_->atoms.front().dim(); }
std::size_t Context::size() const noexcept { return impl_->atoms.size(); }
const std::vector<Projector>& Context::atoms() const noexcept { return impl_->atoms; }
double Context::tolerance() const noexcept { return impl_->tol; }

const Projector& Context::atom(std::size_t k) const {
    if (k >= size()) {
        throw InputError("atom index " + std::to_string(k) + " outside context of size " +
                         std::to_string(size()));
    }
    return impl_->atoms[k];
}

Property Context::property(const IndexSet& labels) const { return Property(*this, labels); }

Property Context::property(std::initializer_list<std::size_t> labels) const {
    return Property(*this, IndexSet(size(), std::vector<std::size_t>(labels)));
}

Property Context::full() const { return Property(*this, IndexSet::full(size())); }
Property Context::empty() const { return Property(*this, IndexSet(size())); }

Context validate_context(std::vector<Projector> atoms, double tol) {
    using K = ContextViolation::Kind;
    if (atoms.empty()) {
        throw ContextError({K::empty}, "context has no atoms");
    }
    const std::size_t dim = atoms.front().dim();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (atoms[k].dim() != dim) {
            throw ContextError({K::dimension, k, 0, 0.0},
                               "atom " + std::to_string(k) + " has dimension " +
                                   std::to_string(atoms[k].dim()) + ", expected " +
                                   std::to_string(dim));
        }
        if (atoms[k].is_zero()) {
            throw ContextError({K::zero_atom, k, 0, 0.0},
                               "atom " + std::to_string(k) + " is the zero projector");
        }
    }
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        for (std::size_t b = a + 1; b < atoms.size(); ++b) {
            const double overlap = (atoms[a].matrix() * atoms[b].matrix()).norm();
            if (overlap > tol) {
                throw ContextError({K::orthogonality, a, b, overlap},
                                   "atoms " + std::to_string(a) + " and " + std::to_string(b) +
                                       " are not orthogonal (residual " + sci(overlap) + ")");
            }
        }
    }
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix sum = CMatrix::Zero(d, d);
    for (const auto& atom : atoms) {
        sum += atom.matrix();
    }
    const double gap = (sum - CMatrix::Identity(d, d)).norm();
    if (gap > tol) {
        throw ContextError({K::completeness, 0, atoms.size(), gap},
                           "atoms do not sum to the identity (residual " + sci(gap) + ")");
    }
    return Context(std::make_shared<const Context::Impl>(Context::Impl{std::move(atoms), tol}));
}

Context validate_context(const std::vector<CMatrix>& atoms, double tol) {
    std::vector<Projector> projectors;
    projectors.reserve(atoms.size());
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (!is_projector(atoms[k], tol)) {
            const double residual = atoms[k].rows() == atoms[k].cols()
                                        ? std::max(hermiticity_residual(atoms[k]),
                                                   idempotency_residual(atoms[k]))
                                        : 0.0;
            throw ContextError({ContextViolation::Kind::not_projector, k, 0, residual},
                               "atom " + std::to_string(k) + " is not a projector (residual " +
                                   sci(residual) + ")");
        }
        try {
            projectors.push_back(Projector::from_matrix(atoms[k], tol));
        } catch (const InputError& e) {
            throw ContextError({ContextViolation::Kind::not_projector, k, 0, 0.0},
                               "atom " + std::to_string(k) + ": " + e.what());
        }
    }
    return validate_context(std::move(projectors), tol);
}

// Property lattice ---------------------------------------------------------

Property::Property(Context context, IndexSet labels)
    : context_(std::move(context)), labels_(std::move(labels)) {
    if (labels_.universe() != context_.size()) {
        throw InputError("property label set has " + std::to_string(labels_.universe()) +
                         " slots, context has " + std::to_string(context_.size()) + " atoms");
    }
}

Projector Property::projector() const {
    const auto members = labels_.members();
    if (members.empty()) {
        return Projector::zero(context_.dim());
    }
    if (members.size() == 1) {
        return context_.atom(members.front());
    }
    CMatrix sum = context_.atom(members.front()).matrix();
    for (std::size_t i = 1; i < members.size(); ++i) {
        sum += context_.atom(members[i]).matrix();
    }
    // Each pairwise overlap and each atom's own residual was bounded by the
    // context tolerance, so the sum may accumulate (m + 1)² of them.
    const auto m = static_cast<double>(members.size() + 1);
    return Projector::from_matrix(std::move(sum), context_.tolerance() * m * m);
}

Property complement(const Property& p) { return Property(p.context(), p.labels().complement()); }

Property meet(const Property& p, const Property& q) {
    require_same_context(p, q, "meet");
    return Property(p.context(), p.labels().intersection(q.labels()));
}

Property join(const Property& p, const Property& q) {
    require_same_context(p, q, "join");
    return Property(p.context(), p.labels().union_with(q.labels()));
}

bool leq(const Property& p, const Property& q) {
    require_same_context(p, q, "leq");
    return p.labels().subset_of(q.labels());
}

// Probabilities ------------------------------------------------------------

double born_probability(const State& rho, const Projector& p) {
    require_dim(rho.dim(), p.dim(), "born_probability");
    // Tr(ρΠ) = Σ_ij ρ_ij Π_ji without forming the product.
    return (rho.rho().cwiseProduct(p.matrix().transpose())).sum().real();
}

double born_probability(const State& rho, const Property& p) {
    return born_probability(rho, p.projector());
}

State condition_on(const State& rho, const Projector& r, double tol) {
    require_dim(rho.dim(), r.dim(), "condition_on");
    const double weight = born_probability(rho, r);
    if (weight <= tol) {
        throw UndefinedProbability(UndefinedReason::zero_conditioning, weight,
                                   "conditioning property has probability " + sci(weight));
    }
    const CMatrix reduced = r.matrix() * rho.rho() * r.matrix();
    const double norm = reduced.trace().real();
    CMatrix normalized = reduced / norm;
    // ρ* is a state analytically; only roundoff is removed here.
    return State(0.5 * (normalized + normalized.adjoint()));
}

double conditional_probability(const State& rho, const Projector& p, const Projector& r,
                               double tol) {
    require_dim(rho.dim(), p.dim(), "conditional_probability");
    require_dim(p.dim(), r.dim(), "conditional_probability");
    if (!commutes(p, r, tol)) {
        throw UndefinedProbability(UndefinedReason::non_commuting,
                                   commutator_norm(p.matrix(), r.matrix()),
                                   "conditional probability undefined: projectors do not commute");
    }
    return born_probability(condition_on(rho, r, tol), p);
}

bool is_contrary(const Projector& p, const Projector& q, double tol) {
    if (p.dim() != q.dim()) {
        throw DimensionMismatch(p.dim(), q.dim(), "is_contrary");
    }
    const bool inclusion = subspace_leq(p, q.complement(), tol);
    const double pq = (p.matrix() * q.matrix()).norm();
    const double qp = (q.matrix() * p.matrix()).norm();
    const bool orthogonal = pq <= tol && qp <= tol;
    if (inclusion != orthogonal && std::abs(pq - qp) > tol) {
        throw NumericalError("is_contrary: subspace inclusion and orthogonality disagree (‖PQ‖=" +
                             sci(pq) + ", ‖QP‖=" + sci(qp) + ")");
    }
    return inclusion;
}

double clamp_probability(double p) noexcept { return std::clamp(p, 0.0, 1.0); }

}  // namespace qhist
