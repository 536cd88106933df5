#include "qhist/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "qhist/error.hpp"

namespace qhist {

namespace {

void require_same_dim(const Projector& a, const Projector& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch(a.dim(), b.dim(), what);
    }
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

}  // namespace

const char* to_string(UndefinedReason reason) {
    switch (reason) {
        case UndefinedReason::non_commuting: return "non_commuting";
        case UndefinedReason::zero_conditioning: return "zero_conditioning";
        case UndefinedReason::inconsistent_family: return "inconsistent_family";
    }
    return "unknown";
}

double frobenius(const CMatrix& m) { return m.norm(); }

bool all_finite(const CMatrix& m) { return m.allFinite(); }
bool all_finite(const CVector& v) { return v.allFinite(); }

double hermiticity_residual(const CMatrix& m) { return (m - m.adjoint()).norm(); }

double idempotency_residual(const CMatrix& m) { return (m * m - m).norm(); }

double commutator_norm(const CMatrix& a, const CMatrix& b) { return (a * b - b * a).norm(); }

bool is_projector(const CMatrix& m, double tol) {
    if (m.rows() != m.cols() || m.rows() == 0 || !m.allFinite()) {
        return false;
    }
    const double scale = std::max(1.0, m.norm());
    return hermiticity_residual(m) <= tol && idempotency_residual(m) <= tol * scale;
}

Projector Projector::from_matrix(CMatrix m, double tol) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InputError("projector must be a non-empty square matrix");
    }
    if (!m.allFinite()) {
        throw InputError("projector has non-finite entries");
    }
    const double herm = hermiticity_residual(m);
    if (herm > tol) {
        throw InputError("matrix is not Hermitian (residual " + fmt(herm) + ")");
    }
    const double scale = std::max(1.0, m.norm());
    const double idem = idempotency_residual(m);
    if (idem > tol * scale) {
        throw InputError("matrix is not idempotent (residual " + fmt(idem) + ")");
    }
    const double trace = m.trace().real();
    const double rounded = std::round(trace);
    if (std::abs(trace - rounded) > tol * scale || rounded < 0) {
        throw InputError("projector trace " + fmt(trace) + " is not an integer rank");
    }
    return Projector(std::move(m), static_cast<std::size_t>(rounded));
}

Projector Projector::zero(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return Projector(CMatrix::Zero(d, d), 0);
}

Projector Projector::identity(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return Projector(CMatrix::Identity(d, d), dim);
}

Projector Projector::complement() const {
    CMatrix c = CMatrix::Identity(matrix_.rows(), matrix_.cols()) - matrix_;
    return Projector(std::move(c), dim() - rank_);
}

bool commutes(const Projector& a, const Projector& b, double tol) {
    require_same_dim(a, b, "commutes");
    const double scale = std::max(1.0, a.matrix().norm() * b.matrix().norm());
    return commutator_norm(a.matrix(), b.matrix()) <= tol * scale;
}

bool subspace_leq(const Projector& p, const Projector& q, double tol) {
    require_same_dim(p, q, "subspace_leq");
    return (q.matrix() * p.matrix() - p.matrix()).norm() <= tol;
}

Projector projector_from_vectors(std::span<const CVector> vs, double tol) {
    if (vs.empty()) {
        throw InputError("projector_from_vectors: empty vector list");
    }
    const auto dim = vs.front().size();
    if (dim == 0) {
        throw InputError("projector_from_vectors: zero-length vector");
    }
    std::vector<CVector> basis;
    for (const auto& v : vs) {
        if (v.size() != dim) {
            throw DimensionMismatch(static_cast<std::size_t>(dim),
                                    static_cast<std::size_t>(v.size()), "projector_from_vectors");
        }
        if (!v.allFinite()) {
            throw InputError("projector_from_vectors: non-finite entries");
        }
        CVector w = v;
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                w -= b * b.dot(w);
            }
        }
        const double n = w.norm();
        if (n > tol) {
            basis.push_back(w / n);
        }
    }
    if (basis.empty()) {
        throw InputError("projector_from_vectors: vectors span the zero subspace");
    }
    CMatrix p = CMatrix::Zero(dim, dim);
    for (const auto& b : basis) {
        p.noalias() += b * b.adjoint();
    }
    return Projector::from_matrix(std::move(p), tol);
}

Projector ray(const CVector& v, double tol) {
    return projector_from_vectors(std::span<const CVector>(&v, 1), tol);
}

const char* to_string(Propagator::Mode mode) {
    switch (mode) {
        case Propagator::Mode::trivial: return "trivial";
        case Propagator::Mode::hamiltonian: return "hamiltonian";
        case Propagator::Mode::explicit_unitaries: return "explicit";
    }
    return "unknown";
}

Propagator Propagator::trivial(std::size_t dim) {
    if (dim == 0) {
        throw InputError("propagator dimension must be positive");
    }
    return Propagator(Mode::trivial, dim);
}

Propagator Propagator::from_hamiltonian(CMatrix h, double tol) {
    if (h.rows() != h.cols() || h.rows() == 0) {
        throw InputError("Hamiltonian must be a non-empty square matrix");
    }
    if (!h.allFinite()) {
        throw InputError("Hamiltonian has non-finite entries");
    }
    const double herm = hermiticity_residual(h);
    if (herm > tol * std::max(1.0, h.norm())) {
        throw InputError("Hamiltonian is not Hermitian (residual " + fmt(herm) + ")");
    }
    Propagator out(Mode::hamiltonian, static_cast<std::size_t>(h.rows()));
    // Eigen reads only the lower triangle; symmetrize so both halves count.
    const CMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("Hamiltonian eigendecomposition did not converge");
    }
    out.hamiltonian_ = std::move(h);
    out.eigenvectors_ = solver.eigenvectors();
    out.eigenvalues_ = solver.eigenvalues();
    return out;
}

Propagator Propagator::from_unitaries(std::size_t dim, std::vector<Step> steps, double tol) {
    if (dim == 0) {
        throw InputError("propagator dimension must be positive");
    }
    const auto d = static_cast<Eigen::Index>(dim);
    const CMatrix eye = CMatrix::Identity(d, d);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& s = steps[i];
        const std::string where = "explicit unitary #" + std::to_string(i);
        if (s.unitary.rows() != d || s.unitary.cols() != d) {
            throw DimensionMismatch(dim, static_cast<std::size_t>(s.unitary.rows()), where);
        }
        if (!s.unitary.allFinite() || !std::isfinite(s.from) || !std::isfinite(s.to)) {
            throw InputError(where + " has non-finite entries");
        }
        const double unit = (s.unitary.adjoint() * s.unitary - eye).norm();
        if (unit > tol) {
            throw InputError(where + " is not unitary (residual " + fmt(unit) + ")");
        }
        if (s.from == s.to && (s.unitary - eye).norm() > tol) {
            throw InputError(where + " violates U(t,t) = I");
        }
    }
    Propagator out(Mode::explicit_unitaries, dim);
    out.steps_ = std::move(steps);
    return out;
}

CMatrix Propagator::propagate(Time t_from, Time t_to) const {
    const auto d = static_cast<Eigen::Index>(dim_);
    if (t_from == t_to) {
        return CMatrix::Identity(d, d);
    }
    switch (mode_) {
        case Mode::trivial:
            return CMatrix::Identity(d, d);
        case Mode::hamiltonian: {
            const double dt = t_to - t_from;
            CVector phases(d);
            for (Eigen::Index i = 0; i < d; ++i) {
                phases[i] = std::polar(1.0, -eigenvalues_[i] * dt);
            }
            return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
        }
        case Mode::explicit_unitaries:
            break;
    }

    // Breadth-first search over registered times; edges run both ways, the
    // reverse direction carrying U†. Registration order makes it deterministic.
    struct Edge {
        Time to;
        std::size_t step;
        bool inverse;
    };
    std::map<Time, std::vector<Edge>> adjacency;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        adjacency[steps_[i].from].push_back({steps_[i].to, i, false});
        adjacency[steps_[i].to].push_back({steps_[i].from, i, true});
    }
    std::map<Time, std::pair<Time, Edge>> parent;
    std::queue<Time> frontier;
    frontier.push(t_from);
    parent.emplace(t_from, std::pair<Time, Edge>{t_from, Edge{t_from, 0, false}});
    while (!frontier.empty() && !parent.contains(t_to)) {
        const Time t = frontier.front();
        frontier.pop();
        for (const auto& e : adjacency[t]) {
            if (!parent.contains(e.to)) {
                parent.emplace(e.to, std::pair<Time, Edge>{t, e});
                frontier.push(e.to);
            }
        }
    }
    if (!parent.contains(t_to)) {
        std::ostringstream os;
        os << "no registered unitary chain from t=" << t_from << " to t=" << t_to;
        throw InputError(os.str());
    }
    CMatrix u = CMatrix::Identity(d, d);
    for (Time t = t_to; t != t_from;) {
        const auto& [prev, edge] = parent.at(t);
        const CMatrix& step = steps_[edge.step].unitary;
        u = u * (edge.inverse ? CMatrix(step.adjoint()) : step);
        t = prev;
    }
    return u;
}

}  // namespace qhist
