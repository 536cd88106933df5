#include "qhist/histories.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qhist {

namespace {

// Commutator norms up to this multiple of the threshold are "marginal".
constexpr double kMarginalFactor = 100.0;

void require_same_gc(const GeneralizedProperty& p, const GeneralizedProperty& q,
                     const char* what) {
    if (!p.context().same_as(q.context())) {
        throw InputError(std::string(what) +
                         ": properties belong to different generalized contexts");
    }
}

}  // namespace

Projector heisenberg_translate(const Projector& p, const Propagator& u, Time t_i, Time t0,
                               double tol) {
    if (p.dim() != u.dim()) {
        throw DimensionMismatch(u.dim(), p.dim(), "heisenberg_translate");
    }
    if (u.mode() == Propagator::Mode::trivial || t_i == t0 || p.is_zero()) {
        return p;
    }
    const CMatrix forward = u.propagate(t0, t_i);  // U(t_i, t₀)
    CMatrix translated = forward.adjoint() * p.matrix() * forward;
    translated = (0.5 * (translated + translated.adjoint())).eval();
    Projector out = Projector::from_matrix(std::move(translated), tol);
    if (out.rank() != p.rank()) {
        throw NumericalError("heisenberg_translate changed projector rank from " +
                             std::to_string(p.rank()) + " to " + std::to_string(out.rank()));
    }
    return out;
}

Context heisenberg_context(const TimedContext& tc, const Propagator& u, Time t0, double tol) {
    std::vector<Projector> atoms;
    atoms.reserve(tc.context.size());
    for (const auto& atom : tc.context.atoms()) {
        atoms.push_back(heisenberg_translate(atom, u, tc.time, t0, tol));
    }
    return validate_context(std::move(atoms), 5.0 * tol);
}

void require_history_layout(const std::vector<TimedContext>& tcs, const Propagator& u) {
    if (tcs.empty()) {
        throw InputError("at least one timed context is required");
    }
    for (std::size_t i = 0; i < tcs.size(); ++i) {
        if (!std::isfinite(tcs[i].time)) {
            throw InputError("context " + std::to_string(i) + " has a non-finite time");
        }
        if (tcs[i].context.dim() != u.dim()) {
            throw DimensionMismatch(u.dim(), tcs[i].context.dim(),
                                    "context " + std::to_string(i));
        }
        if (i > 0 && !(tcs[i - 1].time < tcs[i].time)) {
            std::ostringstream os;
            os << "context times must be strictly increasing (t" << i << "=" << tcs[i - 1].time
               << ", t" << i + 1 << "=" << tcs[i].time << ")";
            throw InputError(os.str());
        }
    }
}

double IncompatibleVerdict::max_norm() const noexcept {
    double m = 0.0;
    for (const auto& p : pairs) {
        m = std::max(m, p.norm);
    }
    return m;
}

// GeneralizedContext --------------------------------------------------------

struct GeneralizedContext::Impl {
    Time reference_time;
    std::vector<TimedContext> timed;
    std::vector<Context> heisenberg;
    MultiIndexSpace space;
    std::vector<Projector> atoms;
    std::vector<bool> zero;
    double tol;
};

Time GeneralizedContext::reference_time() const noexcept { return impl_->reference_time; }
const std::vector<TimedContext>& GeneralizedContext::timed_contexts() const noexcept {
    return impl_->timed;
}
const std::vector<Context>& GeneralizedContext::heisenberg_contexts() const noexcept {
    return impl_->heisenberg;
}
const MultiIndexSpace& GeneralizedContext::space() const noexcept { return impl_->space; }
std::size_t GeneralizedContext::dim() const noexcept { return impl_->atoms.front().dim(); }
const std::vector<Projector>& GeneralizedContext::atoms() const noexcept { return impl_->atoms; }

const Projector& GeneralizedContext::atom(const std::vector<std::size_t>& k) const {
    return impl_->atoms[impl_->space.flatten(k)];
}

bool GeneralizedContext::is_zero_atom(std::size_t flat) const {
    if (flat >= impl_->zero.size()) {
        throw InputError("generalized atom index out of range");
    }
    return impl_->zero[flat];
}

GeneralizedProperty GeneralizedContext::property(const IndexSet& labels) const {
    return GeneralizedProperty(*this, labels);
}
GeneralizedProperty GeneralizedContext::full() const {
    return GeneralizedProperty(*this, IndexSet::full(impl_->space.size()));
}
GeneralizedProperty GeneralizedContext::empty() const {
    return GeneralizedProperty(*this, IndexSet(impl_->space.size()));
}
GeneralizedProperty GeneralizedContext::history(const std::vector<std::size_t>& k) const {
    return GeneralizedProperty(*this, IndexSet(impl_->space.size(), {impl_->space.flatten(k)}));
}
GeneralizedProperty GeneralizedContext::at(std::size_t position, const IndexSet& labels) const {
    return GeneralizedProperty(*this, impl_->space.cylinder(position, labels));
}

CompatibilityResult build_generalized_context(Time t0, std::vector<TimedContext> tcs,
                                              const Propagator& u, double tol) {
    require_history_layout(tcs, u);
    if (!std::isfinite(t0)) {
        throw InputError("reference time is not finite");
    }

    std::vector<Context> heisenberg;
    std::vector<std::size_t> radices;
    for (const auto& tc : tcs) {
        heisenberg.push_back(heisenberg_context(tc, u, t0, tol));
        radices.push_back(tc.context.size());
    }

    // Atoms of one context are orthogonal and commute already; only pairs
    // from different times need checking.
    IncompatibleVerdict verdict;
    for (std::size_t i = 0; i < heisenberg.size(); ++i) {
        for (std::size_t j = i + 1; j < heisenberg.size(); ++j) {
            for (std::size_t ki = 0; ki < radices[i]; ++ki) {
                for (std::size_t kj = 0; kj < radices[j]; ++kj) {
                    const auto& a = heisenberg[i].atom(ki);
                    const auto& b = heisenberg[j].atom(kj);
                    if (commutes(a, b, tol)) {
                        continue;
                    }
                    const double norm = commutator_norm(a.matrix(), b.matrix());
                    const double scale = std::max(1.0, a.matrix().norm() * b.matrix().norm());
                    verdict.pairs.push_back(
                        {i, ki, j, kj, norm, norm <= kMarginalFactor * tol * scale});
                }
            }
        }
    }
    if (!verdict.pairs.empty()) {
        return CompatibilityResult(std::move(verdict));
    }

    MultiIndexSpace space(radices);
    const std::size_t dim = u.dim();
    // Products of commuting projectors are projectors up to the accumulated
    // commutator residuals, each bounded by tol·dim.
    const double atom_tol = 5.0 * tol * static_cast<double>(tcs.size() * dim);
    std::vector<Projector> atoms;
    std::vector<bool> zero;
    atoms.reserve(space.size());
    zero.reserve(space.size());
    for (std::size_t flat = 0; flat < space.size(); ++flat) {
        const auto k = space.unflatten(flat);
        CMatrix product = heisenberg[0].atom(k[0]).matrix();
        for (std::size_t i = 1; i < k.size(); ++i) {
            product = (product * heisenberg[i].atom(k[i]).matrix()).eval();
        }
        product = (0.5 * (product + product.adjoint())).eval();
        Projector atom = Projector::from_matrix(std::move(product), atom_tol);
        if (atom.is_zero()) {
            atom = Projector::zero(dim);
        }
        zero.push_back(atom.is_zero());
        atoms.push_back(std::move(atom));
    }

    // The nonzero atoms must themselves form a projective decomposition.
    std::vector<Projector> nonzero;
    for (std::size_t flat = 0; flat < atoms.size(); ++flat) {
        if (!zero[flat]) {
            nonzero.push_back(atoms[flat]);
        }
    }
    try {
        validate_context(std::move(nonzero), atom_tol);
    } catch (const ContextError& e) {
        throw NumericalError(std::string("generalized atoms fail to decompose the identity: ") +
                             e.what());
    }

    auto impl = std::make_shared<const GeneralizedContext::Impl>(GeneralizedContext::Impl{
        t0, std::move(tcs), std::move(heisenberg), std::move(space), std::move(atoms),
        std::move(zero), tol});
    return CompatibilityResult(GeneralizedContext(std::move(impl)));
}

// GeneralizedProperty -------------------------------------------------------

GeneralizedProperty::GeneralizedProperty(GeneralizedContext gc, IndexSet labels)
    : gc_(std::move(gc)), labels_(std::move(labels)) {
    if (labels_.universe() != gc_.space().size()) {
        throw InputError("generalized property label set does not match the history space");
    }
}

Projector GeneralizedProperty::projector() const {
    const auto d = static_cast<Eigen::Index>(gc_.dim());
    CMatrix sum = CMatrix::Zero(d, d);
    std::size_t terms = 0;
    for (auto flat : labels_.members()) {
        if (!gc_.is_zero_atom(flat)) {
            sum += gc_.atoms()[flat].matrix();
            ++terms;
        }
    }
    if (terms == 0) {
        return Projector::zero(gc_.dim());
    }
    const auto m = static_cast<double>(terms + 1);
    return Projector::from_matrix(std::move(sum), 5.0 * kDefaultTolerance * m * m);
}

GeneralizedProperty complement(const GeneralizedProperty& p) {
    return GeneralizedProperty(p.context(), p.labels().complement());
}

GeneralizedProperty meet(const GeneralizedProperty& p, const GeneralizedProperty& q) {
    require_same_gc(p, q, "meet");
    return GeneralizedProperty(p.context(), p.labels().intersection(q.labels()));
}

GeneralizedProperty join(const GeneralizedProperty& p, const GeneralizedProperty& q) {
    require_same_gc(p, q, "join");
    return GeneralizedProperty(p.context(), p.labels().union_with(q.labels()));
}

bool leq(const GeneralizedProperty& p, const GeneralizedProperty& q) {
    require_same_gc(p, q, "leq");
    return p.labels().subset_of(q.labels());
}

double generalized_probability(const State& rho0, const GeneralizedProperty& p) {
    if (rho0.dim() != p.context().dim()) {
        throw DimensionMismatch(p.context().dim(), rho0.dim(), "generalized_probability");
    }
    double total = 0.0;
    for (auto flat : p.labels().members()) {
        if (!p.context().is_zero_atom(flat)) {
            total += born_probability(rho0, p.context().atoms()[flat]);
        }
    }
    return total;
}

double generalized_conditional(const State& rho0, const GeneralizedProperty& a,
                               const GeneralizedProperty& b, double tol) {
    require_same_gc(a, b, "generalized_conditional");
    const double weight = generalized_probability(rho0, b);
    if (weight <= tol) {
        throw UndefinedProbability(UndefinedReason::zero_conditioning, weight,
                                   "conditioning history has probability ≤ tolerance");
    }
    return generalized_probability(rho0, meet(a, b)) / weight;
}

}  // namespace qhist
