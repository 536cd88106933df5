#include "qhist/consistent.hpp"

#include <cmath>
#include <sstream>

namespace qhist {

HistoryFamily::HistoryFamily(Time t0, std::vector<TimedContext> tcs, const Propagator& u,
                             double tol)
    : t0_(t0), timed_(std::move(tcs)) {
    require_history_layout(timed_, u);
    if (!std::isfinite(t0)) {
        throw InputError("reference time is not finite");
    }
    std::vector<std::size_t> radices;
    for (const auto& tc : timed_) {
        heisenberg_.push_back(heisenberg_context(tc, u, t0, tol));
        radices.push_back(tc.context.size());
    }
    space_ = MultiIndexSpace(std::move(radices));
}

CMatrix HistoryFamily::class_operator(const std::vector<std::size_t>& alpha) const {
    return class_operator(space_.flatten(alpha));
}

CMatrix HistoryFamily::class_operator(std::size_t flat) const {
    const auto k = space_.unflatten(flat);
    CMatrix c = heisenberg_[0].atom(k[0]).matrix();
    for (std::size_t i = 1; i < k.size(); ++i) {
        c = (heisenberg_[i].atom(k[i]).matrix() * c).eval();
    }
    return c;
}

DecoherenceMatrix decoherence_functional(const HistoryFamily& family, const State& rho0) {
    if (rho0.dim() != family.dim()) {
        throw DimensionMismatch(family.dim(), rho0.dim(), "decoherence_functional");
    }
    const std::size_t n = family.space().size();
    std::vector<CMatrix> classes;
    std::vector<CMatrix> weighted;  // C_α ρ₀
    classes.reserve(n);
    weighted.reserve(n);
    for (std::size_t a = 0; a < n; ++a) {
        classes.push_back(family.class_operator(a));
        weighted.push_back(classes.back() * rho0.rho());
    }
    const auto size = static_cast<Eigen::Index>(n);
    CMatrix d(size, size);
    for (std::size_t a = 0; a < n; ++a) {
        // Tr(X C_β†) = Σ_ij X_ij conj(C_β)_ij
        d(a, a) = Complex(weighted[a].cwiseProduct(classes[a].conjugate()).sum().real(), 0.0);
        for (std::size_t b = a + 1; b < n; ++b) {
            const Complex v = weighted[a].cwiseProduct(classes[b].conjugate()).sum();
            d(a, b) = v;
            d(b, a) = std::conj(v);
        }
    }
    return DecoherenceMatrix(family.space(), std::move(d));
}

ConsistencyReport check_consistency(const DecoherenceMatrix& d, double consistency_tol) {
    ConsistencyReport report{true, 0.0, 0, 0, consistency_tol};
    const auto n = static_cast<std::size_t>(d.values().rows());
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double m = std::abs(d(a, b));
            if (m > report.max_off_diagonal) {
                report.max_off_diagonal = m;
                report.worst_alpha = a;
                report.worst_beta = b;
            }
        }
    }
    report.consistent = report.max_off_diagonal <= consistency_tol;
    return report;
}

ConsistencyReport check_consistency(const HistoryFamily& family, const State& rho0,
                                    double consistency_tol) {
    return check_consistency(decoherence_functional(family, rho0), consistency_tol);
}

namespace {

DecoherenceMatrix consistent_functional(const HistoryFamily& family, const State& rho0,
                                        double consistency_tol) {
    auto d = decoherence_functional(family, rho0);
    const auto report = check_consistency(d, consistency_tol);
    if (!report.consistent) {
        std::ostringstream os;
        os << "family is not consistent for this state (max |D(α,β)| = " << report.max_off_diagonal
           << ")";
        throw UndefinedProbability(UndefinedReason::inconsistent_family, report.max_off_diagonal,
                                   os.str());
    }
    return d;
}

}  // namespace

double history_probability(const HistoryFamily& family, const State& rho0,
                           const std::vector<std::size_t>& alpha, double consistency_tol) {
    const auto flat = family.space().flatten(alpha);
    return consistent_functional(family, rho0, consistency_tol).diagonal(flat);
}

double family_conditional(const HistoryFamily& family, const State& rho0, const IndexSet& a,
                          const IndexSet& b, double consistency_tol, double tol) {
    if (a.universe() != family.space().size() || b.universe() != family.space().size()) {
        throw InputError("family_conditional: history sets do not match the family");
    }
    const auto d = consistent_functional(family, rho0, consistency_tol);
    double joint = 0.0;
    double weight = 0.0;
    for (auto alpha : b.members()) {
        weight += d.diagonal(alpha);
        if (a.contains(alpha)) {
            joint += d.diagonal(alpha);
        }
    }
    if (weight <= tol) {
        throw UndefinedProbability(UndefinedReason::zero_conditioning, weight,
                                   "conditioning histories have probability ≤ tolerance");
    }
    return joint / weight;
}

}  // namespace qhist
