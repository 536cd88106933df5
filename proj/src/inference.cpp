#include "qhist/inference.hpp"

#include <cmath>

#include "qhist/random.hpp"

namespace qhist {

const char* to_string(Conclusion c) {
    switch (c) {
        case Conclusion::contrary_inference_in_ch: return "CONTRARY_INFERENCE_IN_CH";
        case Conclusion::blocked_by_gc_incompatibility: return "BLOCKED_BY_GC_INCOMPATIBILITY";
        case Conclusion::both_frameworks_agree: return "BOTH_FRAMEWORKS_AGREE";
        case Conclusion::not_contrary: return "NOT_CONTRARY";
    }
    return "UNKNOWN";
}

BinaryContext binary_context(const Projector& p, double tol) {
    if (p.is_zero() || p.rank() == p.dim()) {
        auto ctx = validate_context(std::vector<Projector>{Projector::identity(p.dim())}, tol);
        IndexSet labels(1);
        if (!p.is_zero()) {
            labels.insert(0);
        }
        return {std::move(ctx), std::move(labels)};
    }
    auto ctx = validate_context(std::vector<Projector>{p, p.complement()}, tol);
    return {std::move(ctx), IndexSet(2, {0})};
}

namespace {

Outcome undefined(const UndefinedProbability& e) {
    Outcome o;
    o.reason = e.reason();
    o.residual = e.residual();
    return o;
}

FamilyResult run_family(const std::string& label, const RetrodictionInput& in,
                        const Projector& property, const Propagator& u, Tolerances tol) {
    const auto bp = binary_context(property, tol.tol);
    const auto br = binary_context(in.r, tol.tol);
    const HistoryFamily family(in.t0, {{in.t1, bp.context}, {in.t2, br.context}}, u, tol.tol);
    const auto report = check_consistency(decoherence_functional(family, in.rho0), tol.consistency);

    FamilyResult result{label, report.consistent, report.max_off_diagonal, {}};
    try {
        result.conditional.value = family_conditional(family, in.rho0, family.at(0, bp.labels),
                                                      family.at(1, br.labels), tol.consistency,
                                                      tol.tol);
    } catch (const UndefinedProbability& e) {
        result.conditional = undefined(e);
    }
    return result;
}

}  // namespace

Conclusion conclude(bool contrary, const std::vector<FamilyResult>& ch, bool gc_compatible,
                    double tol) {
    if (!contrary) {
        return Conclusion::not_contrary;
    }
    bool certain_everywhere = !ch.empty();
    for (const auto& f : ch) {
        certain_everywhere = certain_everywhere && f.consistent && f.conditional.defined() &&
                             *f.conditional.value >= 1.0 - 10.0 * tol;
    }
    if (!certain_everywhere) {
        return Conclusion::both_frameworks_agree;
    }
    return gc_compatible ? Conclusion::contrary_inference_in_ch
                         : Conclusion::blocked_by_gc_incompatibility;
}

RetrodictionReport analyze_retrodiction(const RetrodictionInput& in, const Propagator& u,
                                        Tolerances tol) {
    const std::size_t dim = in.rho0.dim();
    for (const auto* proj : {&in.p, &in.q, &in.r}) {
        if (proj->dim() != dim) {
            throw DimensionMismatch(dim, proj->dim(), "analyze_retrodiction");
        }
    }
    if (u.dim() != dim) {
        throw DimensionMismatch(dim, u.dim(), "analyze_retrodiction propagator");
    }
    if (!(in.t1 < in.t2)) {
        throw InputError("analyze_retrodiction requires t1 < t2");
    }

    RetrodictionReport report{in.scenario_id, is_contrary(in.p, in.q, tol.tol), {}, {}, false,
                              {}, Conclusion::not_contrary};
    if (!report.contrary) {
        return report;
    }

    report.ch_results.push_back(run_family("p", in, in.p, u, tol));
    report.ch_results.push_back(run_family("q", in, in.q, u, tol));

    const Projector p0 = heisenberg_translate(in.p, u, in.t1, in.t0, tol.tol);
    const Projector q0 = heisenberg_translate(in.q, u, in.t1, in.t0, tol.tol);
    const Projector r0 = heisenberg_translate(in.r, u, in.t2, in.t0, tol.tol);
    const auto check = [&](const char* name, const Projector& a, const Projector& b) {
        return CommutationCheck{name, commutator_norm(a.matrix(), b.matrix()),
                                commutes(a, b, tol.tol)};
    };
    report.gc_checks = {check("p,r", p0, r0), check("q,r", q0, r0), check("p,q", p0, q0)};
    report.gc_compatible = true;
    for (const auto& c : report.gc_checks) {
        report.gc_compatible = report.gc_compatible && c.commutes;
    }
    if (report.gc_compatible) {
        for (const auto* a : {&p0, &q0}) {
            Outcome o;
            try {
                o.value = conditional_probability(in.rho0, *a, r0, tol.tol);
            } catch (const UndefinedProbability& e) {
                o = undefined(e);
            }
            report.gc_conditionals.push_back(o);
        }
    }
    report.conclusion =
        conclude(report.contrary, report.ch_results, report.gc_compatible, tol.tol);
    return report;
}

Scenario three_box_scenario() {
    const double s = 1.0 / std::sqrt(3.0);
    const auto vec = [](std::initializer_list<double> xs) {
        CVector v(static_cast<Eigen::Index>(xs.size()));
        Eigen::Index i = 0;
        for (double x : xs) {
            v[i++] = Complex(x, 0.0);
        }
        return v;
    };
    const auto span = [](std::vector<CVector> vs) -> ProjectorForm { return vs; };

    Scenario sc;
    sc.name = "three-box";
    sc.dimension = 3;
    sc.state = vec({s, s, s});
    sc.dynamics.mode = Propagator::Mode::trivial;
    sc.reference_time = 0.0;
    sc.contexts = {
        {1.0, {span({vec({1, 0, 0})}), span({vec({0, 1, 0}), vec({0, 0, 1})})}},
        {1.0, {span({vec({0, 1, 0})}), span({vec({1, 0, 0}), vec({0, 0, 1})})}},
        {2.0, {span({vec({1, 1, -1})}), span({vec({1, -1, 0}), vec({1, 1, 2})})}},
        {1.0, {span({vec({1, 0, 0})}), span({vec({0, 1, 0})}), span({vec({0, 0, 1})})}},
    };

    using Pattern = MultiIndexSpace::Pattern;
    const Pattern first_atom_at_t1{std::vector<std::size_t>{0}, std::nullopt};
    const Pattern r_at_t2{std::nullopt, std::vector<std::size_t>{0}};
    sc.queries = {
        RetrodictionQuery{ContextRef{0, {0}}, ContextRef{1, {0}}, ContextRef{2, {0}}},
        ChProbabilityQuery{{{0, 2}, first_atom_at_t1, r_at_t2}},
        ChProbabilityQuery{{{1, 2}, first_atom_at_t1, r_at_t2}},
        ChProbabilityQuery{{{3, 2}, first_atom_at_t1, r_at_t2}},
        GcProbabilityQuery{{{0, 2}, first_atom_at_t1, r_at_t2}},
        BornQuery{ContextRef{2, {0}}},
    };
    return sc;
}

ContraryScan scan_contrary_pairs(const std::vector<Context>& contexts, std::size_t budget,
                                 double tol) {
    struct Entry {
        std::size_t context;
        std::uint64_t mask;
    };
    for (const auto& c : contexts) {
        if (c.size() > 62) {
            throw InputError("scan_contrary_pairs: context with more than 62 atoms");
        }
    }

    // Lazily extended list of (context, non-empty mask) in enumeration order.
    std::vector<Entry> entries;
    std::vector<Property> properties;
    std::vector<Projector> projectors;
    std::size_t next_context = 0;
    std::uint64_t next_mask = 1;
    const auto extend = [&]() -> bool {
        while (next_context < contexts.size()) {
            const auto& ctx = contexts[next_context];
            const std::uint64_t limit = std::uint64_t{1} << ctx.size();
            if (next_mask < limit) {
                IndexSet labels(ctx.size());
                for (std::size_t k = 0; k < ctx.size(); ++k) {
                    if (next_mask & (std::uint64_t{1} << k)) {
                        labels.insert(k);
                    }
                }
                entries.push_back({next_context, next_mask});
                properties.push_back(ctx.property(labels));
                projectors.push_back(properties.back().projector());
                ++next_mask;
                return true;
            }
            ++next_context;
            next_mask = 1;
        }
        return false;
    };

    ContraryScan scan;
    for (std::size_t j = 1;; ++j) {
        while (entries.size() <= j) {
            if (!extend()) {
                return scan;
            }
        }
        for (std::size_t i = 0; i < j; ++i) {
            if (scan.examined == budget) {
                scan.budget_exceeded = true;
                return scan;
            }
            ++scan.examined;
            if (is_contrary(projectors[i], projectors[j], tol)) {
                scan.pairs.push_back(
                    {properties[i], properties[j], entries[i].context, entries[j].context});
            }
        }
    }
}

StateDependenceWitness demonstrate_state_dependence(std::uint64_t seed, Tolerances tol,
                                                    std::size_t max_trials) {
    const auto loaded = load_scenario(three_box_scenario(), tol.tol);
    const HistoryFamily family(loaded.spec.reference_time,
                               select_contexts(loaded, {0, 2}, "/contexts"), loaded.propagator,
                               tol.tol);
    const auto fixture = check_consistency(family, loaded.state, tol.consistency);

    Rng rng(seed);
    for (std::size_t trial = 1; trial <= max_trials; ++trial) {
        const CVector psi = random_unit_vector(3, rng);
        const auto report = check_consistency(family, State::from_pure(psi), tol.consistency);
        if (!report.consistent) {
            return {fixture.max_off_diagonal, psi, report.max_off_diagonal, trial};
        }
    }
    throw NumericalError("no inconsistent state found within the trial budget");
}

}  // namespace qhist
