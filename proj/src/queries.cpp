#include "qhist/queries.hpp"

#include <type_traits>

namespace qhist {

namespace {

Json undefined_json(const UndefinedProbability& e) {
    Outcome o;
    o.reason = e.reason();
    o.residual = e.residual();
    return to_json(o);
}

Json value_json(double v) {
    Outcome o;
    o.value = v;
    return to_json(o);
}

IndexSet event_set(const MultiIndexSpace& space, const std::optional<MultiIndexSpace::Pattern>& p) {
    return p ? space.product(*p) : IndexSet::full(space.size());
}

Json atoms_json(const GeneralizedContext& gc) {
    Json atoms = Json::array();
    for (std::size_t flat = 0; flat < gc.atoms().size(); ++flat) {
        atoms.push_back({{"history", gc.space().unflatten(flat)},
                         {"rank", gc.atoms()[flat].rank()},
                         {"zero", gc.is_zero_atom(flat)}});
    }
    return atoms;
}

Json gc_probability(const LoadedScenario& s, const HistoryQuery& q, const std::string& path,
                    Tolerances tol) {
    auto result = build_generalized_context(s.spec.reference_time,
                                            select_contexts(s, q.contexts, path + "/contexts"),
                                            s.propagator, tol.tol);
    Json out = Json::object();
    out["compatible"] = result.compatible();
    if (!result.compatible()) {
        const auto& v = result.verdict();
        out["verdict"] = to_json(v);
        Outcome o;
        o.reason = UndefinedReason::non_commuting;
        o.residual = v.max_norm();
        out["outcome"] = to_json(o);
        return out;
    }
    const auto& gc = result.context();
    const auto event = gc.property(gc.space().product(q.event));
    try {
        if (q.given) {
            const auto given = gc.property(gc.space().product(*q.given));
            out["outcome"] = value_json(generalized_conditional(s.state, event, given, tol.tol));
        } else {
            out["outcome"] = value_json(generalized_probability(s.state, event));
        }
    } catch (const UndefinedProbability& e) {
        out["outcome"] = undefined_json(e);
    }
    return out;
}

Json ch_probability(const LoadedScenario& s, const HistoryQuery& q, const std::string& path,
                    Tolerances tol) {
    const HistoryFamily family(s.spec.reference_time,
                               select_contexts(s, q.contexts, path + "/contexts"), s.propagator,
                               tol.tol);
    const auto d = decoherence_functional(family, s.state);
    const auto report = check_consistency(d, tol.consistency);
    Json out = Json::object();
    out["consistency"] = to_json(report, family.space());
    try {
        out["outcome"] = value_json(family_conditional(
            family, s.state, family.space().product(q.event),
            event_set(family.space(), q.given), tol.consistency, tol.tol));
    } catch (const UndefinedProbability& e) {
        out["outcome"] = undefined_json(e);
    }
    return out;
}

}  // namespace

Json evaluate_query(const LoadedScenario& s, std::size_t index, Tolerances tol) {
    if (index >= s.spec.queries.size()) {
        throw InputError("query index " + std::to_string(index) + " out of range (" +
                         std::to_string(s.spec.queries.size()) + " queries)");
    }
    const auto& query = s.spec.queries[index];
    const std::string path = "/queries/" + std::to_string(index);
    Json out = std::visit(
        [&](const auto& q) -> Json {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, BornQuery>) {
                const auto p = resolve(s, q.property, path + "/property", tol.tol);
                const auto p0 = heisenberg_translate(p.projector, s.propagator, p.time,
                                                     s.spec.reference_time, tol.tol);
                return {{"time", p.time},
                        {"probability", clamp_probability(born_probability(s.state, p0))}};
            } else if constexpr (std::is_same_v<T, ConditionalQuery>) {
                const auto p = resolve(s, q.p, path + "/p", tol.tol);
                const auto r = resolve(s, q.r, path + "/r", tol.tol);
                const auto t0 = s.spec.reference_time;
                const auto p0 = heisenberg_translate(p.projector, s.propagator, p.time, t0, tol.tol);
                const auto r0 = heisenberg_translate(r.projector, s.propagator, r.time, t0, tol.tol);
                Json res = Json::object();
                res["commutator_norm"] = commutator_norm(p0.matrix(), r0.matrix());
                try {
                    res["outcome"] = value_json(conditional_probability(s.state, p0, r0, tol.tol));
                } catch (const UndefinedProbability& e) {
                    res["outcome"] = undefined_json(e);
                }
                return res;
            } else if constexpr (std::is_same_v<T, GcProbabilityQuery>) {
                return gc_probability(s, q, path, tol);
            } else if constexpr (std::is_same_v<T, ChProbabilityQuery>) {
                return ch_probability(s, q, path, tol);
            } else {
                const auto p = resolve(s, q.p, path + "/p", tol.tol);
                const auto qq = resolve(s, q.q, path + "/q", tol.tol);
                const auto r = resolve(s, q.r, path + "/r", tol.tol);
                const RetrodictionInput in{s.spec.name, s.state, s.spec.reference_time,
                                           p.projector, qq.projector, p.time,
                                           r.projector, r.time};
                return {{"report", to_json(analyze_retrodiction(in, s.propagator, tol))}};
            }
        },
        query);
    out["query"] = index;
    out["type"] = query_type(query);
    return out;
}

Json gc_build_report(const LoadedScenario& s, const std::vector<std::size_t>& contexts,
                     Tolerances tol) {
    auto result = build_generalized_context(
        s.spec.reference_time, select_contexts(s, contexts, "--contexts"), s.propagator, tol.tol);
    if (!result.compatible()) {
        return to_json(result.verdict());
    }
    return {{"compatible", true}, {"atoms", atoms_json(result.context())}};
}

Json ch_check_report(const LoadedScenario& s, const std::vector<std::size_t>& contexts,
                     Tolerances tol) {
    const HistoryFamily family(s.spec.reference_time, select_contexts(s, contexts, "--contexts"),
                               s.propagator, tol.tol);
    const auto d = decoherence_functional(family, s.state);
    Json histories = Json::array();
    for (std::size_t a = 0; a < family.space().size(); ++a) {
        histories.push_back(
            {{"history", family.space().unflatten(a)}, {"weight", d.diagonal(a)}});
    }
    Json matrix = Json::array();
    for (Eigen::Index a = 0; a < d.values().rows(); ++a) {
        Json row = Json::array();
        for (Eigen::Index b = 0; b < d.values().cols(); ++b) {
            row.push_back(complex_to_json(d.values()(a, b)));
        }
        matrix.push_back(std::move(row));
    }
    return {{"consistency", to_json(check_consistency(d, tol.consistency), family.space())},
            {"histories", std::move(histories)},
            {"decoherence_matrix", std::move(matrix)}};
}

Json scan_report(const LoadedScenario& s, const std::vector<std::size_t>& contexts,
                 std::size_t budget, Tolerances tol) {
    std::vector<Context> selected;
    std::vector<std::size_t> origin;
    if (contexts.empty()) {
        for (std::size_t i = 0; i < s.contexts.size(); ++i) {
            selected.push_back(s.contexts[i].context);
            origin.push_back(i);
        }
    } else {
        for (auto i : contexts) {
            if (i >= s.contexts.size()) {
                throw InputError("--contexts: index " + std::to_string(i) + " out of range");
            }
            selected.push_back(s.contexts[i].context);
            origin.push_back(i);
        }
    }
    const auto scan = scan_contrary_pairs(selected, budget, tol.tol);
    Json pairs = Json::array();
    for (const auto& p : scan.pairs) {
        pairs.push_back({{"first", {{"context", origin[p.first_context]},
                                    {"atoms", p.first.labels().members()}}},
                         {"second", {{"context", origin[p.second_context]},
                                     {"atoms", p.second.labels().members()}}}});
    }
    return {{"pairs", std::move(pairs)},
            {"examined", scan.examined},
            {"budget", budget},
            {"budget_exceeded", scan.budget_exceeded}};
}

Json three_box_demo(Tolerances tol) {
    const auto loaded = load_scenario(three_box_scenario(), tol.tol);
    Json results = Json::array();
    for (std::size_t i = 0; i < loaded.spec.queries.size(); ++i) {
        results.push_back(evaluate_query(loaded, i, tol));
    }
    return {{"scenario", loaded.spec.name}, {"results", std::move(results)}};
}

Json state_dependence_demo(std::uint64_t seed, Tolerances tol) {
    const auto w = demonstrate_state_dependence(seed, tol);
    Json psi = Json::array();
    for (Eigen::Index i = 0; i < w.random_state.size(); ++i) {
        psi.push_back(complex_to_json(w.random_state[i]));
    }
    return {{"family", "three-box p-family"},
            {"fixture_state", {{"consistent", w.fixture_off_diagonal <= tol.consistency},
                               {"max_off_diagonal", w.fixture_off_diagonal}}},
            {"random_state", {{"vector", std::move(psi)},
                              {"consistent", false},
                              {"max_off_diagonal", w.random_off_diagonal}}},
            {"seed", seed},
            {"trials", w.trials}};
}

}  // namespace qhist
