#include "qhist/scenario.hpp"

#include <cmath>
#include <type_traits>

namespace qhist {

namespace {

bool same_matrix(const CMatrix& a, const CMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

bool same_vector(const CVector& a, const CVector& b) {
    return a.size() == b.size() && (a.size() == 0 || a == b);
}

bool same_form(const ProjectorForm& a, const ProjectorForm& b) {
    if (a.index() != b.index()) {
        return false;
    }
    if (const auto* va = std::get_if<std::vector<CVector>>(&a)) {
        const auto& vb = std::get<std::vector<CVector>>(b);
        if (va->size() != vb.size()) {
            return false;
        }
        for (std::size_t i = 0; i < va->size(); ++i) {
            if (!same_vector((*va)[i], vb[i])) {
                return false;
            }
        }
        return true;
    }
    return same_matrix(std::get<CMatrix>(a), std::get<CMatrix>(b));
}

bool same_ref(const ProjectorRef& a, const ProjectorRef& b) {
    if (a.index() != b.index()) {
        return false;
    }
    if (const auto* ca = std::get_if<ContextRef>(&a)) {
        const auto& cb = std::get<ContextRef>(b);
        return ca->context == cb.context && ca->atoms == cb.atoms;
    }
    const auto& ia = std::get<InlineRef>(a);
    const auto& ib = std::get<InlineRef>(b);
    return ia.time == ib.time && same_form(ia.form, ib.form);
}

bool same_history_query(const HistoryQuery& a, const HistoryQuery& b) {
    return a.contexts == b.contexts && a.event == b.event && a.given == b.given;
}

bool same_query(const Query& a, const Query& b) {
    if (a.index() != b.index()) {
        return false;
    }
    return std::visit(
        [&](const auto& qa) -> bool {
            using T = std::decay_t<decltype(qa)>;
            const auto& qb = std::get<T>(b);
            if constexpr (std::is_same_v<T, BornQuery>) {
                return same_ref(qa.property, qb.property);
            } else if constexpr (std::is_same_v<T, ConditionalQuery>) {
                return same_ref(qa.p, qb.p) && same_ref(qa.r, qb.r);
            } else if constexpr (std::is_same_v<T, RetrodictionQuery>) {
                return same_ref(qa.p, qb.p) && same_ref(qa.q, qb.q) && same_ref(qa.r, qb.r);
            } else {
                return same_history_query(qa, qb);
            }
        },
        a);
}

Projector build_projector(const ProjectorForm& form, std::size_t dim, const std::string& path,
                          double tol) {
    try {
        if (const auto* vs = std::get_if<std::vector<CVector>>(&form)) {
            for (std::size_t i = 0; i < vs->size(); ++i) {
                if (static_cast<std::size_t>((*vs)[i].size()) != dim) {
                    throw ScenarioError(path + "/vectors/" + std::to_string(i),
                                        "vector length " + std::to_string((*vs)[i].size()) +
                                            " does not match dimension " + std::to_string(dim));
                }
            }
            return projector_from_vectors(*vs, tol);
        }
        const auto& m = std::get<CMatrix>(form);
        if (static_cast<std::size_t>(m.rows()) != dim || m.rows() != m.cols()) {
            throw ScenarioError(path + "/matrix", "matrix shape does not match dimension " +
                                                      std::to_string(dim));
        }
        return Projector::from_matrix(m, tol);
    } catch (const ScenarioError&) {
        throw;
    } catch (const InputError& e) {
        throw ScenarioError(path, e.what());
    }
}

void check_context_index(const LoadedScenario& s, std::size_t index, const std::string& path) {
    if (index >= s.contexts.size()) {
        throw ScenarioError(path, "context index " + std::to_string(index) + " out of range (" +
                                      std::to_string(s.contexts.size()) + " contexts)");
    }
}

void check_pattern(const LoadedScenario& s, const std::vector<std::size_t>& indices,
                   const MultiIndexSpace::Pattern& pattern, const std::string& path) {
    const std::size_t positions = indices.empty() ? s.contexts.size() : indices.size();
    if (pattern.size() != positions) {
        throw ScenarioError(path, "pattern has " + std::to_string(pattern.size()) +
                                      " slots for " + std::to_string(positions) + " contexts");
    }
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (!pattern[i]) {
            continue;
        }
        const std::size_t ctx = indices.empty() ? i : indices[i];
        for (std::size_t j = 0; j < pattern[i]->size(); ++j) {
            if ((*pattern[i])[j] >= s.contexts[ctx].context.size()) {
                throw ScenarioError(path + "/" + std::to_string(i) + "/" + std::to_string(j),
                                    "atom label out of range for context " + std::to_string(ctx));
            }
        }
    }
}

void check_query(const LoadedScenario& s, const Query& query, const std::string& path,
                 double tol) {
    std::visit(
        [&](const auto& q) {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, BornQuery>) {
                resolve(s, q.property, path + "/property", tol);
            } else if constexpr (std::is_same_v<T, ConditionalQuery>) {
                resolve(s, q.p, path + "/p", tol);
                resolve(s, q.r, path + "/r", tol);
            } else if constexpr (std::is_same_v<T, RetrodictionQuery>) {
                const auto p = resolve(s, q.p, path + "/p", tol);
                const auto qq = resolve(s, q.q, path + "/q", tol);
                const auto r = resolve(s, q.r, path + "/r", tol);
                if (p.time != qq.time) {
                    throw ScenarioError(path + "/q", "p and q must refer to the same time");
                }
                if (!(p.time < r.time)) {
                    throw ScenarioError(path + "/r", "r must refer to a time after p and q");
                }
            } else {
                select_contexts(s, q.contexts, path + "/contexts");
                check_pattern(s, q.contexts, q.event, path + "/event");
                if (q.given) {
                    check_pattern(s, q.contexts, *q.given, path + "/given");
                }
            }
        },
        query);
}

}  // namespace

const char* query_type(const Query& q) {
    switch (q.index()) {
        case 0: return "born";
        case 1: return "conditional";
        case 2: return "gc_probability";
        case 3: return "ch_probability";
        case 4: return "retrodiction";
    }
    return "unknown";
}

bool operator==(const Scenario& a, const Scenario& b) {
    if (a.schema_version != b.schema_version || a.name != b.name || a.dimension != b.dimension ||
        a.reference_time != b.reference_time || a.state.index() != b.state.index()) {
        return false;
    }
    if (const auto* va = std::get_if<CVector>(&a.state)) {
        if (!same_vector(*va, std::get<CVector>(b.state))) {
            return false;
        }
    } else if (!same_matrix(std::get<CMatrix>(a.state), std::get<CMatrix>(b.state))) {
        return false;
    }
    const auto& da = a.dynamics;
    const auto& db = b.dynamics;
    if (da.mode != db.mode || !same_matrix(da.hamiltonian, db.hamiltonian) ||
        da.steps.size() != db.steps.size()) {
        return false;
    }
    for (std::size_t i = 0; i < da.steps.size(); ++i) {
        if (da.steps[i].from != db.steps[i].from || da.steps[i].to != db.steps[i].to ||
            !same_matrix(da.steps[i].unitary, db.steps[i].unitary)) {
            return false;
        }
    }
    if (a.contexts.size() != b.contexts.size() || a.queries.size() != b.queries.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.contexts.size(); ++i) {
        const auto& ca = a.contexts[i];
        const auto& cb = b.contexts[i];
        if (ca.time != cb.time || ca.atoms.size() != cb.atoms.size()) {
            return false;
        }
        for (std::size_t k = 0; k < ca.atoms.size(); ++k) {
            if (!same_form(ca.atoms[k], cb.atoms[k])) {
                return false;
            }
        }
    }
    for (std::size_t i = 0; i < a.queries.size(); ++i) {
        if (!same_query(a.queries[i], b.queries[i])) {
            return false;
        }
    }
    return true;
}

LoadedScenario load_scenario(Scenario spec, double tol) {
    if (spec.schema_version != kSchemaVersion) {
        throw ScenarioError("/schema_version", "unsupported schema version \"" +
                                                   spec.schema_version + "\" (expected \"" +
                                                   kSchemaVersion + "\")");
    }
    const std::size_t dim = spec.dimension;
    if (dim == 0) {
        throw ScenarioError("/dimension", "dimension must be positive");
    }
    if (!std::isfinite(spec.reference_time)) {
        throw ScenarioError("/reference_time", "reference time must be finite");
    }

    std::optional<State> state;
    try {
        if (const auto* psi = std::get_if<CVector>(&spec.state)) {
            if (static_cast<std::size_t>(psi->size()) != dim) {
                throw InputError("state vector length does not match dimension");
            }
            state = State::from_pure(*psi, tol);
        } else {
            const auto& rho = std::get<CMatrix>(spec.state);
            if (static_cast<std::size_t>(rho.rows()) != dim || rho.rows() != rho.cols()) {
                throw InputError("density matrix shape does not match dimension");
            }
            state = State::from_density(rho, tol);
        }
    } catch (const InputError& e) {
        throw ScenarioError("/state", e.what());
    }

    std::optional<Propagator> propagator;
    try {
        switch (spec.dynamics.mode) {
            case Propagator::Mode::trivial:
                propagator = Propagator::trivial(dim);
                break;
            case Propagator::Mode::hamiltonian:
                if (static_cast<std::size_t>(spec.dynamics.hamiltonian.rows()) != dim) {
                    throw InputError("Hamiltonian shape does not match dimension");
                }
                propagator = Propagator::from_hamiltonian(spec.dynamics.hamiltonian, tol);
                break;
            case Propagator::Mode::explicit_unitaries:
                propagator = Propagator::from_unitaries(dim, spec.dynamics.steps, tol);
                break;
        }
    } catch (const InputError& e) {
        throw ScenarioError("/dynamics", e.what());
    }

    std::vector<TimedContext> contexts;
    for (std::size_t i = 0; i < spec.contexts.size(); ++i) {
        const std::string path = "/contexts/" + std::to_string(i);
        const auto& cs = spec.contexts[i];
        if (!std::isfinite(cs.time)) {
            throw ScenarioError(path + "/time", "time must be finite");
        }
        std::vector<Projector> atoms;
        for (std::size_t k = 0; k < cs.atoms.size(); ++k) {
            atoms.push_back(
                build_projector(cs.atoms[k], dim, path + "/atoms/" + std::to_string(k), tol));
        }
        try {
            contexts.push_back({cs.time, validate_context(std::move(atoms), tol)});
        } catch (const ContextError& e) {
            throw ScenarioError(path + "/atoms", e.what());
        }
    }

    LoadedScenario loaded{std::move(spec), std::move(*state), std::move(*propagator),
                          std::move(contexts)};
    for (std::size_t i = 0; i < loaded.spec.queries.size(); ++i) {
        check_query(loaded, loaded.spec.queries[i], "/queries/" + std::to_string(i), tol);
    }
    return loaded;
}

ResolvedProjector resolve(const LoadedScenario& s, const ProjectorRef& ref, const std::string& path,
                          double tol) {
    if (const auto* c = std::get_if<ContextRef>(&ref)) {
        check_context_index(s, c->context, path + "/context");
        const auto& tc = s.contexts[c->context];
        IndexSet labels(tc.context.size());
        for (std::size_t j = 0; j < c->atoms.size(); ++j) {
            if (c->atoms[j] >= tc.context.size()) {
                throw ScenarioError(path + "/atoms/" + std::to_string(j),
                                    "atom label out of range for context " +
                                        std::to_string(c->context));
            }
            labels.insert(c->atoms[j]);
        }
        return {tc.time, tc.context.property(labels).projector()};
    }
    const auto& inl = std::get<InlineRef>(ref);
    if (!std::isfinite(inl.time)) {
        throw ScenarioError(path + "/time", "time must be finite");
    }
    return {inl.time, build_projector(inl.form, s.spec.dimension, path, tol)};
}

std::vector<TimedContext> select_contexts(const LoadedScenario& s,
                                          const std::vector<std::size_t>& indices,
                                          const std::string& path) {
    std::vector<TimedContext> out;
    if (indices.empty()) {
        out = s.contexts;
    } else {
        for (std::size_t i = 0; i < indices.size(); ++i) {
            check_context_index(s, indices[i], path + "/" + std::to_string(i));
            out.push_back(s.contexts[indices[i]]);
        }
    }
    if (out.empty()) {
        throw ScenarioError(path, "no contexts selected");
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i - 1].time < out[i].time)) {
            throw ScenarioError(path, "selected contexts must have strictly increasing times");
        }
    }
    return out;
}

}  // namespace qhist
