#include "qhist/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace qhist {

namespace {

// Decoding ------------------------------------------------------------------

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at(const std::string& path, std::size_t index) {
    return path + "/" + std::to_string(index);
}

const Json& require_object(const Json& j, const std::string& path,
                           std::initializer_list<const char*> required,
                           std::initializer_list<const char*> optional = {}) {
    if (!j.is_object()) {
        throw ScenarioError(path, "expected an object");
    }
    std::set<std::string> allowed;
    for (const char* k : required) {
        allowed.insert(k);
        if (!j.contains(k)) {
            throw ScenarioError(at(path, k), "missing required field");
        }
    }
    for (const char* k : optional) {
        allowed.insert(k);
    }
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            throw ScenarioError(at(path, key), "unknown field");
        }
    }
    return j;
}

const Json& require_array(const Json& j, const std::string& path) {
    if (!j.is_array()) {
        throw ScenarioError(path, "expected an array");
    }
    return j;
}

double read_real(const Json& j, const std::string& path) {
    if (!j.is_number()) {
        throw ScenarioError(path, "expected a number");
    }
    return j.get<double>();
}

std::size_t read_index(const Json& j, const std::string& path) {
    if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<long long>() < 0)) {
        throw ScenarioError(path, "expected a non-negative integer");
    }
    return j.get<std::size_t>();
}

std::string read_string(const Json& j, const std::string& path) {
    if (!j.is_string()) {
        throw ScenarioError(path, "expected a string");
    }
    return j.get<std::string>();
}

Complex read_complex(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) {
        throw ScenarioError(path, "expected a complex number as [re, im]");
    }
    return {read_real(j[0], at(path, 0)), read_real(j[1], at(path, 1))};
}

CVector read_vector(const Json& j, const std::string& path) {
    require_array(j, path);
    if (j.empty()) {
        throw ScenarioError(path, "vector is empty");
    }
    CVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = read_complex(j[i], at(path, i));
    }
    return v;
}

CMatrix read_matrix(const Json& j, const std::string& path) {
    require_array(j, path);
    if (j.empty()) {
        throw ScenarioError(path, "matrix is empty");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = require_array(j[0], at(path, 0)).size();
    CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row_path = at(path, r);
        require_array(j[r], row_path);
        if (j[r].size() != cols) {
            throw ScenarioError(row_path, "ragged matrix row");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                read_complex(j[r][c], at(row_path, c));
        }
    }
    return m;
}

std::vector<std::size_t> read_indices(const Json& j, const std::string& path) {
    require_array(j, path);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(read_index(j[i], at(path, i)));
    }
    return out;
}

/// {"vectors": [...]} or {"matrix": [...]}, optionally with extra allowed keys.
ProjectorForm read_form(const Json& j, const std::string& path) {
    if (j.contains("vectors") == j.contains("matrix")) {
        throw ScenarioError(path, "exactly one of \"vectors\" or \"matrix\" is required");
    }
    if (j.contains("vectors")) {
        const auto& vs = require_array(j["vectors"], at(path, "vectors"));
        if (vs.empty()) {
            throw ScenarioError(at(path, "vectors"), "at least one vector is required");
        }
        std::vector<CVector> out;
        for (std::size_t i = 0; i < vs.size(); ++i) {
            out.push_back(read_vector(vs[i], at(at(path, "vectors"), i)));
        }
        return out;
    }
    return read_matrix(j["matrix"], at(path, "matrix"));
}

ProjectorRef read_ref(const Json& j, const std::string& path) {
    if (!j.is_object()) {
        throw ScenarioError(path, "expected an object");
    }
    if (j.contains("context")) {
        require_object(j, path, {"context", "atoms"});
        return ContextRef{read_index(j["context"], at(path, "context")),
                          read_indices(j["atoms"], at(path, "atoms"))};
    }
    require_object(j, path, {"time"}, {"vectors", "matrix"});
    return InlineRef{read_real(j["time"], at(path, "time")), read_form(j, path)};
}

MultiIndexSpace::Pattern read_pattern(const Json& j, const std::string& path) {
    require_array(j, path);
    MultiIndexSpace::Pattern out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].is_null()) {
            out.emplace_back(std::nullopt);
        } else {
            out.emplace_back(read_indices(j[i], at(path, i)));
        }
    }
    return out;
}

HistoryQuery read_history_query(const Json& j, const std::string& path) {
    require_object(j, path, {"type", "event"}, {"contexts", "given"});
    HistoryQuery q;
    if (j.contains("contexts")) {
        q.contexts = read_indices(j["contexts"], at(path, "contexts"));
    }
    q.event = read_pattern(j["event"], at(path, "event"));
    if (j.contains("given")) {
        q.given = read_pattern(j["given"], at(path, "given"));
    }
    return q;
}

Query read_query(const Json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type")) {
        throw ScenarioError(at(path, "type"), "query type is required");
    }
    const std::string type = read_string(j["type"], at(path, "type"));
    if (type == "born") {
        require_object(j, path, {"type", "property"});
        return BornQuery{read_ref(j["property"], at(path, "property"))};
    }
    if (type == "conditional") {
        require_object(j, path, {"type", "p", "r"});
        return ConditionalQuery{read_ref(j["p"], at(path, "p")), read_ref(j["r"], at(path, "r"))};
    }
    if (type == "gc_probability") {
        return GcProbabilityQuery{read_history_query(j, path)};
    }
    if (type == "ch_probability") {
        return ChProbabilityQuery{read_history_query(j, path)};
    }
    if (type == "retrodiction") {
        require_object(j, path, {"type", "p", "q", "r"});
        return RetrodictionQuery{read_ref(j["p"], at(path, "p")), read_ref(j["q"], at(path, "q")),
                                 read_ref(j["r"], at(path, "r"))};
    }
    throw ScenarioError(at(path, "type"), "unknown query type \"" + type + "\"");
}

DynamicsSpec read_dynamics(const Json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ScenarioError(at(path, "kind"), "dynamics kind is required");
    }
    const std::string kind = read_string(j["kind"], at(path, "kind"));
    DynamicsSpec d;
    if (kind == "trivial") {
        require_object(j, path, {"kind"});
        d.mode = Propagator::Mode::trivial;
    } else if (kind == "hamiltonian") {
        require_object(j, path, {"kind", "matrix"});
        d.mode = Propagator::Mode::hamiltonian;
        d.hamiltonian = read_matrix(j["matrix"], at(path, "matrix"));
    } else if (kind == "explicit") {
        require_object(j, path, {"kind", "unitaries"});
        d.mode = Propagator::Mode::explicit_unitaries;
        const auto upath = at(path, "unitaries");
        const auto& us = require_array(j["unitaries"], upath);
        for (std::size_t i = 0; i < us.size(); ++i) {
            const auto p = at(upath, i);
            require_object(us[i], p, {"t_from", "t_to", "matrix"});
            d.steps.push_back({read_real(us[i]["t_from"], at(p, "t_from")),
                               read_real(us[i]["t_to"], at(p, "t_to")),
                               read_matrix(us[i]["matrix"], at(p, "matrix"))});
        }
    } else {
        throw ScenarioError(at(path, "kind"), "unknown dynamics kind \"" + kind + "\"");
    }
    return d;
}

// Encoding ------------------------------------------------------------------

Json vector_to_json(const CVector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(complex_to_json(v[i]));
    }
    return out;
}

Json matrix_to_json(const CMatrix& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(complex_to_json(m(r, c)));
        }
        out.push_back(std::move(row));
    }
    return out;
}

void put_form(Json& out, const ProjectorForm& form) {
    if (const auto* vs = std::get_if<std::vector<CVector>>(&form)) {
        Json arr = Json::array();
        for (const auto& v : *vs) {
            arr.push_back(vector_to_json(v));
        }
        out["vectors"] = std::move(arr);
    } else {
        out["matrix"] = matrix_to_json(std::get<CMatrix>(form));
    }
}

Json ref_to_json(const ProjectorRef& ref) {
    Json out = Json::object();
    if (const auto* c = std::get_if<ContextRef>(&ref)) {
        out["context"] = c->context;
        out["atoms"] = c->atoms;
    } else {
        const auto& inl = std::get<InlineRef>(ref);
        out["time"] = inl.time;
        put_form(out, inl.form);
    }
    return out;
}

Json pattern_to_json(const MultiIndexSpace::Pattern& p) {
    Json out = Json::array();
    for (const auto& slot : p) {
        out.push_back(slot ? Json(*slot) : Json(nullptr));
    }
    return out;
}

Json query_to_json(const Query& query) {
    Json out = Json::object();
    out["type"] = query_type(query);
    std::visit(
        [&](const auto& q) {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, BornQuery>) {
                out["property"] = ref_to_json(q.property);
            } else if constexpr (std::is_same_v<T, ConditionalQuery>) {
                out["p"] = ref_to_json(q.p);
                out["r"] = ref_to_json(q.r);
            } else if constexpr (std::is_same_v<T, RetrodictionQuery>) {
                out["p"] = ref_to_json(q.p);
                out["q"] = ref_to_json(q.q);
                out["r"] = ref_to_json(q.r);
            } else {
                out["contexts"] = q.contexts;
                out["event"] = pattern_to_json(q.event);
                if (q.given) {
                    out["given"] = pattern_to_json(*q.given);
                }
            }
        },
        query);
    return out;
}

void write_double(std::string& out, double x) {
    if (!std::isfinite(x)) {
        out += "null";
        return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    if (s.find_first_of(".eE") == std::string::npos) {
        s += ".0";
    }
    out += s;
}

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void write(std::string& out, const Json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {  // std::map: sorted keys
                if (!first) {
                    out += ",\n";
                }
                first = false;
                out += pad;
                out += Json(key).dump();
                out += ": ";
                write(out, value, depth + 1);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            const bool inline_array = std::all_of(j.begin(), j.end(), is_scalar) ||
                                      std::all_of(j.begin(), j.end(), [](const Json& e) {
                                          return e.is_array() && e.size() == 2 &&
                                                 e[0].is_number() && e[1].is_number();
                                      });
            if (inline_array) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i > 0) {
                        out += ", ";
                    }
                    write(out, j[i], depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i > 0) {
                    out += ",\n";
                }
                out += pad;
                write(out, j[i], depth + 1);
            }
            out += "\n" + close_pad + "]";
            return;
        }
        case Json::value_t::number_float:
            write_double(out, j.get<double>());
            return;
        default:
            out += j.dump();
            return;
    }
}

}  // namespace

Scenario scenario_from_json(const Json& doc) {
    require_object(doc, "",
                   {"schema_version", "dimension", "state", "dynamics", "reference_time",
                    "contexts"},
                   {"name", "queries"});
    Scenario s;
    s.schema_version = read_string(doc["schema_version"], "/schema_version");
    if (doc.contains("name")) {
        s.name = read_string(doc["name"], "/name");
    }
    s.dimension = read_index(doc["dimension"], "/dimension");

    const auto& state = doc["state"];
    if (!state.is_object() || state.contains("vector") == state.contains("density")) {
        throw ScenarioError("/state", "exactly one of \"vector\" or \"density\" is required");
    }
    if (state.contains("vector")) {
        require_object(state, "/state", {"vector"});
        s.state = read_vector(state["vector"], "/state/vector");
    } else {
        require_object(state, "/state", {"density"});
        s.state = read_matrix(state["density"], "/state/density");
    }

    s.dynamics = read_dynamics(doc["dynamics"], "/dynamics");
    s.reference_time = read_real(doc["reference_time"], "/reference_time");

    const auto& contexts = require_array(doc["contexts"], "/contexts");
    for (std::size_t i = 0; i < contexts.size(); ++i) {
        const auto path = at("/contexts", i);
        require_object(contexts[i], path, {"time", "atoms"});
        ContextSpec cs{read_real(contexts[i]["time"], at(path, "time")), {}};
        const auto& atoms = require_array(contexts[i]["atoms"], at(path, "atoms"));
        for (std::size_t k = 0; k < atoms.size(); ++k) {
            const auto apath = at(at(path, "atoms"), k);
            require_object(atoms[k], apath, {}, {"vectors", "matrix"});
            cs.atoms.push_back(read_form(atoms[k], apath));
        }
        s.contexts.push_back(std::move(cs));
    }

    if (doc.contains("queries")) {
        const auto& queries = require_array(doc["queries"], "/queries");
        for (std::size_t i = 0; i < queries.size(); ++i) {
            s.queries.push_back(read_query(queries[i], at("/queries", i)));
        }
    }
    return s;
}

Json to_json(const Scenario& s) {
    Json doc = Json::object();
    doc["schema_version"] = s.schema_version;
    doc["name"] = s.name;
    doc["dimension"] = s.dimension;
    if (const auto* psi = std::get_if<CVector>(&s.state)) {
        doc["state"] = {{"vector", vector_to_json(*psi)}};
    } else {
        doc["state"] = {{"density", matrix_to_json(std::get<CMatrix>(s.state))}};
    }
    Json dyn = Json::object();
    dyn["kind"] = to_string(s.dynamics.mode);
    if (s.dynamics.mode == Propagator::Mode::hamiltonian) {
        dyn["matrix"] = matrix_to_json(s.dynamics.hamiltonian);
    } else if (s.dynamics.mode == Propagator::Mode::explicit_unitaries) {
        Json steps = Json::array();
        for (const auto& st : s.dynamics.steps) {
            steps.push_back(
                {{"t_from", st.from}, {"t_to", st.to}, {"matrix", matrix_to_json(st.unitary)}});
        }
        dyn["unitaries"] = std::move(steps);
    }
    doc["dynamics"] = std::move(dyn);
    doc["reference_time"] = s.reference_time;
    Json contexts = Json::array();
    for (const auto& cs : s.contexts) {
        Json atoms = Json::array();
        for (const auto& form : cs.atoms) {
            Json a = Json::object();
            put_form(a, form);
            atoms.push_back(std::move(a));
        }
        contexts.push_back({{"time", cs.time}, {"atoms", std::move(atoms)}});
    }
    doc["contexts"] = std::move(contexts);
    Json queries = Json::array();
    for (const auto& q : s.queries) {
        queries.push_back(query_to_json(q));
    }
    doc["queries"] = std::move(queries);
    return doc;
}

LoadedScenario parse_and_load(std::string_view text, double tol) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ScenarioError("", std::string("JSON syntax error: ") + e.what());
    }
    return load_scenario(scenario_from_json(doc), tol);
}

Scenario parse_scenario(std::string_view text, double tol) {
    return parse_and_load(text, tol).spec;
}

std::string serialize_json(const Json& doc) {
    std::string out;
    write(out, doc, 0);
    out += "\n";
    return out;
}

std::string serialize(const Scenario& s) { return serialize_json(to_json(s)); }

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Outcome& o) {
    Json out = Json::object();
    out["defined"] = o.defined();
    if (o.defined()) {
        out["value"] = clamp_probability(*o.value);
    } else {
        out["reason"] = o.reason ? to_string(*o.reason) : "unknown";
        out["residual"] = o.residual;
    }
    return out;
}

Json to_json(const RetrodictionReport& r) {
    Json out = Json::object();
    out["scenario"] = r.scenario_id;
    out["contrary"] = r.contrary;
    out["conclusion"] = to_string(r.conclusion);
    Json ch = Json::array();
    for (const auto& f : r.ch_results) {
        ch.push_back({{"family", f.label},
                      {"consistent", f.consistent},
                      {"max_off_diagonal", f.max_off_diagonal},
                      {"conditional", to_json(f.conditional)}});
    }
    out["consistent_histories"] = std::move(ch);
    Json checks = Json::array();
    for (const auto& c : r.gc_checks) {
        checks.push_back(
            {{"pair", c.pair}, {"commutator_norm", c.norm}, {"commutes", c.commutes}});
    }
    Json conditionals = Json::array();
    for (const auto& o : r.gc_conditionals) {
        conditionals.push_back(to_json(o));
    }
    out["generalized_contexts"] = {{"compatible", r.gc_compatible},
                                   {"checks", std::move(checks)},
                                   {"conditionals", std::move(conditionals)}};
    return out;
}

Json to_json(const IncompatibleVerdict& v) {
    Json pairs = Json::array();
    for (const auto& p : v.pairs) {
        pairs.push_back({{"context_a", p.context_a},
                         {"atom_a", p.atom_a},
                         {"context_b", p.context_b},
                         {"atom_b", p.atom_b},
                         {"commutator_norm", p.norm},
                         {"marginal", p.marginal}});
    }
    return {{"compatible", false}, {"max_commutator_norm", v.max_norm()}, {"pairs", pairs}};
}

Json to_json(const ConsistencyReport& c, const MultiIndexSpace& space) {
    Json out = Json::object();
    out["consistent"] = c.consistent;
    out["max_off_diagonal"] = c.max_off_diagonal;
    out["tolerance"] = c.tolerance;
    if (c.worst_alpha != c.worst_beta) {
        out["worst_pair"] = {space.unflatten(c.worst_alpha), space.unflatten(c.worst_beta)};
    } else {
        out["worst_pair"] = nullptr;
    }
    return out;
}

std::string serialize_report(const RetrodictionReport& r) { return serialize_json(to_json(r)); }

}  // namespace qhist
