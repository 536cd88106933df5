#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qhist/consistent.hpp"
#include "qhist/contexts.hpp"
#include "qhist/error.hpp"
#include "qhist/histories.hpp"
#include "qhist/index_set.hpp"
#include "qhist/linalg.hpp"

namespace qhist {

inline constexpr const char* kSchemaVersion = "1";

struct Tolerances {
    double tol = kDefaultTolerance;
    double consistency = kDefaultTolerance;
};

/// InputError located at a JSON pointer inside a scenario document.
class ScenarioError : public InputError {
public:
    ScenarioError(std::string path, const std::string& message)
        : InputError(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Authored forms. These keep exactly what the document said so that
// serialization reproduces it; validation happens in load_scenario.

/// Either the span of a list of vectors or an explicit projector matrix.
using ProjectorForm = std::variant<std::vector<CVector>, CMatrix>;
/// Either a pure state vector or a density matrix.
using StateForm = std::variant<CVector, CMatrix>;

struct ContextSpec {
    Time time;
    std::vector<ProjectorForm> atoms;
};

struct DynamicsSpec {
    Propagator::Mode mode = Propagator::Mode::trivial;
    CMatrix hamiltonian;
    std::vector<Propagator::Step> steps;
};

/// A property named by context index and a subset of its atom labels.
struct ContextRef {
    std::size_t context;
    std::vector<std::size_t> atoms;
};

/// A property given inline, attached to a time.
struct InlineRef {
    Time time;
    ProjectorForm form;
};

using ProjectorRef = std::variant<ContextRef, InlineRef>;

struct BornQuery {
    ProjectorRef property;
};

struct ConditionalQuery {
    ProjectorRef p;
    ProjectorRef r;
};

/// Shared by gc_probability and ch_probability: choose contexts (empty = all,
/// in document order), then an event and optional condition as per-position
/// label patterns.
struct HistoryQuery {
    std::vector<std::size_t> contexts;
    MultiIndexSpace::Pattern event;
    std::optional<MultiIndexSpace::Pattern> given;
};

struct GcProbabilityQuery : HistoryQuery {};
struct ChProbabilityQuery : HistoryQuery {};

struct RetrodictionQuery {
    ProjectorRef p;
    ProjectorRef q;
    ProjectorRef r;
};

using Query = std::variant<BornQuery, ConditionalQuery, GcProbabilityQuery, ChProbabilityQuery,
                           RetrodictionQuery>;

const char* query_type(const Query& q);

struct Scenario {
    std::string schema_version = kSchemaVersion;
    std::string name;
    std::size_t dimension = 0;
    StateForm state;
    DynamicsSpec dynamics;
    Time reference_time = 0.0;
    std::vector<ContextSpec> contexts;
    std::vector<Query> queries;
};

/// Exact structural equality (bitwise on every number).
bool operator==(const Scenario& a, const Scenario& b);

/// A scenario whose matrices have all passed their validators.
struct LoadedScenario {
    Scenario spec;
    State state;
    Propagator propagator;
    std::vector<TimedContext> contexts;
};

/// Validates every component; throws ScenarioError with the JSON pointer of
/// the first offending element.
LoadedScenario load_scenario(Scenario spec, double tol = kDefaultTolerance);

struct ResolvedProjector {
    Time time;
    Projector projector;
};

/// `path` is used to locate errors.
ResolvedProjector resolve(const LoadedScenario& s, const ProjectorRef& ref, const std::string& path,
                          double tol = kDefaultTolerance);

/// Selected contexts in the given order (all, when `indices` is empty).
std::vector<TimedContext> select_contexts(const LoadedScenario& s,
                                          const std::vector<std::size_t>& indices,
                                          const std::string& path);

}  // namespace qhist
