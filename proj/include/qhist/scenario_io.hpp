#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "qhist/histories.hpp"
#include "qhist/inference.hpp"
#include "qhist/scenario.hpp"

namespace qhist {

using Json = nlohmann::json;

/// Structural decoding only: every key checked, unknown keys rejected, errors
/// located by JSON pointer. Numbers are not validated here.
Scenario scenario_from_json(const Json& doc);
Json to_json(const Scenario& s);

/// Parse and validate (load_scenario) a UTF-8 JSON document. Throws
/// ScenarioError for syntax errors, schema violations and validator failures.
Scenario parse_scenario(std::string_view text, double tol = kDefaultTolerance);
LoadedScenario parse_and_load(std::string_view text, double tol = kDefaultTolerance);

/// Deterministic text: keys sorted, doubles at 17 significant digits (always
/// with a decimal point or exponent), arrays of scalars on one line,
/// two-space indentation, trailing newline.
std::string serialize_json(const Json& doc);
std::string serialize(const Scenario& s);

Json to_json(const Outcome& o);
Json to_json(const RetrodictionReport& r);
Json to_json(const IncompatibleVerdict& v);
Json to_json(const ConsistencyReport& c, const MultiIndexSpace& space);
Json complex_to_json(Complex z);

std::string serialize_report(const RetrodictionReport& r);

}  // namespace qhist
