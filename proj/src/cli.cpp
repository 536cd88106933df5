#include "qhist/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qhist/queries.hpp"
#include "qhist/scenario_io.hpp"

namespace qhist::cli {

namespace {

struct Options {
    std::string output = "human";
    double tolerance = kDefaultTolerance;
    double consistency_tolerance = kDefaultTolerance;
    bool consistency_given = false;
    std::uint64_t seed = 1;
    std::string scenario_path;
    std::size_t query = 0;
    bool query_given = false;
    std::vector<std::size_t> contexts;
    std::size_t budget = kDefaultScanBudget;
    std::string demo;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot read scenario file \"" + path + "\"");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string six_digits(double x) {
    if (x == 0.0) {
        x = 0.0;  // drop the sign of negative zero
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void render_human(std::ostream& out, const Json& j, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
    const auto scalar = [](const Json& v) -> std::string {
        if (v.is_number_float()) {
            return six_digits(v.get<double>());
        }
        if (v.is_string()) {
            return v.get<std::string>();
        }
        return v.dump();
    };
    const auto flat_array = [&](const Json& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i ? ", " : "");
            s += v[i].is_array() ? "(" + scalar(v[i][0]) + ", " + scalar(v[i][1]) + ")"
                                 : scalar(v[i]);
        }
        return s + "]";
    };
    const auto is_flat = [](const Json& v) {
        return std::all_of(v.begin(), v.end(), [](const Json& e) {
            return !e.is_object() && (!e.is_array() || (e.size() == 2 && e[0].is_number()));
        });
    };
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (value.is_object() || (value.is_array() && !is_flat(value))) {
                out << pad << key << ":\n";
                render_human(out, value, depth + 1);
            } else if (value.is_array()) {
                out << pad << key << ": " << flat_array(value) << "\n";
            } else {
                out << pad << key << ": " << scalar(value) << "\n";
            }
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (j[i].is_object() || (j[i].is_array() && !is_flat(j[i]))) {
                out << pad << "- [" << i << "]\n";
                render_human(out, j[i], depth + 1);
            } else {
                out << pad << "- " << (j[i].is_array() ? flat_array(j[i]) : scalar(j[i])) << "\n";
            }
        }
    } else {
        out << pad << scalar(j) << "\n";
    }
}

void emit(std::ostream& out, const Options& opts, const Json& doc) {
    if (opts.output == "json") {
        out << serialize_json(doc);
    } else {
        render_human(out, doc, 0);
    }
}

const char* wanted_type(const std::string& command) {
    if (command == "born") return "born";
    if (command == "gc-prob") return "gc_probability";
    if (command == "ch-prob") return "ch_probability";
    if (command == "retrodict") return "retrodiction";
    return "";
}

Json query_results(const LoadedScenario& s, const std::string& command, const Options& opts,
                   Tolerances tol) {
    const std::string type = wanted_type(command);
    Json results = Json::array();
    if (opts.query_given) {
        if (opts.query >= s.spec.queries.size()) {
            throw InputError("--query " + std::to_string(opts.query) + " out of range (" +
                             std::to_string(s.spec.queries.size()) + " queries)");
        }
        if (query_type(s.spec.queries[opts.query]) != type) {
            throw InputError("query " + std::to_string(opts.query) + " has type \"" +
                             query_type(s.spec.queries[opts.query]) + "\", expected \"" + type +
                             "\"");
        }
        results.push_back(evaluate_query(s, opts.query, tol));
        return results;
    }
    for (std::size_t i = 0; i < s.spec.queries.size(); ++i) {
        if (query_type(s.spec.queries[i]) == type) {
            results.push_back(evaluate_query(s, i, tol));
        }
    }
    return results;
}

Json execute(const std::string& command, const Options& opts, Tolerances tol) {
    Json doc = Json::object();
    doc["command"] = command;
    doc["schema_version"] = kSchemaVersion;
    if (command == "demo") {
        doc["demo"] = opts.demo;
        if (opts.demo == "three-box") {
            doc["result"] = three_box_demo(tol);
        } else if (opts.demo == "state-dependence") {
            doc["result"] = state_dependence_demo(opts.seed, tol);
        } else {
            throw InputError("unknown demo \"" + opts.demo +
                             "\" (available: three-box, state-dependence)");
        }
        return doc;
    }

    const LoadedScenario s = parse_and_load(read_file(opts.scenario_path), tol.tol);
    doc["scenario"] = s.spec.name;
    if (command == "validate") {
        doc["result"] = {{"valid", true},
                         {"dimension", s.spec.dimension},
                         {"contexts", s.spec.contexts.size()},
                         {"queries", s.spec.queries.size()},
                         {"dynamics", to_string(s.spec.dynamics.mode)}};
    } else if (command == "gc-build") {
        doc["result"] = gc_build_report(s, opts.contexts, tol);
    } else if (command == "ch-check") {
        doc["result"] = ch_check_report(s, opts.contexts, tol);
    } else if (command == "scan-contrary") {
        doc["result"] = scan_report(s, opts.contexts, opts.budget, tol);
    } else {
        doc["results"] = query_results(s, command, opts, tol);
    }
    return doc;
}

int fail(std::ostream& out, std::ostream& err, const Options& opts, const std::string& command,
         int code, const char* kind, const std::string& message, const std::string& path) {
    err << "qhist: " << message << "\n";
    if (opts.output == "json") {
        Json doc = {{"command", command},
                    {"schema_version", kSchemaVersion},
                    {"error", {{"kind", kind}, {"message", message}, {"path", path}}}};
        out << serialize_json(doc);
    }
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opts;
    CLI::App app{"Quantum contexts, consistent histories and generalized contexts", "qhist"};
    app.require_subcommand(1, 1);
    app.add_option("--output", opts.output, "Output mode")
        ->check(CLI::IsMember({"human", "json"}));
    app.add_option("--tolerance", opts.tolerance,
                   "Numerical tolerance (also the consistency tolerance unless overridden)")
        ->check(CLI::PositiveNumber);
    auto* ctol = app.add_option("--consistency-tolerance", opts.consistency_tolerance,
                                "Maximum |D(a,b)| for a consistent family")
                     ->check(CLI::PositiveNumber);
    app.add_option("--seed", opts.seed, "Seed for randomized demos");

    const auto scenario_cmd = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->fallthrough();
        sub->add_option("scenario", opts.scenario_path, "Scenario JSON file")->required();
        return sub;
    };
    scenario_cmd("validate", "Parse and validate a scenario");
    for (const auto& [name, help] :
         {std::pair{"born", "Born probabilities of born queries"},
          std::pair{"gc-prob", "Generalized-context probabilities"},
          std::pair{"ch-prob", "Consistent-histories probabilities"},
          std::pair{"retrodict", "Contrary-retrodiction analysis"}}) {
        auto* sub = scenario_cmd(name, help);
        sub->add_option("--query", opts.query, "Evaluate only this query index");
    }
    for (const auto& [name, help] :
         {std::pair{"gc-build", "Build a generalized context or report incompatibility"},
          std::pair{"ch-check", "Decoherence functional and consistency verdict"}}) {
        auto* sub = scenario_cmd(name, help);
        sub->add_option("--contexts", opts.contexts, "Context indices, in time order")
            ->delimiter(',');
    }
    auto* scan = scenario_cmd("scan-contrary", "List contrary property pairs");
    scan->add_option("--contexts", opts.contexts, "Context indices")->delimiter(',');
    scan->add_option("--budget", opts.budget, "Maximum number of pairs examined");
    auto* demo = app.add_subcommand("demo", "Built-in demonstrations");
    demo->fallthrough();
    demo->add_option("name", opts.demo, "three-box or state-dependence")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return fail(out, err, opts, "", kExitInput, "usage", e.what(), "");
    }

    const std::string command = app.get_subcommands().front()->get_name();
    for (auto* sub : app.get_subcommands()) {
        if (auto* q = sub->get_option_no_throw("--query"); q != nullptr && q->count() > 0) {
            opts.query_given = true;
        }
    }
    opts.consistency_given = ctol->count() > 0;
    const Tolerances tol{opts.tolerance,
                         opts.consistency_given ? opts.consistency_tolerance : opts.tolerance};

    try {
        emit(out, opts, execute(command, opts, tol));
        return kExitOk;
    } catch (const ScenarioError& e) {
        return fail(out, err, opts, command, kExitInput, "input", e.what(), e.path());
    } catch (const InputError& e) {
        return fail(out, err, opts, command, kExitInput, "input", e.what(), "");
    } catch (const NumericalError& e) {
        return fail(out, err, opts, command, kExitNumerical, "numerical", e.what(), "");
    } catch (const std::exception& e) {
        return fail(out, err, opts, command, kExitNumerical, "internal", e.what(), "");
    }
}

}  // namespace qhist::cli
