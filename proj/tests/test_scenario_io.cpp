#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "qhist/inference.hpp"
#include "qhist/queries.hpp"
#include "qhist/scenario_io.hpp"

using namespace qhist;

namespace {

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(QHIST_DATA_DIR) + "/" + name, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json minimal() { return Json::parse(slurp("minimal.json")); }

Json c(double re, double im = 0.0) { return Json::array({re, im}); }

/// Path of the ScenarioError raised by parse_scenario, or "<accepted>".
std::string rejection_path(const Json& doc) {
    try {
        parse_scenario(doc.dump());
    } catch (const ScenarioError& e) {
        return e.path();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("minimal document parses") {
    const auto s = parse_scenario(slurp("minimal.json"));
    CHECK(s.dimension == 2);
    CHECK(s.contexts.size() == 1);
    CHECK(s.queries.size() == 1);
    const auto loaded = parse_and_load(slurp("minimal.json"));
    CHECK(evaluate_query(loaded, 0)["probability"].get<double>() == 1.0);
}

TEST_CASE("shipped three-box document equals the built-in fixture") {
    CHECK(parse_scenario(slurp("three_box.json")) == three_box_scenario());
}

TEST_CASE("bad state norm is located at /state") {
    try {
        parse_scenario(slurp("bad_state_norm.json"));
        FAIL("expected rejection");
    } catch (const ScenarioError& e) {
        CHECK(e.path() == "/state");
        CHECK(std::string(e.what()).find("/state") == 0);
    }
}

TEST_CASE("syntax errors are reported") {
    CHECK_THROWS_AS(parse_scenario("{\"schema_version\": "), ScenarioError);
    CHECK_THROWS_AS(parse_scenario(""), ScenarioError);
}

TEST_CASE("rejecting documents, one per invariant") {
    {
        auto d = minimal();
        d["schema_version"] = "2";
        CHECK(rejection_path(d) == "/schema_version");
    }
    {
        auto d = minimal();
        d.erase("schema_version");
        CHECK(rejection_path(d) == "/schema_version");
    }
    {
        auto d = minimal();
        d["extra"] = 1;
        CHECK(rejection_path(d) == "/extra");
    }
    {
        auto d = minimal();
        d["dimension"] = 0;
        CHECK(rejection_path(d) == "/dimension");
    }
    {
        auto d = minimal();
        d["dimension"] = 3;
        CHECK(rejection_path(d) == "/state");
    }
    {
        auto d = minimal();
        d["state"]["vector"][0] = Json::array({1.0});
        CHECK(rejection_path(d) == "/state/vector/0");
    }
    {
        auto d = minimal();
        d["state"] = {{"density", {{c(0.5), c(0.0)}, {c(0.0), c(0.6)}}}};
        CHECK(rejection_path(d) == "/state");
    }
    {
        auto d = minimal();
        d["state"] = {{"density", {{c(1.5), c(0.0)}, {c(0.0), c(-0.5)}}}};
        CHECK(rejection_path(d) == "/state");
    }
    {
        auto d = minimal();
        d["state"] = {{"density", {{c(0.5), c(0.0, 0.1)}, {c(0.0, 0.1), c(0.5)}}}};
        CHECK(rejection_path(d) == "/state");
    }
    {
        auto d = minimal();
        d["dynamics"] = {{"kind", "hamiltonian"}, {"matrix", {{c(0.0), c(1.0)}, {c(0.0), c(1.0)}}}};
        CHECK(rejection_path(d) == "/dynamics");
    }
    {
        auto d = minimal();
        d["dynamics"] = {{"kind", "explicit"},
                         {"unitaries",
                          {{{"t_from", 0.0}, {"t_to", 1.0}, {"matrix", {{c(2.0), c(0.0)}, {c(0.0), c(1.0)}}}}}}};
        CHECK(rejection_path(d) == "/dynamics");
    }
    {
        auto d = minimal();
        d["dynamics"] = {{"kind", "sideways"}};
        CHECK(rejection_path(d) == "/dynamics/kind");
    }
    {
        auto d = minimal();
        d["contexts"][0]["atoms"][0] = {{"matrix", {{c(1.0), c(0.0)}, {c(0.0), c(0.5)}}}};
        CHECK(rejection_path(d).rfind("/contexts/0/atoms/0", 0) == 0);
    }
    {
        auto d = minimal();
        d["contexts"][0]["atoms"].erase(1);
        CHECK(rejection_path(d) == "/contexts/0/atoms");
    }
    {
        auto d = minimal();
        d["contexts"][0]["atoms"][1] = {{"vectors", {{c(1.0), c(1.0)}}}};
        CHECK(rejection_path(d) == "/contexts/0/atoms");
    }
    {
        auto d = minimal();
        d["contexts"][0]["atoms"][1] = {{"vectors", {{c(0.0), c(1.0)}}}, {"matrix", Json::array()}};
        CHECK(rejection_path(d) == "/contexts/0/atoms/1");
    }
    {
        auto d = minimal();
        d["queries"][0]["property"]["context"] = 4;
        CHECK(rejection_path(d) == "/queries/0/property/context");
    }
    {
        auto d = minimal();
        d["queries"][0]["property"]["atoms"] = {0, 7};
        CHECK(rejection_path(d) == "/queries/0/property/atoms/1");
    }
    {
        auto d = minimal();
        d["queries"][0]["type"] = "telepathy";
        CHECK(rejection_path(d) == "/queries/0/type");
    }
    {
        auto d = minimal();
        d["queries"][0] = {{"type", "ch_probability"}, {"event", {{0}, nullptr}}};
        CHECK(rejection_path(d).rfind("/queries/0", 0) == 0);
    }
    {
        auto d = minimal();
        d["queries"][0] = {{"type", "retrodiction"},
                           {"p", {{"context", 0}, {"atoms", {0}}}},
                           {"q", {{"context", 0}, {"atoms", {1}}}},
                           {"r", {{"time", 0.5}, {"vectors", {{c(1.0), c(0.0)}}}}}};
        CHECK(rejection_path(d) == "/queries/0/r");
    }
    {
        auto d = minimal();
        d["reference_time"] = "zero";
        CHECK(rejection_path(d) == "/reference_time");
    }
}

TEST_CASE("round-trip is a fixpoint on shipped fixtures") {
    for (const char* name : {"minimal.json", "three_box.json", "precession.json"}) {
        CAPTURE(name);
        const auto once = serialize(parse_scenario(slurp(name)));
        const auto parsed = parse_scenario(once);
        CHECK(serialize(parsed) == once);
        CHECK(parsed == parse_scenario(slurp(name)));
    }
}

TEST_CASE("serializer format") {
    CHECK(serialize_json(Json::parse(R"({"b": 1.0, "a": [1, 2], "c": {"z": 0.1}})")) ==
          "{\n  \"a\": [1, 2],\n  \"b\": 1.0,\n  \"c\": {\n    \"z\": 0.10000000000000001\n  }\n}\n");
    CHECK(serialize_json(Json::object({{"x", std::nan("")}})) == "{\n  \"x\": null\n}\n");
    CHECK(serialize_json(complex_to_json(Complex(0.5, -2.0))) == "[0.5, -2.0]\n");
    CHECK(serialize_json(Json::parse("[1e300]")) == "[1.0000000000000001e+300]\n");
}

TEST_CASE("empty query list yields an empty result array") {
    auto d = minimal();
    d["queries"] = Json::array();
    const auto loaded = parse_and_load(d.dump());
    CHECK(loaded.spec.queries.empty());
    Json report = {{"results", Json::array()}};
    CHECK(Json::parse(serialize_json(report))["results"].empty());
}

TEST_CASE("three-box report matches the golden file") {
    const Json report = {{"command", "demo"},
                         {"demo", "three-box"},
                         {"result", three_box_demo()},
                         {"schema_version", kSchemaVersion}};
    CHECK(serialize_json(report) == slurp("golden/three_box_report.json"));
    CVector r(3);
    r << 1.0, 1.0, -1.0;
    const RetrodictionInput in{"three-box",
                               State::from_pure(CVector::Constant(3, 1.0 / std::sqrt(3.0))),
                               0.0,
                               ray(CVector::Unit(3, 0)),
                               ray(CVector::Unit(3, 1)),
                               1.0,
                               ray(r),
                               2.0};
    CHECK(serialize_report(analyze_retrodiction(in, Propagator::trivial(3))) ==
          serialize_json(three_box_demo()["results"][0]["report"]));
}
