#include <doctest.h>

#include <cmath>
#include <limits>

#include "liouville/report.hpp"

using namespace liouville;
using report::Json;

TEST_CASE("report writer formatting") {
    Json j;
    j["b"] = 0.1;
    j["a"] = 2.0;
    j["c"] = std::numeric_limits<double>::infinity();
    j["d"] = -std::numeric_limits<double>::infinity();
    j["e"] = std::nan("");
    j["f"] = 7;
    j["g"] = "text";
    const std::string text = report::dump(j, 0);
    CHECK(text == R"({"a":2.0,"b":0.10000000000000001,"c":"inf","d":"-inf","e":"nan","f":7,"g":"text"})" "\n");
}

TEST_CASE("report values round-trip through a JSON parser") {
    Json j;
    j["x"] = {1e-300, 3.141592653589793, -0.0, 12345678901234567.0};
    const Json back = Json::parse(report::dump(j));
    for (std::size_t i = 0; i < 4; ++i) CHECK(back["x"][i].get<double>() == j["x"][i].get<double>());
}

TEST_CASE("envelope fields") {
    const Json r = report::make_report("certify", Json{{"model", "solenoid"}}, Json::object(), "pass", 42);
    CHECK(r["command"] == "certify");
    CHECK(r["status"] == "pass");
    CHECK(r["rng_seed"] == 42);
    CHECK(r["schema_version"] == report::kSchemaVersion);
    CHECK(r["tool_version"] == report::kToolVersion);
    CHECK(report::dump(r) == report::dump(report::make_report("certify", Json{{"model", "solenoid"}}, Json::object(),
                                                              "pass", 42)));
}

TEST_CASE("exact values serialise losslessly") {
    exactlin::Integer big("123456789012345678901234567890");
    CHECK(report::to_json(big) == "123456789012345678901234567890");
    CHECK(report::to_json(exactlin::Integer(-17)) == -17);

    const Json root = report::to_json(exactlin::RootInterval{exactlin::Rational(1, 3), exactlin::Rational(1, 2)});
    CHECK(root["lo"] == "1/3");
    CHECK(root["hi"] == "1/2");
}
