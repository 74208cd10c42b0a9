#pragma once

// JSON reports. Keys are sorted, doubles are written with 17 significant
// digits and non-finite doubles as the strings "inf", "-inf", "nan", so the
// same inputs always give byte-identical output.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "liouville/contact_kernel.hpp"
#include "liouville/exactlin.hpp"
#include "liouville/models.hpp"
#include "liouville/spectrum_search.hpp"
#include "liouville/torus_builder.hpp"

namespace liouville::report {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

std::string dump(const Json& value, int indent = 2);

Json to_json(const exactlin::Integer& value);
Json to_json(const exactlin::IntMatrix& a);
Json to_json(const exactlin::IntPolynomial& p);
Json to_json(const exactlin::RootInterval& r);
Json to_json(const spectrum::SpectrumCertificate& cert);
Json to_json(const contact::ContractionCertificate& cert);
Json to_json(const contact::AnosovEigenforms& forms);
Json to_json(const torus::DescentReport& report);
Json to_json(const torus::TransversalityReport& report);
Json to_json(const torus::BoxCountResult& box);
Json to_json(const torus::SkeletonEstimate& est);
Json to_json(const contact::Point& p);

// Top-level envelope shared by every command.
Json make_report(const std::string& command, Json inputs, Json results, const std::string& status,
                 std::uint64_t rng_seed);

}  // namespace liouville::report
