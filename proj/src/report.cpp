#include "liouville/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace liouville::report {

namespace {

void write_string(std::ostream& out, const std::string& s) {
    // nlohmann's own escaping, without its number formatting.
    out << Json(s).dump();
}

void write_double(std::ostream& out, double v) {
    if (std::isnan(v)) {
        out << "\"nan\"";
    } else if (std::isinf(v)) {
        out << (v > 0 ? "\"inf\"" : "\"-inf\"");
    } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        std::string text = buf;
        // Keep doubles recognisable as non-integers.
        if (text.find_first_of(".eEn") == std::string::npos) text += ".0";
        out << text;
    }
}

void write(std::ostream& out, const Json& v, int indent, int level) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (level + 1)), ' ') : "";
    const std::string pad_close = indent > 0 ? std::string(static_cast<std::size_t>(indent * level), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    const char* sep = indent > 0 ? ": " : ":";
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out << "{}";
                return;
            }
            out << '{' << nl;
            bool first = true;
            // object_t is an ordered std::map, so iteration is sorted.
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out << ',' << nl;
                first = false;
                out << pad;
                write_string(out, it.key());
                out << sep;
                write(out, it.value(), indent, level + 1);
            }
            out << nl << pad_close << '}';
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out << "[]";
                return;
            }
            out << '[' << nl;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out << ',' << nl;
                out << pad;
                write(out, v[i], indent, level + 1);
            }
            out << nl << pad_close << ']';
            return;
        }
        case Json::value_t::number_float:
            write_double(out, v.get<double>());
            return;
        default:
            out << v.dump();
    }
}

Json doubles(const std::vector<double>& xs) {
    Json arr = Json::array();
    for (double x : xs) arr.push_back(x);
    return arr;
}

}  // namespace

std::string dump(const Json& value, int indent) {
    std::ostringstream out;
    write(out, value, indent, 0);
    out << '\n';
    return out.str();
}

Json to_json(const exactlin::Integer& value) {
    if (value.fits_slong_p()) return Json(static_cast<std::int64_t>(value.get_si()));
    return Json(value.get_str());
}

Json to_json(const exactlin::IntMatrix& a) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < a.size(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < a.size(); ++j) row.push_back(to_json(a(i, j)));
        rows.push_back(row);
    }
    return rows;
}

Json to_json(const exactlin::IntPolynomial& p) {
    Json coeffs = Json::array();
    for (const auto& c : p.coeffs()) coeffs.push_back(to_json(c));
    return {{"coefficients_low_to_high", coeffs}, {"text", p.to_string()}};
}

Json to_json(const exactlin::RootInterval& r) {
    return {{"lo", r.lo.get_str()},
            {"hi", r.hi.get_str()},
            {"lo_float", r.lo_d()},
            {"hi_float", r.hi_d()},
            {"width", r.width().get_d()},
            {"midpoint", r.midpoint()}};
}

Json to_json(const spectrum::SpectrumCertificate& cert) {
    Json k = Json::array();
    for (const auto& v : cert.k) k.push_back(to_json(v));
    Json ck = Json::array();
    for (const auto& v : cert.companion_k) ck.push_back(to_json(v));
    Json roots = Json::array();
    for (const auto& r : cert.roots) roots.push_back(to_json(r));
    return {{"matrix", to_json(cert.a)},
            {"n", cert.n()},
            {"k", k},
            {"companion_k", ck},
            {"char_poly", to_json(cert.char_poly)},
            {"determinant", to_json(exactlin::determinant(cert.a))},
            {"sturm_count", cert.sturm_count},
            {"square_free", cert.square_free},
            {"roots", roots},
            {"root_labels", "middle roots first, then the large root, then the small root"},
            {"lambdas_float", doubles(cert.lambdas)},
            {"seed_lambdas", doubles(cert.seed_lambdas)},
            {"condition1", cert.condition1},
            {"condition2", cert.condition2},
            {"vieta_consistent", spectrum::vieta_consistent(cert)},
            {"recursion_residuals", doubles(cert.recursion_residuals)},
            {"dynamics_residual", cert.dynamics_residual},
            {"rounding_error", cert.rounding_error},
            {"scan_distance", cert.scan_distance},
            {"newton_iterations", cert.newton_iterations},
            {"k1", cert.k1},
            {"attempts", cert.attempts}};
}

Json to_json(const contact::ContractionCertificate& cert) {
    Json d1 = {{"min_margin", cert.d1.min_margin}, {"violations", cert.d1.violations}, {"pass", cert.d1.pass}};
    Json d2 = {{"min_abs_det", cert.d2.min_abs_det},
               {"singular", cert.d2.singular},
               {"collisions", cert.d2.collisions},
               {"pass", cert.d2.pass},
               {"evidence", cert.d2.evidence}};
    Json d3 = {{"factor_min", cert.d3.factor_min}, {"factor_max", cert.d3.factor_max},
               {"max_residual", cert.d3.max_residual}, {"g_min", cert.d3.g_min},
               {"g_max", cert.d3.g_max}, {"failures", cert.d3.failures},
               {"pass", cert.d3.pass}};
    return {{"model", cert.model}, {"sample_count", cert.sample_count}, {"tol", cert.tol},
            {"seed", cert.seed},   {"d1", d1},  {"d2", d2},
            {"d3", d3},            {"all_pass", cert.all_pass()}};
}

Json to_json(const contact::AnosovEigenforms& forms) {
    Json betas = Json::array();
    for (long i = 0; i < forms.betas.cols(); ++i) {
        Json col = Json::array();
        for (long j = 0; j < forms.betas.rows(); ++j) col.push_back(forms.betas(j, i));
        betas.push_back(col);
    }
    return {{"eigenvalues", doubles(forms.eigenvalues)},
            {"betas", betas},
            {"relation_residual", forms.relation_residual},
            {"lambda_n", forms.eigenvalues.back()}};
}

Json to_json(const contact::Point& p) {
    Json arr = Json::array();
    for (long i = 0; i < p.size(); ++i) arr.push_back(p[i]);
    return arr;
}

Json to_json(const torus::DescentReport& report) {
    return {{"max_residual", report.max_residual},
            {"samples", report.samples},
            {"tol", report.tol},
            {"worst_s", report.worst_s},
            {"worst_x", to_json(report.worst_x)},
            {"pass", report.pass}};
}

Json to_json(const torus::TransversalityReport& report) {
    return {{"tilted_min", report.tilted_min},
            {"horizontal_min", report.horizontal_min},
            {"min_margin", report.min_margin},
            {"samples", report.samples},
            {"pass", report.pass}};
}

Json to_json(const torus::BoxCountResult& box) {
    Json counts = Json::array();
    for (auto c : box.counts) counts.push_back(c);
    return {{"scales", doubles(box.scales)},
            {"counts", counts},
            {"slope", box.slope},
            {"intercept", box.intercept},
            {"r2", box.r2}};
}

Json to_json(const torus::SkeletonEstimate& est) {
    return {{"estimate", est.estimate},
            {"method", est.method},
            {"box_counting", to_json(est.box)},
            {"cloud_size", est.cloud_size},
            {"section_size", est.section_size},
            {"note", "box-counting estimate; an upper-bound proxy, not a Hausdorff dimension"}};
}

Json make_report(const std::string& command, Json inputs, Json results, const std::string& status,
                 std::uint64_t rng_seed) {
    return {{"command", command},
            {"inputs", std::move(inputs)},
            {"results", std::move(results)},
            {"status", status},
            {"tool_version", kToolVersion},
            {"schema_version", kSchemaVersion},
            {"rng_seed", rng_seed}};
}

}  // namespace liouville::report
