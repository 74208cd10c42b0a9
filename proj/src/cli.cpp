#include "liouville/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "liouville/errors.hpp"
#include "liouville/models.hpp"
#include "liouville/parallel.hpp"
#include "liouville/report.hpp"
#include "liouville/spectrum_search.hpp"
#include "liouville/torus_builder.hpp"

namespace liouville::cli {

namespace {

using report::Json;

struct Common {
    std::string out_path;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

struct ModelArgs {
    std::string model = "solenoid";
    double c = 0.1;
    double delta = 0.001;
    double eps = 0.5;
    std::size_t n = 2;
    std::vector<double> mu;
    std::int64_t k1_max = 100000;
    std::string matrix;
};

struct BuiltModel {
    contact::ContactModel model;
    Json extra = Json::object();
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--out", common.out_path, "Write the JSON report to this path (default: stdout)");
    cmd->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--threads", common.threads,
                    "Worker cap (default: LIOUVILLE_FORGE_THREADS, else available parallelism)");
}

void add_model(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--model", m.model, "solenoid | jet-space | transverse-knot | anosov")->capture_default_str();
    cmd->add_option("--c", m.c, "transverse-knot: c")->capture_default_str();
    cmd->add_option("--delta", m.delta, "transverse-knot: delta")->capture_default_str();
    cmd->add_option("--eps", m.eps, "transverse-knot: neighbourhood radius; anosov: spectrum tolerance")
        ->capture_default_str();
    cmd->add_option("--n", m.n, "anosov: torus dimension")->capture_default_str();
    cmd->add_option("--mu", m.mu, "anosov: prescribed middle eigenvalues");
    cmd->add_option("--k1-max", m.k1_max, "anosov: search budget")->capture_default_str();
    cmd->add_option("--matrix", m.matrix, "anosov: explicit matrix, rows separated by ';', e.g. \"2,1;1,1\"");
}

exactlin::IntMatrix parse_matrix(const std::string& text) {
    std::vector<std::vector<exactlin::Integer>> rows;
    std::stringstream rows_in(text);
    std::string row;
    while (std::getline(rows_in, row, ';')) {
        std::vector<exactlin::Integer> entries;
        std::stringstream cells(row);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t");
            const auto e = cell.find_last_not_of(" \t");
            if (b == std::string::npos) throw InvalidRequest("empty matrix entry");
            exactlin::Integer v;
            if (v.set_str(cell.substr(b, e - b + 1), 10) != 0) throw InvalidRequest("bad matrix entry '" + cell + "'");
            entries.push_back(v);
        }
        rows.push_back(std::move(entries));
    }
    if (rows.size() < 2) throw InvalidRequest("matrix must be at least 2x2");
    for (const auto& r : rows)
        if (r.size() != rows.size()) throw InvalidRequest("matrix must be square");
    return exactlin::IntMatrix::from_rows(rows);
}

spectrum::SpectrumRequest make_request(const ModelArgs& m, std::uint64_t seed) {
    spectrum::SpectrumRequest req;
    req.n = m.n;
    req.mu = m.mu;
    req.eps = m.eps;
    req.k1_max = m.k1_max;
    req.seed = seed;
    req.validate();
    return req;
}

Json model_inputs(const ModelArgs& m) {
    Json in = {{"model", m.model}};
    const std::string key = [&] {
        std::string s = m.model;
        std::replace(s.begin(), s.end(), '-', '_');
        return s;
    }();
    if (key == "transverse_knot") {
        in["c"] = m.c;
        in["delta"] = m.delta;
        in["eps"] = m.eps;
    } else if (key == "anosov") {
        if (!m.matrix.empty()) {
            in["matrix"] = m.matrix;
        } else {
            in["n"] = m.n;
            in["mu"] = m.mu;
            in["eps"] = m.eps;
            in["k1_max"] = m.k1_max;
        }
    }
    return in;
}

BuiltModel build_model(const ModelArgs& m, std::uint64_t seed) {
    std::string key = m.model;
    std::replace(key.begin(), key.end(), '-', '_');
    BuiltModel built;
    if (key == "anosov") {
        if (!m.matrix.empty()) {
            const exactlin::IntMatrix a = parse_matrix(m.matrix);
            if (exactlin::determinant(a) != 1) throw InvalidRequest("matrix must have determinant 1");
            built.model = contact::anosov_model(a);
            built.extra["matrix"] = report::to_json(a);
            built.extra["eigenforms"] = report::to_json(contact::anosov_eigenforms(a));
        } else {
            const spectrum::SpectrumCertificate cert = spectrum::find_matrix(make_request(m, seed));
            built.model = contact::anosov_model(cert);
            built.extra["spectrum_certificate"] = report::to_json(cert);
            built.extra["eigenforms"] = report::to_json(contact::anosov_eigenforms(cert.a));
        }
        return built;
    }
    built.model = contact::builtin_model(m.model, {{"c", m.c}, {"delta", m.delta}, {"eps", m.eps}});
    return built;
}

int emit(const Json& rep, const Common& common, std::ostream& out, std::ostream& err) {
    const std::string text = report::dump(rep);
    if (common.out_path.empty()) {
        out << text;
        return kOk;
    }
    std::ofstream file(common.out_path, std::ios::binary);
    if (!file) {
        err << "error: cannot write " << common.out_path << '\n';
        return kUsageError;
    }
    file << text;
    out << rep["command"].get<std::string>() << ": " << rep["status"].get<std::string>() << " (report: " << common.out_path
        << ")\n";
    return kOk;
}

// Writes the report and maps the status onto the exit code.
int finish(const Json& rep, const Common& common, std::ostream& out, std::ostream& err, int code) {
    const int written = emit(rep, common, out, err);
    return written != kOk ? written : code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"liouville-forge: contractions, partial mapping tori and Anosov matrix search", "liouville-forge"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(report::kToolVersion));

    Common common;
    ModelArgs margs;

    // find-matrix
    auto* fm = app.add_subcommand("find-matrix", "Search SL(n,Z) for a matrix with prescribed real spectrum");
    add_common(fm, common);
    std::size_t fm_n = 2;
    std::vector<double> fm_mu;
    double fm_eps = 0.5;
    std::int64_t fm_k1_max = 100000;
    fm->add_option("--n", fm_n, "Dimension")->required();
    fm->add_option("--mu", fm_mu, "Prescribed middle eigenvalues (n-2 values)");
    fm->add_option("--eps", fm_eps, "Tolerance")->capture_default_str();
    fm->add_option("--k1-max", fm_k1_max, "Scan budget for k1")->capture_default_str();

    // certify
    auto* cf = app.add_subcommand("certify", "Certify the contraction axioms on samples");
    add_common(cf, common);
    add_model(cf, margs);
    std::size_t cf_samples = 10000;
    double cf_tol = contact::kDefaultTolerance;
    cf->add_option("--samples", cf_samples, "Number of sample points")->capture_default_str();
    cf->add_option("--tol", cf_tol, "Proportionality / determinant tolerance")->capture_default_str();

    // skeleton
    auto* sk = app.add_subcommand("skeleton", "Approximate the attractor and estimate the skeleton dimension");
    add_common(sk, common);
    add_model(sk, margs);
    int sk_depth = 8;
    std::size_t sk_seeds = 100000;
    std::vector<double> sk_scales;
    std::optional<double> sk_section;
    double sk_thickness = 0.05;
    std::optional<double> sk_link;
    std::string csv_out;
    sk->add_option("--depth", sk_depth, "Iteration depth")->capture_default_str();
    sk->add_option("--seeds", sk_seeds, "Number of seed points")->capture_default_str();
    sk->add_option("--scales", sk_scales, "Box sizes for box counting");
    sk->add_option("--section", sk_section, "Export the cross-section at this angle");
    sk->add_option("--thickness", sk_thickness, "Half-width of the section band")->capture_default_str();
    sk->add_option("--link", sk_link, "Count section clusters at this single-linkage distance");
    sk->add_option("--csv-out", csv_out, "Write the cloud (or the section) as CSV");

    // descent
    auto* ds = app.add_subcommand("descent", "Check that e^s alpha descends to the mapping torus");
    add_common(ds, common);
    add_model(ds, margs);
    std::size_t ds_samples = 1000;
    double ds_tol = 1e-9;
    std::optional<double> force_g;
    double tilt_eps = 0.05;
    std::string g_mode = "auto";
    ds->add_option("--samples", ds_samples, "Number of sample points")->capture_default_str();
    ds->add_option("--tol", ds_tol, "Residual tolerance")->capture_default_str();
    ds->add_option("--force-G", force_g, "Use this constant G instead of extending g");
    ds->add_option("--tilt-eps", tilt_eps, "Collar width of the tilt region")->capture_default_str();
    ds->add_option("--g-mode", g_mode, "auto | constant | blend")->capture_default_str()->check(
        CLI::IsMember({"auto", "constant", "blend"}));

    std::vector<const char*> argv{"liouville-forge"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    set_worker_count(common.threads);

    const std::string command = app.get_subcommands().front()->get_name();
    Json inputs = Json::object();
    try {
        if (command == "find-matrix") {
            inputs = {{"n", fm_n}, {"mu", fm_mu}, {"eps", fm_eps}, {"k1_max", fm_k1_max}};
            spectrum::SpectrumRequest req;
            req.n = fm_n;
            req.mu = fm_mu;
            req.eps = fm_eps;
            req.k1_max = fm_k1_max;
            req.seed = common.seed;
            req.validate();
            try {
                const spectrum::SpectrumCertificate cert = spectrum::find_matrix(req);
                const bool ok = cert.condition1 && cert.condition2;
                Json rep = report::make_report(command, inputs, report::to_json(cert), ok ? "pass" : "fail", common.seed);
                return finish(rep, common, out, err, ok ? kOk : kVerificationFailure);
            } catch (const SearchExhausted& e) {
                Json rep = report::make_report(command, inputs, {{"error", e.what()}}, "not-found", common.seed);
                return finish(rep, common, out, err, kSearchExhausted);
            }
        }

        inputs = model_inputs(margs);
        if (command == "certify") {
            inputs["samples"] = cf_samples;
            inputs["tol"] = cf_tol;
            const BuiltModel built = build_model(margs, common.seed);
            const contact::ContractionCertificate cert =
                contact::certify_contraction(built.model, cf_samples, cf_tol, common.seed);
            Json results = report::to_json(cert);
            for (auto it = built.extra.begin(); it != built.extra.end(); ++it) results[it.key()] = it.value();
            const bool ok = cert.all_pass();
            Json rep = report::make_report(command, inputs, results, ok ? "pass" : "fail", common.seed);
            return finish(rep, common, out, err, ok ? kOk : kVerificationFailure);
        }

        if (command == "skeleton") {
            inputs["depth"] = sk_depth;
            inputs["seeds"] = sk_seeds;
            inputs["scales"] = sk_scales;
            inputs["thickness"] = sk_thickness;
            inputs["section"] = sk_section ? Json(*sk_section) : Json(nullptr);
            inputs["link"] = sk_link ? Json(*sk_link) : Json(nullptr);
            if (sk_depth < 0) throw InvalidRequest("depth must be nonnegative");
            if (sk_link && !sk_section) throw InvalidRequest("--link needs --section");
            const BuiltModel built = build_model(margs, common.seed);
            const torus::SkeletonSample sample = torus::iterate_attractor(built.model, sk_depth, sk_seeds, common.seed);
            torus::SkeletonOptions opts;
            opts.theta0 = sk_section.value_or(0.0);
            opts.thickness = sk_thickness;
            opts.scales = sk_scales;
            opts.rng_seed = common.seed;
            const torus::SkeletonEstimate est = torus::skeleton_dimension(built.model, sample, opts);
            Json results = report::to_json(est);
            results["depth"] = sk_depth;
            results["model"] = built.model.name;
            for (auto it = built.extra.begin(); it != built.extra.end(); ++it) results[it.key()] = it.value();

            std::vector<contact::Point> section;
            if (sk_section) {
                section = torus::cross_section(sample, built.model, *sk_section, sk_thickness);
                results["section_points"] = section.size();
                if (sk_link) results["section_clusters"] = torus::count_clusters(section, *sk_link);
            }
            if (!csv_out.empty()) {
                std::ofstream csv(csv_out);
                if (!csv) throw InvalidRequest("cannot write " + csv_out);
                std::vector<std::string> header = built.model.coordinates;
                std::size_t rows = 0;
                if (sk_section) {
                    header.erase(header.begin() + static_cast<long>(*built.model.section_coordinate));
                    rows = torus::write_csv(csv, section, header);
                } else {
                    rows = torus::write_csv(csv, sample.points, header);
                }
                results["csv_rows"] = rows;
            }
            Json rep = report::make_report(command, inputs, results, "pass", common.seed);
            return finish(rep, common, out, err, kOk);
        }

        // descent
        inputs["samples"] = ds_samples;
        inputs["tol"] = ds_tol;
        inputs["tilt_eps"] = tilt_eps;
        inputs["g_mode"] = g_mode;
        inputs["force_G"] = force_g ? Json(*force_g) : Json(nullptr);
        const BuiltModel built = build_model(margs, common.seed);
        torus::MappingTorusModel mt;
        if (force_g) {
            mt = torus::with_constant_G(built.model, *force_g, tilt_eps);
        } else {
            torus::ExtendOptions eo;
            eo.tilt_eps = tilt_eps;
            eo.seed = common.seed;
            const torus::GMode mode =
                g_mode == "constant" ? torus::GMode::Constant : (g_mode == "blend" ? torus::GMode::Blend : torus::GMode::Auto);
            mt = torus::extend_G(built.model, mode, eo);
        }
        const torus::DescentReport dr = torus::descent_check(mt, ds_samples, ds_tol, common.seed, false);
        const torus::TransversalityReport tr = torus::boundary_transversality_check(mt, ds_samples, common.seed);
        Json results = {{"descent", report::to_json(dr)},
                        {"transversality", report::to_json(tr)},
                        {"G_mode", mt.g_mode},
                        {"g_mean", mt.g_mean},
                        {"g_min", mt.g_min},
                        {"g_max", mt.g_max},
                        {"collar", "radial collar of the disk factor, tau = r - R"}};
        if (mt.constant_G) results["G"] = mt.G(built.model.chart.reduce(contact::Point::Zero(static_cast<long>(built.model.chart.dim()))));
        for (auto it = built.extra.begin(); it != built.extra.end(); ++it) results[it.key()] = it.value();
        const bool ok = dr.pass && tr.pass;
        Json rep = report::make_report(command, inputs, results, ok ? "pass" : "fail", common.seed);
        return finish(rep, common, out, err, ok ? kOk : kVerificationFailure);
    } catch (const InvalidRequest& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const UnknownModel& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ModelError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const SearchExhausted& e) {
        Json rep = report::make_report(command, inputs, {{"error", e.what()}}, "not-found", common.seed);
        return finish(rep, common, out, err, kSearchExhausted);
    } catch (const Error& e) {
        Json rep = report::make_report(command, inputs, {{"error", e.what()}}, "error", common.seed);
        finish(rep, common, out, err, kVerificationFailure);
        err << "error: " << e.what() << '\n';
        return kVerificationFailure;
    }
}

}  // namespace liouville::cli
