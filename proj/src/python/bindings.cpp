#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "liouville/cli.hpp"
#include "liouville/errors.hpp"
#include "liouville/models.hpp"
#include "liouville/report.hpp"

namespace py = pybind11;
using namespace liouville;

namespace {

// Python ints are arbitrary precision; go through decimal strings.
exactlin::Integer to_integer(const py::int_& v) { return exactlin::Integer(py::str(v).cast<std::string>()); }

py::int_ to_py(const exactlin::Integer& v) { return py::int_(py::reinterpret_steal<py::object>(PyLong_FromString(v.get_str().c_str(), nullptr, 10))); }

exactlin::IntMatrix to_matrix(const std::vector<std::vector<py::int_>>& rows) {
    std::vector<std::vector<exactlin::Integer>> m;
    for (const auto& row : rows) {
        m.emplace_back();
        for (const auto& v : row) m.back().push_back(to_integer(v));
    }
    return exactlin::IntMatrix::from_rows(m);
}

std::vector<std::vector<py::int_>> from_matrix(const exactlin::IntMatrix& a) {
    std::vector<std::vector<py::int_>> rows(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) rows[i].push_back(to_py(a(i, j)));
    return rows;
}

contact::ContactModel model_from(const std::string& name, const std::map<std::string, double>& params,
                                 const std::vector<std::vector<py::int_>>& matrix) {
    if (name == "anosov") {
        if (matrix.empty()) throw InvalidRequest("anosov needs a matrix");
        return contact::anosov_model(to_matrix(matrix));
    }
    return contact::builtin_model(name, params);
}

std::string as_text(const report::Json& j) { return report::dump(j); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact lattice search, contact contractions and mapping-torus skeletons";
    m.attr("__version__") = report::kToolVersion;

    py::register_exception<Error>(m, "LiouvilleError", PyExc_RuntimeError);

    m.def("companion_matrix", [](const std::vector<py::int_>& k) {
        std::vector<exactlin::Integer> ks;
        for (const auto& v : k) ks.push_back(to_integer(v));
        return from_matrix(exactlin::companion_matrix(ks));
    }, py::arg("k"));

    m.def("char_poly", [](const std::vector<std::vector<py::int_>>& a) {
        std::vector<py::int_> out;
        const auto p = exactlin::char_poly(to_matrix(a));
        for (const auto& c : p.coeffs()) out.push_back(to_py(c));
        return out;
    }, py::arg("matrix"), "Coefficients of det(xI - A), lowest degree first.");

    m.def("determinant", [](const std::vector<std::vector<py::int_>>& a) { return to_py(exactlin::determinant(to_matrix(a))); },
          py::arg("matrix"));

    m.def("find_matrix_json", [](std::size_t n, std::vector<double> mu, double eps, std::int64_t k1_max, std::uint64_t seed) {
        spectrum::SpectrumRequest req{n, std::move(mu), eps, k1_max, seed};
        spectrum::SpectrumCertificate cert;
        {
            py::gil_scoped_release release;
            cert = spectrum::find_matrix(req);
        }
        return as_text(report::to_json(cert));
    }, py::arg("n"), py::arg("mu") = std::vector<double>{}, py::arg("eps") = 0.5, py::arg("k1_max") = 100000,
       py::arg("seed") = 0);

    m.def("certify_json", [](const std::string& model, std::size_t samples, double tol, std::uint64_t seed,
                             const std::map<std::string, double>& params, const std::vector<std::vector<py::int_>>& matrix) {
        const auto cm = model_from(model, params, matrix);
        py::gil_scoped_release release;
        return as_text(report::to_json(contact::certify_contraction(cm, samples, tol, seed)));
    }, py::arg("model"), py::arg("samples") = 10000, py::arg("tol") = 1e-8, py::arg("seed") = 0,
       py::arg("params") = std::map<std::string, double>{}, py::arg("matrix") = std::vector<std::vector<py::int_>>{});

    m.def("descent_json", [](const std::string& model, std::size_t samples, double tol, std::optional<double> force_G,
                             std::uint64_t seed, const std::vector<std::vector<py::int_>>& matrix) {
        const auto cm = model_from(model, {}, matrix);
        py::gil_scoped_release release;
        const auto mt = force_G ? torus::with_constant_G(cm, *force_G) : torus::extend_G(cm, torus::GMode::Auto);
        return as_text(report::to_json(torus::descent_check(mt, samples, tol, seed, false)));
    }, py::arg("model"), py::arg("samples") = 1000, py::arg("tol") = 1e-9, py::arg("force_G") = py::none(),
       py::arg("seed") = 0, py::arg("matrix") = std::vector<std::vector<py::int_>>{});

    m.def("skeleton_json", [](const std::string& model, int depth, std::size_t seeds, std::vector<double> scales,
                              double theta0, double thickness, std::uint64_t seed,
                              const std::vector<std::vector<py::int_>>& matrix) {
        const auto cm = model_from(model, {}, matrix);
        py::gil_scoped_release release;
        torus::SkeletonOptions opts{theta0, thickness, std::move(scales), seed};
        return as_text(report::to_json(torus::skeleton_dimension(cm, depth, seeds, opts)));
    }, py::arg("model"), py::arg("depth") = 8, py::arg("seeds") = 100000, py::arg("scales") = std::vector<double>{},
       py::arg("theta0") = 0.0, py::arg("thickness") = 0.05, py::arg("seed") = 0,
       py::arg("matrix") = std::vector<std::vector<py::int_>>{});

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}
