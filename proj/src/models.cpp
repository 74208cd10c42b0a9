#include "liouville/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "liouville/errors.hpp"

namespace liouville::contact {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string canonical_name(std::string name) {
    std::replace(name.begin(), name.end(), '-', '_');
    return name;
}

double param_or(const std::map<std::string, double>& params, const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

Point vec3(double a, double b, double c) {
    Point p(3);
    p << a, b, c;
    return p;
}

}  // namespace

ContactModel jet_space_model() {
    ContactModel m;
    m.name = "jet_space";
    m.coordinates = {"z", "q", "p"};
    m.chart = Chart(3, {ChartFactor::periodic(1, 1.0), ChartFactor::ball({0, 2}, 1.0)});
    m.alpha.label = "dz - p dq";
    m.alpha.eval = [](const Point& p) { return Covector(vec3(1.0, -p[2], 0.0)); };

    SmoothMap phi;
    phi.forward = [](const Point& p) { return vec3(0.5 * p[0], p[1], 0.5 * p[2]); };
    phi.jacobian = [](const Point&) {
        Matrix j = Matrix::Zero(3, 3);
        j(0, 0) = 0.5;
        j(1, 1) = 1.0;
        j(2, 2) = 0.5;
        return j;
    };
    phi.image_periods = {0.0, 1.0, 0.0};
    m.phi = std::move(phi);
    m.phi_inverse = [](const Point& p) -> std::optional<Point> { return vec3(2.0 * p[0], p[1], 2.0 * p[2]); };
    return m;
}

ContactModel solenoid_model() {
    ContactModel m;
    m.name = "solenoid";
    m.coordinates = {"theta", "x", "y"};
    m.chart = Chart(3, {ChartFactor::periodic(0, kTwoPi), ChartFactor::ball({1, 2}, 1.0)});
    m.alpha.label = "dx + y dtheta";
    m.alpha.eval = [](const Point& p) { return Covector(vec3(p[2], 1.0, 0.0)); };

    SmoothMap phi;
    phi.forward = [](const Point& p) {
        const double t = p[0];
        double doubled = std::fmod(2.0 * t, kTwoPi);
        if (doubled < 0.0) doubled += kTwoPi;
        return vec3(doubled, 0.1 * p[1] + 0.5 * std::cos(t), 0.5 * (0.1 * p[2] + 0.5 * std::sin(t)));
    };
    phi.jacobian = [](const Point& p) {
        const double t = p[0];
        Matrix j = Matrix::Zero(3, 3);
        j(0, 0) = 2.0;
        j(1, 0) = -0.5 * std::sin(t);
        j(1, 1) = 0.1;
        j(2, 0) = 0.25 * std::cos(t);
        j(2, 2) = 0.05;
        return j;
    };
    phi.image_periods = {kTwoPi, 0.0, 0.0};
    m.phi = std::move(phi);
    // theta has two candidate preimages; take the one whose disk coordinates
    // are closer to the centre.
    m.phi_inverse = [](const Point& p) -> std::optional<Point> {
        std::optional<Point> best;
        double best_r = 0.0;
        for (int branch = 0; branch < 2; ++branch) {
            const double t = 0.5 * p[0] + branch * std::numbers::pi;
            const double x = 10.0 * p[1] - 5.0 * std::cos(t);
            const double y = 20.0 * p[2] - 5.0 * std::sin(t);
            const double r = std::hypot(x, y);
            if (!best || r < best_r) {
                best = vec3(std::fmod(t, kTwoPi), x, y);
                best_r = r;
            }
        }
        return best;
    };
    m.section_coordinate = 0;
    return m;
}

ContactModel transverse_knot_model(double c, double delta, double eps) {
    if (!(c > 0.0) || !(delta > 0.0) || !(eps > 0.0))
        throw InvalidRequest("transverse_knot needs c > 0, delta > 0, eps > 0");
    ContactModel m;
    m.name = "transverse_knot";
    m.coordinates = {"theta", "x", "y"};
    m.params = {{"c", c}, {"delta", delta}, {"eps", eps}};
    m.chart = Chart(3, {ChartFactor::periodic(0, 1.0), ChartFactor::ball({1, 2}, 1.0)});
    m.alpha.label = "dtheta - y dx";
    m.alpha.eval = [](const Point& p) { return Covector(vec3(1.0, -p[2], 0.0)); };
    m.image_chart = Chart(3, {ChartFactor::periodic(0, 1.0), ChartFactor::ball({1, 2}, eps)});
    OneForm image_alpha;
    image_alpha.label = "dx' + y' dtheta'";
    image_alpha.eval = [](const Point& p) { return Covector(vec3(p[2], 1.0, 0.0)); };
    m.image_alpha = std::move(image_alpha);

    SmoothMap psi;
    psi.forward = [c, delta](const Point& p) {
        double t = std::fmod(p[0] - c * p[1] / delta, 1.0);
        if (t < 0.0) t += 1.0;
        return vec3(t, c * p[1], c * delta / (c - delta * p[2]));
    };
    psi.jacobian = [c, delta](const Point& p) {
        const double d = c - delta * p[2];
        Matrix j = Matrix::Zero(3, 3);
        j(0, 0) = 1.0;
        j(0, 1) = -c / delta;
        j(1, 1) = c;
        j(2, 2) = c * delta * delta / (d * d);
        return j;
    };
    psi.image_periods = {1.0, 0.0, 0.0};
    m.phi = std::move(psi);
    m.phi_inverse = [c, delta](const Point& p) -> std::optional<Point> {
        if (p[2] == 0.0) return std::nullopt;
        const double x = p[1] / c;
        double t = std::fmod(p[0] + x * c / delta, 1.0);
        if (t < 0.0) t += 1.0;
        return vec3(t, x, (c - c * delta / p[2]) / delta);
    };
    return m;
}

std::vector<std::string> builtin_model_names() { return {"jet_space", "solenoid", "transverse_knot"}; }

ContactModel builtin_model(const std::string& name, const std::map<std::string, double>& params) {
    const std::string key = canonical_name(name);
    if (key == "jet_space") return jet_space_model();
    if (key == "solenoid") return solenoid_model();
    if (key == "transverse_knot")
        return transverse_knot_model(param_or(params, "c", 0.1), param_or(params, "delta", 0.001),
                                     param_or(params, "eps", 0.5));
    throw UnknownModel("'" + name + "'");
}

AnosovEigenforms anosov_eigenforms(const exactlin::IntMatrix& a) {
    const std::size_t n = a.size();
    std::vector<exactlin::RootInterval> roots;
    try {
        roots = exactlin::real_spectrum(a, 1e-15, true);
    } catch (const Error& e) {
        throw EigenFailure(std::string("spectrum is not simple: ") + e.what());
    }
    if (roots.size() != n) throw EigenFailure("spectrum is not entirely real");

    std::vector<double> lams;
    for (const auto& r : roots) lams.push_back(r.midpoint());
    std::sort(lams.begin(), lams.end(), [](double x, double y) { return std::abs(x) > std::abs(y); });
    const double smallest = lams.back();
    if (!(smallest > 0.0)) throw EigenFailure("smallest eigenvalue must be positive");
    if (!(std::abs(lams[n - 2]) > smallest)) throw EigenFailure("smallest eigenvalue is not strictly smallest");

    Eigen::MatrixXd at(n, n);
    const auto rows = a.to_double();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) at(static_cast<long>(j), static_cast<long>(i)) = rows[i][j];

    AnosovEigenforms out;
    out.eigenvalues = lams;
    out.betas.resize(static_cast<long>(n), static_cast<long>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::MatrixXd shifted = at - lams[i] * Eigen::MatrixXd::Identity(static_cast<long>(n), static_cast<long>(n));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(shifted, Eigen::ComputeFullV);
        Eigen::VectorXd beta = svd.matrixV().col(static_cast<long>(n) - 1);
        beta.normalize();
        for (long t = 0; t < beta.size(); ++t) {
            if (std::abs(beta[t]) > 1e-12) {
                if (beta[t] < 0.0) beta = -beta;
                break;
            }
        }
        out.betas.col(static_cast<long>(i)) = beta;
        const double res = (at * beta - lams[i] * beta).cwiseAbs().maxCoeff();
        out.relation_residual = std::max(out.relation_residual, res);
    }
    if (!(out.relation_residual <= 1e-8)) {
        std::ostringstream msg;
        msg << "eigenform relation residual " << out.relation_residual;
        throw EigenFailure(msg.str());
    }
    return out;
}

ContactModel anosov_model(const exactlin::IntMatrix& a) {
    const std::size_t n = a.size();
    const AnosovEigenforms forms = anosov_eigenforms(a);
    const long ln = static_cast<long>(n);
    const long dim = 2 * ln - 1;

    std::vector<std::size_t> ycoords;
    std::vector<ChartFactor> factors;
    for (std::size_t i = 0; i + 1 < n; ++i) ycoords.push_back(i);
    factors.push_back(ChartFactor::ball(ycoords, 1.0));
    for (std::size_t i = 0; i < n; ++i) factors.push_back(ChartFactor::periodic(n - 1 + i, 1.0));

    ContactModel m;
    m.name = "anosov";
    for (std::size_t i = 0; i + 1 < n; ++i) m.coordinates.push_back("y" + std::to_string(i + 1));
    for (std::size_t i = 0; i < n; ++i) m.coordinates.push_back("x" + std::to_string(i + 1));
    m.chart = Chart(static_cast<std::size_t>(dim), factors);
    for (std::size_t i = 0; i < n; ++i) m.params["lambda_" + std::to_string(i + 1)] = forms.eigenvalues[i];
    m.params["eigenform_residual"] = forms.relation_residual;

    const Eigen::MatrixXd betas = forms.betas;
    m.alpha.label = "beta_n + sum y_i beta_i";
    m.alpha.eval = [betas, ln, dim](const Point& p) {
        Covector out = Covector::Zero(dim);
        Eigen::VectorXd tail = betas.col(ln - 1);
        for (long i = 0; i + 1 < ln; ++i) tail += p[i] * betas.col(i);
        out.tail(ln) = tail;
        return out;
    };

    Eigen::MatrixXd ad(ln, ln);
    Eigen::MatrixXd inv(ln, ln);
    const auto rows = a.to_double();
    const auto inv_rows = exactlin::unimodular_inverse(a).to_double();
    for (long i = 0; i < ln; ++i)
        for (long j = 0; j < ln; ++j) {
            ad(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            inv(i, j) = inv_rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    Eigen::VectorXd rates(ln - 1);
    for (long i = 0; i + 1 < ln; ++i)
        rates[i] = forms.eigenvalues[static_cast<std::size_t>(ln - 1)] / forms.eigenvalues[static_cast<std::size_t>(i)];

    auto wrap_torus = [ln](Point& p) {
        for (long i = 0; i < ln; ++i) {
            double& v = p[ln - 1 + i];
            v -= std::floor(v);
            if (v >= 1.0) v -= 1.0;
        }
    };

    SmoothMap phi;
    phi.forward = [ad, rates, ln, dim, wrap_torus](const Point& p) {
        Point out(dim);
        out.head(ln - 1) = rates.cwiseProduct(p.head(ln - 1));
        out.tail(ln) = ad * p.tail(ln);
        wrap_torus(out);
        return out;
    };
    phi.jacobian = [ad, rates, ln, dim](const Point&) {
        Matrix j = Matrix::Zero(dim, dim);
        for (long i = 0; i + 1 < ln; ++i) j(i, i) = rates[i];
        j.bottomRightCorner(ln, ln) = ad;
        return j;
    };
    phi.image_periods = m.chart.periods();
    m.phi = std::move(phi);
    m.phi_inverse = [inv, rates, ln, dim, wrap_torus](const Point& p) -> std::optional<Point> {
        Point out(dim);
        out.head(ln - 1) = p.head(ln - 1).cwiseQuotient(rates);
        out.tail(ln) = inv * p.tail(ln);
        wrap_torus(out);
        return out;
    };
    return m;
}

ContactModel anosov_model(const spectrum::SpectrumCertificate& cert) { return anosov_model(cert.a); }

}  // namespace liouville::contact
