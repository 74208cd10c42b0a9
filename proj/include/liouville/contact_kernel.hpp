#pragma once

// Numerical contact geometry: 1-forms on product charts, pullbacks under
// smooth maps, the contact condition, and sampled certificates for the
// contraction axioms
//   (D1) phi(M) lies in the interior of M,
//   (D2) phi is a diffeomorphism onto its image,
//   (D3) phi^* alpha = e^{-g} alpha with g > 0.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liouville/chart.hpp"

namespace liouville::contact {

using Covector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

constexpr double kDefaultFdStep = 1e-5;
constexpr double kDefaultTolerance = 1e-8;

struct OneForm {
    std::function<Covector(const Point&)> eval;
    std::string label;

    Covector operator()(const Point& p) const { return eval(p); }
};

struct SmoothMap {
    std::function<Point(const Point&)> forward;
    // Analytic Jacobian; central differences are used when empty.
    std::function<Matrix(const Point&)> jacobian;
    double fd_step = kDefaultFdStep;
    // Periods of the image coordinates (0 = not periodic), so finite
    // differences across a wrap are taken modulo the period.
    std::vector<double> image_periods;

    Point operator()(const Point& p) const { return forward(p); }
    Matrix jacobian_at(const Point& p) const;
};

Matrix fd_jacobian(const SmoothMap& map, const Point& p, double h);

// outer o inner, Jacobian by the chain rule.
SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner);

// The 1-form p -> J(p)^T form(map(p)).
OneForm pullback_form(const SmoothMap& map, const OneForm& form);

// a * first + second.
OneForm linear_combination(double a, const OneForm& first, const OneForm& second);

struct ContactModel {
    std::string name;
    Chart chart;
    OneForm alpha;
    std::optional<SmoothMap> phi;
    std::map<std::string, double> params;
    // When phi lands in a different coordinate patch (a Darboux chart of the
    // image), the chart and the contact form written in those coordinates.
    std::optional<Chart> image_chart;
    std::optional<OneForm> image_alpha;
    // Inverse of phi on phi(M); returns the preimage even when it leaves M.
    std::function<std::optional<Point>(const Point&)> phi_inverse;
    // Periodic coordinate used for cross sections of the attractor.
    std::optional<std::size_t> section_coordinate;
    // Coordinate names, used as CSV headers.
    std::vector<std::string> coordinates;

    const Chart& target_chart() const { return image_chart ? *image_chart : chart; }
    const OneForm& target_alpha() const { return image_alpha ? *image_alpha : alpha; }
    bool iterable() const { return phi.has_value() && !image_chart.has_value(); }
    const SmoothMap& map() const;
};

// J(p)^T form(forward(p)). With an image chart, throws OutOfChart when the
// image leaves its bounded factors.
Covector eval_pullback(const SmoothMap& map, const OneForm& form, const Point& p, const Chart* image_chart = nullptr);
Covector eval_pullback(const ContactModel& model, const Point& p);

struct ConformalFit {
    double factor = 0.0;
    double residual = 0.0;  // max-norm of pullback - factor * alpha
    double scale = 0.0;     // max-norm of the larger of the two covectors
};

// Least-squares f with pullback = f * source(p). Throws DegenerateForm when
// the source form vanishes and NotConformal when the fit residual exceeds
// tol times the covector scale.
ConformalFit conformal_factor(const Covector& pullback, const Covector& source, double tol);
ConformalFit conformal_factor(const SmoothMap& map, const OneForm& form, const Point& p, double tol);
ConformalFit conformal_factor(const ContactModel& model, const Point& p, double tol = kDefaultTolerance);

// Coefficient of alpha ^ (d alpha)^{k} on the ordered coordinate basis, in
// dimension 2k + 1, with d alpha from central differences of step h.
double contact_check(const OneForm& form, const Point& p, double h);

struct AxiomD1 {
    double min_margin = 0.0;
    std::size_t violations = 0;
    bool pass = false;
};

struct AxiomD2 {
    double min_abs_det = 0.0;
    std::size_t singular = 0;
    std::size_t collisions = 0;
    bool pass = false;
    // Sampling can falsify injectivity but never prove it.
    std::string evidence;
};

struct AxiomD3 {
    double factor_min = 0.0;
    double factor_max = 0.0;
    double max_residual = 0.0;
    double g_min = 0.0;
    double g_max = 0.0;
    std::size_t failures = 0;
    bool pass = false;
};

struct ContractionCertificate {
    std::string model;
    std::size_t sample_count = 0;
    double tol = 0.0;
    std::uint64_t seed = 0;
    AxiomD1 d1;
    AxiomD2 d2;
    AxiomD3 d3;
    std::vector<double> factors;  // f(p) per sample, NaN where undefined

    bool all_pass() const { return d1.pass && d2.pass && d3.pass; }
};

struct CertifyOptions {
    double boundary_fraction = 0.05;
    std::optional<double> interior_margin;  // defaults to the target chart's
};

ContractionCertificate certify_contraction(const ContactModel& model, std::size_t samples, double tol,
                                           std::uint64_t rng_seed, const CertifyOptions& options = {});

}  // namespace liouville::contact
