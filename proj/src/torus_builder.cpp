#include "liouville/torus_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "liouville/errors.hpp"
#include "liouville/parallel.hpp"

namespace liouville::torus {

using contact::Chart;
using contact::SamplingPlan;

namespace {

double wrap_centered(double v, double period) {
    double w = std::fmod(v + 0.5 * period, period);
    if (w < 0.0) w += period;
    return w - 0.5 * period;
}

double smoothstep(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

void require_iterable(const ContactModel& model, const char* what) {
    if (!model.iterable())
        throw ModelError(std::string(what) + ": model '" + model.name + "' is not a self-map of its chart");
}

std::vector<Point> interior_samples(const Chart& chart, std::size_t count, std::uint64_t seed) {
    SamplingPlan plan;
    plan.count = count;
    plan.seed = seed;
    return contact::sample_chart(chart, plan);
}

}  // namespace

double g_at(const ContactModel& base, const Point& p) {
    return -std::log(contact::conformal_factor(base, p).factor);
}

MappingTorusModel extend_G(const ContactModel& base, GMode mode, const ExtendOptions& options) {
    base.map();
    if (!(options.tilt_eps >= 0.0)) throw InvalidRequest("tilt_eps must be nonnegative");
    const std::vector<Point> pts = interior_samples(base.chart, std::max<std::size_t>(options.samples, 1), options.seed);
    std::vector<double> g(pts.size());
    parallel_chunks(
        pts.size(),
        [&](std::size_t begin, std::size_t end, std::size_t) {
            for (std::size_t i = begin; i < end; ++i) g[i] = g_at(base, pts[i]);
        },
        256);

    MappingTorusModel out;
    out.base = base;
    out.tilt_eps = options.tilt_eps;
    out.g_min = *std::min_element(g.begin(), g.end());
    out.g_max = *std::max_element(g.begin(), g.end());
    out.g_mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    if (!(out.g_min > 0.0)) throw DescentViolation("g is not positive on M; phi is not a contraction");

    const bool spread_ok = out.g_max - out.g_min <= options.constant_tol;
    if (mode == GMode::Constant && !spread_ok)
        throw NonConstantG("sampled g spreads over [" + std::to_string(out.g_min) + ", " + std::to_string(out.g_max) +
                           "]");
    if (mode == GMode::Constant || (mode == GMode::Auto && spread_ok)) {
        const double value = out.g_mean;
        out.G = [value](const Point&) { return value; };
        out.g_mode = "constant";
        out.constant_G = true;
        return out;
    }

    if (!base.phi_inverse) throw ModelError("blend extension needs the inverse of phi");
    const double mean = out.g_mean;
    const double floor_value = 0.5 * out.g_min;
    const double width = options.tilt_eps;
    const ContactModel model = base;
    out.G = [model, mean, floor_value, width](const Point& p) {
        const std::optional<Point> pre = model.phi_inverse(p);
        if (!pre) return std::max(mean, floor_value);
        const double outside = std::max(0.0, -model.chart.signed_margin(*pre));
        const double w = outside == 0.0 ? 1.0 : (width > 0.0 ? smoothstep(1.0 - outside / width) : 0.0);
        double value = mean;
        if (w > 0.0) {
            try {
                value = w * g_at(model, *pre) + (1.0 - w) * mean;
            } catch (const Error&) {
                value = mean;
            }
        }
        return std::max(value, floor_value);
    };
    out.g_mode = "blend";
    return out;
}

MappingTorusModel with_constant_G(const ContactModel& base, double G, double tilt_eps) {
    if (!(G > 0.0)) throw InvalidRequest("forced G must be positive");
    MappingTorusModel out;
    out.base = base;
    out.tilt_eps = tilt_eps;
    out.G = [G](const Point&) { return G; };
    out.g_mode = "forced";
    out.g_mean = out.g_min = out.g_max = G;
    out.constant_G = true;
    return out;
}

Eigen::VectorXd descent_residual(const MappingTorusModel& model, double s, const Point& x) {
    const contact::SmoothMap& phi = model.base.map();
    const long d = x.size();
    const Point y = phi.forward(x);
    const contact::Matrix jphi = phi.jacobian_at(x);

    // Jacobian of Phi(s, x) = (s + G(phi(x)), phi(x)) on (s, x).
    Eigen::MatrixXd jbig = Eigen::MatrixXd::Zero(d + 1, d + 1);
    jbig(0, 0) = 1.0;
    const double h = phi.fd_step;
    for (long j = 0; j < d; ++j) {
        Point plus = x;
        Point minus = x;
        plus[j] += h;
        minus[j] -= h;
        jbig(0, j + 1) = (model.G(phi.forward(plus)) - model.G(phi.forward(minus))) / (2.0 * h);
    }
    jbig.bottomRightCorner(d, d) = jphi;

    // lambda = e^s alpha has no ds component.
    Eigen::VectorXd lambda_image = Eigen::VectorXd::Zero(d + 1);
    lambda_image.tail(d) = std::exp(s + model.G(y)) * model.base.target_alpha()(y);
    Eigen::VectorXd lambda_here = Eigen::VectorXd::Zero(d + 1);
    lambda_here.tail(d) = std::exp(s) * model.base.alpha(x);
    return jbig.transpose() * lambda_image - lambda_here;
}

DescentReport descent_check(const MappingTorusModel& model, std::size_t samples, double tol, std::uint64_t seed,
                            bool throw_on_violation) {
    const std::vector<Point> pts = interior_samples(model.base.chart, samples, seed);
    const contact::QuasiRandom s_draw(1, seed ^ 0x5bd1e995ULL);
    const double s_span = model.g_max > 0.0 ? model.g_max : 1.0;

    struct Worst {
        double residual = 0.0;
        std::size_t index = 0;
        double s = 0.0;
    };
    std::vector<Worst> worst(worker_count() + 1);
    parallel_chunks(
        pts.size(),
        [&](std::size_t begin, std::size_t end, std::size_t w) {
            Worst acc;
            acc.index = begin;
            for (std::size_t i = begin; i < end; ++i) {
                const double s = s_span * s_draw.at(i)[0];
                const double r = descent_residual(model, s, pts[i]).cwiseAbs().maxCoeff();
                if (!(r <= acc.residual)) {
                    acc.residual = std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
                    acc.index = i;
                    acc.s = s;
                }
            }
            worst[w] = acc;
        },
        256);

    DescentReport report;
    report.samples = pts.size();
    report.tol = tol;
    bool found = false;
    for (const auto& w : worst) {
        if (w.index >= pts.size()) continue;
        if (!found || w.residual > report.max_residual) {
            report.max_residual = w.residual;
            report.worst_s = w.s;
            report.worst_x = pts[w.index];
            found = true;
        }
    }
    report.pass = report.max_residual < tol;
    if (!report.pass && throw_on_violation)
        throw DescentViolation("residual " + std::to_string(report.max_residual) + " >= tol");
    return report;
}

FundamentalDomainPoint normalize_fundamental(double s, const Point& x, const MappingTorusModel& model, int max_steps) {
    require_iterable(model.base, "normalize_fundamental");
    const contact::SmoothMap& phi = model.base.map();
    const Chart& chart = model.base.chart;
    FundamentalDomainPoint out;
    out.s = s;
    out.x = chart.reduce(x);
    for (int step = 0; step < max_steps; ++step) {
        if (out.s < 0.0) {
            const Point y = chart.reduce(phi.forward(out.x));
            out.s += model.G(y);
            out.x = y;
            ++out.steps;
            continue;
        }
        const double g_here = model.G(out.x);
        if (out.s < g_here) return out;
        const std::optional<Point> pre = model.base.phi_inverse ? model.base.phi_inverse(out.x) : std::nullopt;
        if (!pre || !(chart.signed_margin(*pre) >= -1e-9))
            throw LeftDomain("point is not in phi(M); cannot step back");
        out.s -= g_here;
        out.x = chart.reduce(*pre);
        --out.steps;
    }
    throw LeftDomain("normalization did not terminate");
}

bool in_tilt_region_P(double s, const Point& x, const MappingTorusModel& model) {
    const std::optional<double> tau = model.base.chart.collar_tau(x);
    const double eps = model.tilt_eps;
    if (!tau || *tau > 0.0 || *tau < -eps) return false;
    const double g_here = model.G(x);
    if (s < 0.0 || s > g_here) return false;
    return -eps * s / g_here < *tau && *tau <= 0.0;
}

TransversalityReport boundary_transversality_check(const MappingTorusModel& model, std::size_t samples,
                                                   std::uint64_t seed) {
    SamplingPlan plan;
    plan.count = samples;
    plan.seed = seed;
    plan.boundary_fraction = 1.0;
    plan.include_poles = true;
    const std::vector<Point> pts = contact::sample_chart(model.base.chart, plan);

    TransversalityReport report;
    report.samples = pts.size();
    report.tilted_min = std::numeric_limits<double>::infinity();
    // The horizontal face s = G(x) has conormal ds - dG, pairing 1 with d/ds.
    report.horizontal_min = 1.0;
    for (const auto& p : pts) {
        // Tilted face tau + eps s / G = 0, conormal (eps / G, d tau).
        report.tilted_min = std::min(report.tilted_min, model.tilt_eps / model.G(p));
    }
    if (pts.empty()) report.tilted_min = 0.0;
    report.min_margin = std::min(report.tilted_min, report.horizontal_min);
    report.pass = report.min_margin > 0.0;
    return report;
}

std::vector<std::size_t> dedupe_indices(const std::vector<Point>& points, const Chart& chart, double tol) {
    const std::size_t n = points.size();
    if (n == 0) return {};
    const long dim = points.front().size();
    // Sweep along a generic direction: |u.(p - q)| <= |p - q|, and unlike a
    // coordinate axis it does not degenerate when a map collapses one
    // coordinate onto few values.
    Eigen::VectorXd u(dim);
    for (long j = 0; j < dim; ++j) u[j] = 1.0 + 0.6180339887498949 * static_cast<double>(j * j + j);
    u.normalize();
    std::vector<double> proj(n);
    for (std::size_t i = 0; i < n; ++i) proj[i] = u.dot(points[i]);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return proj[a] < proj[b] || (proj[a] == proj[b] && a < b); });

    std::vector<char> removed(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
        const std::size_t i = order[a];
        for (std::size_t b = a + 1; b < n && proj[order[b]] - proj[i] < tol; ++b) {
            const std::size_t j = order[b];
            if (chart.distance(points[i], points[j]) < tol) removed[std::max(i, j)] = 1;
        }
    }
    // Pairs across the seam of a periodic coordinate.
    const std::vector<double>& periods = chart.periods();
    std::vector<std::size_t> seam;
    for (std::size_t i = 0; i < n; ++i)
        for (long j = 0; j < dim; ++j) {
            const double per = periods[static_cast<std::size_t>(j)];
            if (per > 0.0 && (points[i][j] < tol || points[i][j] > per - tol)) {
                seam.push_back(i);
                break;
            }
        }
    for (std::size_t a = 0; a < seam.size(); ++a)
        for (std::size_t b = a + 1; b < seam.size(); ++b)
            if (chart.distance(points[seam[a]], points[seam[b]]) < tol) removed[std::max(seam[a], seam[b])] = 1;

    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < n; ++i)
        if (!removed[i]) kept.push_back(i);
    return kept;
}

SkeletonSample iterate_attractor(const ContactModel& model, int depth, std::size_t seeds, std::uint64_t rng_seed) {
    require_iterable(model, "iterate_attractor");
    if (depth < 0) throw InvalidRequest("depth must be nonnegative");
    const contact::SmoothMap& phi = model.map();
    const Chart& chart = model.chart;
    std::vector<Point> start = interior_samples(chart, seeds, rng_seed);
    std::vector<Point> images(start.size());
    parallel_chunks(start.size(), [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
            Point p = start[i];
            for (int k = 0; k < depth; ++k) p = chart.reduce(phi.forward(p));
            images[i] = std::move(p);
        }
    });

    SkeletonSample out;
    out.model = model.name;
    out.depth = depth;
    out.seed_count = seeds;
    out.rng_seed = rng_seed;
    const std::vector<std::size_t> kept = dedupe_indices(images, chart, 1e-9);
    out.points.reserve(kept.size());
    out.seeds.reserve(kept.size());
    for (std::size_t i : kept) {
        out.points.push_back(std::move(images[i]));
        out.seeds.push_back(std::move(start[i]));
    }
    return out;
}

std::vector<Point> cross_section(const SkeletonSample& sample, const ContactModel& model, double theta0,
                                 double thickness, bool snap) {
    if (!model.section_coordinate) throw ModelError("model '" + model.name + "' has no section coordinate");
    if (!(thickness > 0.0)) throw InvalidRequest("thickness must be positive");
    const std::size_t c = *model.section_coordinate;
    const long lc = static_cast<long>(c);
    const double period = model.chart.periods()[c];
    const contact::SmoothMap& phi = model.map();
    const Chart& chart = model.chart;
    auto offset = [&](double v) { return period > 0.0 ? wrap_centered(v - theta0, period) : v - theta0; };

    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < sample.points.size(); ++i)
        if (std::abs(offset(sample.points[i][lc])) < thickness) chosen.push_back(i);
    if (chosen.empty()) throw EmptySection("no points within the section band; raise thickness or seeds");

    const long dim = static_cast<long>(chart.dim());
    std::vector<Point> out(chosen.size());
    parallel_chunks(
        chosen.size(),
        [&](std::size_t begin, std::size_t end, std::size_t) {
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t i = chosen[k];
                Point image = sample.points[i];
                if (snap && static_cast<std::size_t>(sample.seeds.size()) == sample.points.size()) {
                    // Newton on the seed's section coordinate.
                    Point seed = sample.seeds[i];
                    for (int iter = 0; iter < 12; ++iter) {
                        Point p = seed;
                        Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, lc);
                        for (int step = 0; step < sample.depth; ++step) {
                            v = phi.jacobian_at(p) * v;
                            p = chart.reduce(phi.forward(p));
                        }
                        image = p;
                        const double f = offset(p[lc]);
                        if (std::abs(f) <= 1e-11 * std::max(1.0, period) || v[lc] == 0.0) break;
                        seed[lc] -= f / v[lc];
                    }
                }
                Point rest(dim - 1);
                for (long j = 0, t = 0; j < dim; ++j)
                    if (j != lc) rest[t++] = image[j];
                out[k] = std::move(rest);
            }
        },
        256);
    return out;
}

SkeletonEstimate skeleton_dimension(const ContactModel& model, const SkeletonSample& sample,
                                    const SkeletonOptions& options) {
    SkeletonEstimate est;
    est.cloud_size = sample.points.size();
    if (model.section_coordinate) {
        const std::vector<Point> section = cross_section(sample, model, options.theta0, options.thickness);
        est.section_size = section.size();
        est.box = box_counting_dimension(section, options.scales.empty() ? default_section_scales() : options.scales);
        est.method = "section";
        est.estimate = 2.0 + est.box.slope;
    } else {
        est.box = box_counting_dimension(sample.points, options.scales.empty() ? default_cloud_scales() : options.scales);
        est.method = "cloud";
        est.estimate = 1.0 + est.box.slope;
    }
    return est;
}

SkeletonEstimate skeleton_dimension(const ContactModel& model, int depth, std::size_t seeds,
                                    const SkeletonOptions& options) {
    return skeleton_dimension(model, iterate_attractor(model, depth, seeds, options.rng_seed), options);
}

}  // namespace liouville::torus
