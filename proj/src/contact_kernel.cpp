#include "liouville/contact_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "liouville/errors.hpp"
#include "liouville/parallel.hpp"

namespace liouville::contact {

namespace {

double wrap_centered(double v, double period) {
    double w = std::fmod(v + 0.5 * period, period);
    if (w < 0.0) w += period;
    return w - 0.5 * period;
}

double max_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Pfaffian of an even antisymmetric matrix by expansion along the first row.
double pfaffian(const Matrix& a) {
    const long n = a.rows();
    if (n == 0) return 1.0;
    if (n % 2 == 1) return 0.0;
    if (n == 2) return a(0, 1);
    double total = 0.0;
    for (long j = 1; j < n; ++j) {
        if (a(0, j) == 0.0) continue;
        std::vector<long> keep;
        for (long t = 1; t < n; ++t)
            if (t != j) keep.push_back(t);
        Matrix minor(n - 2, n - 2);
        for (long r = 0; r < n - 2; ++r)
            for (long c = 0; c < n - 2; ++c) minor(r, c) = a(keep[r], keep[c]);
        const double sign = (j % 2 == 1) ? 1.0 : -1.0;
        total += sign * a(0, j) * pfaffian(minor);
    }
    return total;
}

// Pairs (i, j) whose points lie within tol of each other in the chart metric.
template <typename Visit>
void close_pairs(const std::vector<Point>& pts, const Chart& chart, double tol, Visit&& visit) {
    if (pts.size() < 2) return;
    const long dim = pts.front().size();
    // Sweep along the coordinate with the widest spread.
    long axis = 0;
    double widest = -1.0;
    for (long c = 0; c < dim; ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto& p : pts) {
            lo = std::min(lo, p[c]);
            hi = std::max(hi, p[c]);
        }
        if (hi - lo > widest) {
            widest = hi - lo;
            axis = c;
        }
    }
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pts[a][axis] < pts[b][axis]; });
    const double period = chart.periods()[static_cast<std::size_t>(axis)];
    for (std::size_t a = 0; a < order.size(); ++a) {
        const Point& pa = pts[order[a]];
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            const Point& pb = pts[order[b]];
            if (pb[axis] - pa[axis] >= tol) break;
            if (chart.distance(pa, pb) < tol) visit(order[a], order[b]);
        }
        if (period > 0.0 && pa[axis] > period - tol) {
            for (std::size_t b = 0; b < a; ++b) {
                const Point& pb = pts[order[b]];
                if (pb[axis] + period - pa[axis] >= tol) break;
                if (chart.distance(pa, pb) < tol) visit(order[b], order[a]);
            }
        }
    }
}

}  // namespace

Matrix fd_jacobian(const SmoothMap& map, const Point& p, double h) {
    const Point base = map.forward(p);
    Matrix jac(base.size(), p.size());
    for (long j = 0; j < p.size(); ++j) {
        Point plus = p;
        Point minus = p;
        plus[j] += h;
        minus[j] -= h;
        Eigen::VectorXd d = map.forward(plus) - map.forward(minus);
        for (long i = 0; i < d.size(); ++i) {
            const auto iu = static_cast<std::size_t>(i);
            if (iu < map.image_periods.size() && map.image_periods[iu] > 0.0)
                d[i] = wrap_centered(d[i], map.image_periods[iu]);
        }
        jac.col(j) = d / (2.0 * h);
    }
    return jac;
}

Matrix SmoothMap::jacobian_at(const Point& p) const {
    if (jacobian) return jacobian(p);
    return fd_jacobian(*this, p, fd_step);
}

SmoothMap compose(const SmoothMap& outer, const SmoothMap& inner) {
    SmoothMap out;
    out.forward = [outer, inner](const Point& p) { return outer.forward(inner.forward(p)); };
    out.jacobian = [outer, inner](const Point& p) {
        return Matrix(outer.jacobian_at(inner.forward(p)) * inner.jacobian_at(p));
    };
    out.fd_step = std::min(outer.fd_step, inner.fd_step);
    out.image_periods = outer.image_periods;
    return out;
}

OneForm pullback_form(const SmoothMap& map, const OneForm& form) {
    OneForm out;
    out.label = "pullback(" + form.label + ")";
    out.eval = [map, form](const Point& p) { return Covector(map.jacobian_at(p).transpose() * form(map.forward(p))); };
    return out;
}

OneForm linear_combination(double a, const OneForm& first, const OneForm& second) {
    OneForm out;
    out.label = "combination";
    out.eval = [a, first, second](const Point& p) { return Covector(a * first(p) + second(p)); };
    return out;
}

const SmoothMap& ContactModel::map() const {
    if (!phi) throw ModelError("model '" + name + "' has no self-map");
    return *phi;
}

Covector eval_pullback(const SmoothMap& map, const OneForm& form, const Point& p, const Chart* image_chart) {
    const Point image = map.forward(p);
    if (image_chart && !(image_chart->signed_margin(image) >= 0.0))
        throw OutOfChart("image point leaves the chart");
    return map.jacobian_at(p).transpose() * form(image);
}

Covector eval_pullback(const ContactModel& model, const Point& p) {
    return eval_pullback(model.map(), model.target_alpha(), p, &model.target_chart());
}

ConformalFit conformal_factor(const Covector& pullback, const Covector& source, double tol) {
    const double norm2 = source.squaredNorm();
    ConformalFit fit;
    fit.scale = std::max(max_norm(pullback), max_norm(source));
    if (!(std::sqrt(norm2) > tol)) throw DegenerateForm("contact form vanishes at the sample point");
    fit.factor = pullback.dot(source) / norm2;
    fit.residual = max_norm(pullback - fit.factor * source);
    if (!(fit.residual <= tol * fit.scale))
        throw NotConformal("pullback is not proportional to alpha (residual " + std::to_string(fit.residual) + ")");
    return fit;
}

ConformalFit conformal_factor(const SmoothMap& map, const OneForm& form, const Point& p, double tol) {
    return conformal_factor(eval_pullback(map, form, p), form(p), tol);
}

ConformalFit conformal_factor(const ContactModel& model, const Point& p, double tol) {
    return conformal_factor(eval_pullback(model.map(), model.target_alpha(), p), model.alpha(p), tol);
}

double contact_check(const OneForm& form, const Point& p, double h) {
    const long dim = p.size();
    if (dim % 2 == 0) throw std::invalid_argument("contact_check: dimension must be odd");
    const Covector a = form(p);
    // partial[i](j) = d a_j / d x_i
    Matrix partial(dim, dim);
    for (long i = 0; i < dim; ++i) {
        Point plus = p;
        Point minus = p;
        plus[i] += h;
        minus[i] -= h;
        partial.row(i) = (form(plus) - form(minus)).transpose() / (2.0 * h);
    }
    Matrix bordered = Matrix::Zero(dim + 1, dim + 1);
    for (long j = 0; j < dim; ++j) {
        bordered(0, j + 1) = a[j];
        bordered(j + 1, 0) = -a[j];
    }
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) bordered(i + 1, j + 1) = partial(i, j) - partial(j, i);
    double factorial = 1.0;
    for (long k = 2; k <= (dim - 1) / 2; ++k) factorial *= static_cast<double>(k);
    return factorial * pfaffian(bordered);
}

ContractionCertificate certify_contraction(const ContactModel& model, std::size_t samples, double tol,
                                           std::uint64_t rng_seed, const CertifyOptions& options) {
    const SmoothMap& phi = model.map();
    const Chart& target = model.target_chart();
    const double required = options.interior_margin.value_or(target.interior_margin());

    SamplingPlan plan;
    plan.count = samples;
    plan.seed = rng_seed;
    plan.boundary_fraction = options.boundary_fraction;
    plan.include_poles = true;
    const std::vector<Point> pts = sample_chart(model.chart, plan);

    struct Partial {
        double min_margin = std::numeric_limits<double>::infinity();
        std::size_t d1_violations = 0;
        double min_det = std::numeric_limits<double>::infinity();
        std::size_t singular = 0;
        double fmin = std::numeric_limits<double>::infinity();
        double fmax = -std::numeric_limits<double>::infinity();
        double max_residual = 0.0;
        std::size_t d3_failures = 0;
    };

    const std::size_t count = pts.size();
    std::vector<Point> images(count);
    std::vector<char> usable(count, 0);
    std::vector<double> factors(count, std::numeric_limits<double>::quiet_NaN());
    std::vector<Partial> partials(worker_count() + 1);

    parallel_chunks(
        count,
        [&](std::size_t begin, std::size_t end, std::size_t w) {
            Partial acc;
            for (std::size_t i = begin; i < end; ++i) {
                const Point& p = pts[i];
                const Point img = phi.forward(p);
                const bool finite = img.allFinite();
                double margin = finite ? target.signed_margin(img) : -std::numeric_limits<double>::infinity();
                if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
                acc.min_margin = std::min(acc.min_margin, margin);
                if (!(margin >= required)) ++acc.d1_violations;
                if (!finite) {
                    ++acc.singular;
                    ++acc.d3_failures;
                    acc.min_det = 0.0;
                    continue;
                }
                images[i] = target.reduce(img);
                usable[i] = 1;

                const Matrix jac = phi.jacobian_at(p);
                const double det = std::abs(jac.determinant());
                if (!(det >= tol)) ++acc.singular;
                acc.min_det = std::min(acc.min_det, std::isfinite(det) ? det : 0.0);

                try {
                    const ConformalFit fit =
                        conformal_factor(Covector(jac.transpose() * model.target_alpha()(img)), model.alpha(p), tol);
                    factors[i] = fit.factor;
                    acc.fmin = std::min(acc.fmin, fit.factor);
                    acc.fmax = std::max(acc.fmax, fit.factor);
                    acc.max_residual = std::max(acc.max_residual, fit.residual);
                    if (!(fit.factor > 0.0 && fit.factor < 1.0)) ++acc.d3_failures;
                } catch (const Error&) {
                    ++acc.d3_failures;
                    acc.max_residual = std::numeric_limits<double>::infinity();
                }
            }
            partials[w] = acc;
        },
        256);

    ContractionCertificate cert;
    cert.model = model.name;
    cert.sample_count = count;
    cert.tol = tol;
    cert.seed = rng_seed;
    Partial total;
    for (const auto& part : partials) {
        total.min_margin = std::min(total.min_margin, part.min_margin);
        total.d1_violations += part.d1_violations;
        total.min_det = std::min(total.min_det, part.min_det);
        total.singular += part.singular;
        total.fmin = std::min(total.fmin, part.fmin);
        total.fmax = std::max(total.fmax, part.fmax);
        total.max_residual = std::max(total.max_residual, part.max_residual);
        total.d3_failures += part.d3_failures;
    }

    // Sampled injectivity: distinct samples (>= 10 tol apart) whose images
    // land within tol of each other.
    std::vector<Point> kept;
    std::vector<std::size_t> source_index;
    kept.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        if (usable[i]) {
            kept.push_back(images[i]);
            source_index.push_back(i);
        }
    std::size_t collisions = 0;
    close_pairs(kept, target, tol, [&](std::size_t a, std::size_t b) {
        if (model.chart.distance(pts[source_index[a]], pts[source_index[b]]) >= 10.0 * tol) ++collisions;
    });

    cert.d1.min_margin = total.min_margin;
    cert.d1.violations = total.d1_violations;
    cert.d1.pass = total.d1_violations == 0;

    cert.d2.min_abs_det = total.min_det;
    cert.d2.singular = total.singular;
    cert.d2.collisions = collisions;
    cert.d2.pass = total.singular == 0 && collisions == 0;
    cert.d2.evidence = cert.d2.pass ? "sampled: no violation found (not a proof of injectivity)"
                                    : "sampled: violation found";

    cert.d3.factor_min = total.fmin;
    cert.d3.factor_max = total.fmax;
    cert.d3.max_residual = total.max_residual;
    cert.d3.g_min = total.fmax > 0.0 ? -std::log(total.fmax) : std::numeric_limits<double>::quiet_NaN();
    cert.d3.g_max = total.fmin > 0.0 ? -std::log(total.fmin) : std::numeric_limits<double>::quiet_NaN();
    cert.d3.failures = total.d3_failures;
    cert.d3.pass = total.d3_failures == 0 && cert.d3.g_min > 0.0;
    cert.factors = std::move(factors);
    return cert;
}

}  // namespace liouville::contact
