#include "liouville/chart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace liouville::contact {

namespace {

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double radical_inverse(std::uint64_t index, unsigned base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

double wrap(double v, double period) {
    double w = std::fmod(v, period);
    if (w < 0.0) w += period;
    if (w >= period) w -= period;
    return w;
}

}  // namespace

ChartFactor ChartFactor::periodic(std::size_t coord, double period) {
    if (!(period > 0.0)) throw std::invalid_argument("periodic factor needs a positive period");
    ChartFactor f;
    f.kind = Kind::Periodic;
    f.coords = {coord};
    f.period = period;
    return f;
}

ChartFactor ChartFactor::interval(std::size_t coord, double lo, double hi) {
    if (!(hi > lo)) throw std::invalid_argument("interval factor must be nondegenerate");
    ChartFactor f;
    f.kind = Kind::Interval;
    f.coords = {coord};
    f.lo = lo;
    f.hi = hi;
    return f;
}

ChartFactor ChartFactor::ball(std::vector<std::size_t> coords, double radius) {
    if (coords.empty() || !(radius > 0.0)) throw std::invalid_argument("ball factor needs coordinates and a positive radius");
    ChartFactor f;
    f.kind = Kind::Ball;
    f.coords = std::move(coords);
    f.radius = radius;
    return f;
}

std::size_t ChartFactor::sample_dimension() const {
    if (kind != Kind::Ball) return 1;
    return coords.size() <= 2 ? coords.size() : coords.size() + 1;
}

Chart::Chart(std::size_t dim, std::vector<ChartFactor> factors, double interior_margin)
    : dim_(dim), factors_(std::move(factors)), periods_(dim, 0.0), interior_margin_(interior_margin) {
    std::vector<int> seen(dim, 0);
    for (const auto& f : factors_)
        for (std::size_t c : f.coords) {
            if (c >= dim) throw std::invalid_argument("chart factor coordinate out of range");
            ++seen[c];
            if (f.kind == ChartFactor::Kind::Periodic) periods_[c] = f.period;
        }
    for (int s : seen)
        if (s != 1) throw std::invalid_argument("each chart coordinate must belong to exactly one factor");
    if (!(interior_margin > 0.0)) throw std::invalid_argument("interior margin must be positive");
}

Point Chart::reduce(Point p) const {
    for (std::size_t i = 0; i < dim_; ++i)
        if (periods_[i] > 0.0) p[static_cast<long>(i)] = wrap(p[static_cast<long>(i)], periods_[i]);
    return p;
}

Point Chart::difference(const Point& a, const Point& b) const {
    Point d = a - b;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double per = periods_[i];
        if (per > 0.0) {
            double v = wrap(d[static_cast<long>(i)] + 0.5 * per, per) - 0.5 * per;
            d[static_cast<long>(i)] = v;
        }
    }
    return d;
}

double Chart::distance(const Point& a, const Point& b) const { return difference(a, b).norm(); }

double Chart::signed_margin(const Point& p) const {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& f : factors_) {
        switch (f.kind) {
            case ChartFactor::Kind::Periodic:
                break;
            case ChartFactor::Kind::Interval: {
                const double v = p[static_cast<long>(f.coords[0])];
                margin = std::min(margin, std::min(v - f.lo, f.hi - v));
                break;
            }
            case ChartFactor::Kind::Ball: {
                double r2 = 0.0;
                for (std::size_t c : f.coords) r2 += p[static_cast<long>(c)] * p[static_cast<long>(c)];
                margin = std::min(margin, f.radius - std::sqrt(r2));
                break;
            }
        }
        if (std::isnan(margin)) return -std::numeric_limits<double>::infinity();
    }
    return margin;
}

std::optional<double> Chart::collar_tau(const Point& p) const {
    for (const auto& f : factors_) {
        if (f.kind == ChartFactor::Kind::Ball) {
            double r2 = 0.0;
            for (std::size_t c : f.coords) r2 += p[static_cast<long>(c)] * p[static_cast<long>(c)];
            return std::sqrt(r2) - f.radius;
        }
        if (f.kind == ChartFactor::Kind::Interval) {
            const double v = p[static_cast<long>(f.coords[0])];
            return -std::min(v - f.lo, f.hi - v);
        }
    }
    return std::nullopt;
}

std::size_t Chart::sample_dimension() const {
    std::size_t d = 0;
    for (const auto& f : factors_) d += f.sample_dimension();
    return d;
}

Point Chart::sample(std::span<const double> u, bool on_boundary) const {
    if (u.size() < sample_dimension()) throw std::invalid_argument("Chart::sample: not enough coordinates");
    Point p = Point::Zero(static_cast<long>(dim_));
    std::size_t k = 0;
    for (const auto& f : factors_) {
        switch (f.kind) {
            case ChartFactor::Kind::Periodic:
                p[static_cast<long>(f.coords[0])] = u[k++] * f.period;
                break;
            case ChartFactor::Kind::Interval: {
                const double t = u[k++];
                double v = f.lo + t * (f.hi - f.lo);
                if (on_boundary) v = t < 0.5 ? f.lo : f.hi;
                p[static_cast<long>(f.coords[0])] = v;
                break;
            }
            case ChartFactor::Kind::Ball: {
                const std::size_t d = f.coords.size();
                if (d == 1) {
                    const double t = u[k++];
                    double v = f.radius * (2.0 * t - 1.0);
                    if (on_boundary) v = t < 0.5 ? -f.radius : f.radius;
                    p[static_cast<long>(f.coords[0])] = v;
                } else if (d == 2) {
                    const double r = on_boundary ? f.radius : f.radius * std::sqrt(u[k]);
                    const double a = 2.0 * std::numbers::pi * u[k + 1];
                    k += 2;
                    p[static_cast<long>(f.coords[0])] = r * std::cos(a);
                    p[static_cast<long>(f.coords[1])] = r * std::sin(a);
                } else {
                    const double r = on_boundary ? f.radius : f.radius * std::pow(u[k], 1.0 / static_cast<double>(d));
                    Eigen::VectorXd dir(static_cast<long>(d));
                    for (std::size_t i = 0; i < d; ++i) {
                        const double t = std::clamp(u[k + 1 + i], 1e-12, 1.0 - 1e-12);
                        dir[static_cast<long>(i)] = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * t - 1.0);
                    }
                    k += d + 1;
                    const double norm = dir.norm();
                    if (norm > 0.0) dir /= norm;
                    for (std::size_t i = 0; i < d; ++i) p[static_cast<long>(f.coords[i])] = r * dir[static_cast<long>(i)];
                }
                break;
            }
        }
    }
    return p;
}

QuasiRandom::QuasiRandom(std::size_t dim, std::uint64_t seed) : shift_(dim, 0.0) {
    if (dim > std::size(kPrimes)) throw std::invalid_argument("QuasiRandom: dimension too large");
    std::mt19937_64 rng(seed);
    for (auto& s : shift_) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> QuasiRandom::at(std::uint64_t index) const {
    std::vector<double> u(shift_.size());
    for (std::size_t i = 0; i < shift_.size(); ++i) {
        double v = radical_inverse(index + 1, kPrimes[i]) + shift_[i];
        if (v >= 1.0) v -= 1.0;
        u[i] = v;
    }
    return u;
}

std::vector<Point> sample_chart(const Chart& chart, const SamplingPlan& plan) {
    const QuasiRandom qr(chart.sample_dimension(), plan.seed);
    std::vector<Point> out;
    out.reserve(plan.count);

    std::uint64_t index = 0;
    if (plan.include_poles) {
        for (const auto& f : chart.factors()) {
            if (f.kind == ChartFactor::Kind::Periodic) continue;
            for (std::size_t c : f.coords) {
                for (double sign : {-1.0, 1.0}) {
                    if (out.size() >= plan.count) return out;
                    const auto u = qr.at(index++);
                    Point p = chart.sample(u, false);
                    if (f.kind == ChartFactor::Kind::Interval) {
                        p[static_cast<long>(c)] = sign < 0 ? f.lo : f.hi;
                    } else {
                        for (std::size_t other : f.coords) p[static_cast<long>(other)] = 0.0;
                        p[static_cast<long>(c)] = sign * f.radius;
                    }
                    out.push_back(std::move(p));
                }
            }
        }
    }
    const auto boundary =
        static_cast<std::size_t>(std::floor(plan.boundary_fraction * static_cast<double>(plan.count)));
    for (std::size_t i = 0; i < boundary && out.size() < plan.count; ++i) out.push_back(chart.sample(qr.at(index++), true));
    while (out.size() < plan.count) out.push_back(chart.sample(qr.at(index++), false));
    return out;
}

}  // namespace liouville::contact
