#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace liouville::contact {

using Point = Eigen::VectorXd;

// One factor of a product chart. Periodic factors are circles of the given
// period; intervals and balls are the bounded factors that (D1) constrains.
struct ChartFactor {
    enum class Kind { Periodic, Interval, Ball };

    Kind kind = Kind::Interval;
    std::vector<std::size_t> coords;
    double period = 1.0;
    double lo = -1.0;
    double hi = 1.0;
    double radius = 1.0;

    static ChartFactor periodic(std::size_t coord, double period = 1.0);
    static ChartFactor interval(std::size_t coord, double lo, double hi);
    static ChartFactor ball(std::vector<std::size_t> coords, double radius = 1.0);

    std::size_t sample_dimension() const;
};

class Chart {
public:
    Chart() = default;
    // Every coordinate in [0, dim) must belong to exactly one factor.
    Chart(std::size_t dim, std::vector<ChartFactor> factors, double interior_margin = 1e-3);

    std::size_t dim() const { return dim_; }
    const std::vector<ChartFactor>& factors() const { return factors_; }
    double interior_margin() const { return interior_margin_; }

    bool is_periodic(std::size_t coord) const { return periods_[coord] > 0.0; }
    // 0 for non-periodic coordinates.
    const std::vector<double>& periods() const { return periods_; }

    Point reduce(Point p) const;
    // Wrapped a - b, periodic components in [-period/2, period/2).
    Point difference(const Point& a, const Point& b) const;
    double distance(const Point& a, const Point& b) const;

    // Smallest distance to the boundary over the bounded factors, negative
    // outside; +inf when every factor is periodic.
    double signed_margin(const Point& p) const;
    bool contains(const Point& p) const { return signed_margin(p) >= 0.0; }

    // Radial collar coordinate tau = r - R of the first ball factor (for an
    // interval: distance to the nearer end, negated). Empty without one.
    std::optional<double> collar_tau(const Point& p) const;

    std::size_t sample_dimension() const;
    // Maps a point of the unit cube of sample_dimension() into the chart,
    // area-preserving on balls. With on_boundary the bounded factors are
    // pushed onto their boundary.
    Point sample(std::span<const double> u, bool on_boundary = false) const;

private:
    std::size_t dim_ = 0;
    std::vector<ChartFactor> factors_;
    std::vector<double> periods_;
    double interior_margin_ = 1e-3;
};

// Halton sequence in the given dimension with a Cranley-Patterson shift
// drawn from seed. Index 0 is skipped.
class QuasiRandom {
public:
    QuasiRandom(std::size_t dim, std::uint64_t seed);
    std::vector<double> at(std::uint64_t index) const;
    std::size_t dim() const { return shift_.size(); }

private:
    std::vector<double> shift_;
};

struct SamplingPlan {
    std::size_t count = 1000;
    std::uint64_t seed = 0;
    // Share of quasi-random points placed on the chart boundary; the poles of
    // each bounded factor are always included on top of that share.
    double boundary_fraction = 0.0;
    bool include_poles = false;
};

std::vector<Point> sample_chart(const Chart& chart, const SamplingPlan& plan);

}  // namespace liouville::contact
