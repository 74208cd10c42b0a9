#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "liouville/errors.hpp"
#include "liouville/parallel.hpp"
#include "liouville/torus_builder.hpp"

namespace liouville::torus {

namespace {

struct CellHash {
    std::size_t operator()(const std::vector<std::int64_t>& key) const {
        std::uint64_t h = 1469598103934665603ULL;
        for (std::int64_t v : key) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent_[std::max(a, b)] = std::min(a, b);
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

std::vector<std::int64_t> cell_of(const Point& p, double size) {
    std::vector<std::int64_t> key(static_cast<std::size_t>(p.size()));
    for (long i = 0; i < p.size(); ++i) key[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(p[i] / size));
    return key;
}

}  // namespace

std::size_t count_clusters(const std::vector<Point>& points, double link) {
    if (!(link > 0.0)) throw InvalidRequest("link distance must be positive");
    if (points.empty()) return 0;
    const long dim = points.front().size();
    std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, CellHash> grid;
    for (std::size_t i = 0; i < points.size(); ++i) grid[cell_of(points[i], link)].push_back(i);

    DisjointSets sets(points.size());
    std::size_t clusters = points.size();
    std::vector<std::int64_t> offset(static_cast<std::size_t>(dim));
    const double link2 = link * link;
    for (const auto& [cell, members] : grid) {
        // Visit the 3^dim neighbouring cells.
        std::size_t combos = 1;
        for (long d = 0; d < dim; ++d) combos *= 3;
        for (std::size_t code = 0; code < combos; ++code) {
            std::size_t rest = code;
            std::vector<std::int64_t> other = cell;
            for (long d = 0; d < dim; ++d) {
                other[static_cast<std::size_t>(d)] += static_cast<std::int64_t>(rest % 3) - 1;
                rest /= 3;
            }
            const auto it = grid.find(other);
            if (it == grid.end()) continue;
            for (std::size_t a : members)
                for (std::size_t b : it->second) {
                    if (b <= a) continue;
                    if ((points[a] - points[b]).squaredNorm() < link2 && sets.unite(a, b)) --clusters;
                }
        }
    }
    return clusters;
}

std::vector<double> default_section_scales() {
    std::vector<double> scales;
    for (int i = 1; i <= 6; ++i) scales.push_back(std::pow(10.0, -i));
    return scales;
}

std::vector<double> default_cloud_scales() {
    std::vector<double> scales;
    for (int i = 2; i <= 6; ++i) scales.push_back(std::ldexp(1.0, -i));
    return scales;
}

BoxCountResult box_counting_dimension(const std::vector<Point>& cloud, std::vector<double> scales) {
    if (cloud.empty()) throw DegenerateCloud("empty cloud");
    std::sort(scales.begin(), scales.end(), std::greater<>());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
    if (scales.size() < 2) throw InvalidRequest("box counting needs at least two distinct scales");
    for (double s : scales)
        if (!(s > 0.0) || !std::isfinite(s)) throw InvalidRequest("box scales must be positive");

    const long dim = cloud.front().size();
    if (cloud.size() >= 2) {
        bool all_same = true;
        for (const auto& p : cloud)
            if (p != cloud.front()) {
                all_same = false;
                break;
            }
        if (all_same) throw DegenerateCloud("all points coincide");
    }

    BoxCountResult out;
    out.scales = scales;
    const std::size_t n = cloud.size();
    const auto d = static_cast<std::size_t>(dim);
    std::vector<std::int64_t> keys(n * d);
    std::vector<std::size_t> order(n);
    for (double scale : scales) {
        parallel_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t) {
            for (std::size_t i = begin; i < end; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    keys[i * d + j] = static_cast<std::int64_t>(std::floor(cloud[i][static_cast<long>(j)] / scale));
        });
        std::iota(order.begin(), order.end(), 0);
        auto less = [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(keys.begin() + static_cast<long>(a * d), keys.begin() + static_cast<long>((a + 1) * d),
                                                keys.begin() + static_cast<long>(b * d), keys.begin() + static_cast<long>((b + 1) * d));
        };
        std::sort(order.begin(), order.end(), less);
        std::size_t count = n ? 1 : 0;
        for (std::size_t i = 1; i < n; ++i)
            if (less(order[i - 1], order[i])) ++count;
        out.counts.push_back(count);
    }

    // Least squares of log(count) against log(1 / scale).
    const auto m = static_cast<double>(scales.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        sx += -std::log(scales[i]);
        sy += std::log(static_cast<double>(out.counts[i]));
    }
    const double mx = sx / m;
    const double my = sy / m;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        const double dx = -std::log(scales[i]) - mx;
        const double dy = std::log(static_cast<double>(out.counts[i])) - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    return out;
}

std::size_t write_csv(std::ostream& out, const std::vector<Point>& points, const std::vector<std::string>& header,
                      std::size_t max_rows) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    if (points.empty() || max_rows == 0) return 0;
    const std::size_t stride = (points.size() + max_rows - 1) / max_rows;
    std::size_t rows = 0;
    char buf[32];
    for (std::size_t i = 0; i < points.size(); i += stride) {
        const Point& p = points[i];
        for (long j = 0; j < p.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", p[j]);
            out << (j ? "," : "") << buf;
        }
        out << '\n';
        ++rows;
    }
    return rows;
}

}  // namespace liouville::torus
