#pragma once

// Partial mapping torus of a contraction phi: M -> M,
//   W = {(s, x) : 0 <= s <= G(x)} / (s, x) ~ Phi(s, x),
//   Phi(s, x) = (s + G(phi(x)), phi(x)),
// with Liouville form lambda = e^s alpha. G extends g o phi^{-1} where
// phi^* alpha = e^{-g} alpha, so Phi^* lambda = lambda.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "liouville/contact_kernel.hpp"

namespace liouville::torus {

using contact::ContactModel;
using contact::Point;

enum class GMode { Constant, Blend, Auto };

struct MappingTorusModel {
    ContactModel base;
    std::function<double(const Point&)> G;
    double tilt_eps = 0.05;
    std::string g_mode;       // "constant", "blend" or "forced"
    double g_mean = 0.0;      // sampled mean of g over M
    double g_min = 0.0;       // sampled range of g over M
    double g_max = 0.0;
    bool constant_G = false;  // G is a single number
};

struct ExtendOptions {
    double tilt_eps = 0.05;
    std::size_t samples = 2000;
    std::uint64_t seed = 0;
    double constant_tol = 1e-9;
};

// Constant: G = mean of sampled g, NonConstantG when the samples spread by
// more than constant_tol. Blend: G(p) = g(phi^{-1}(p)) on phi(M), feathered
// to the mean of g over tilt_eps outside, clamped >= min(g)/2. Auto picks
// constant when it applies.
MappingTorusModel extend_G(const ContactModel& base, GMode mode, const ExtendOptions& options = {});
// G fixed to a given constant regardless of g (used to inject wrong G).
MappingTorusModel with_constant_G(const ContactModel& base, double G, double tilt_eps = 0.05);

// g(p) = -log of the conformal factor of phi at p.
double g_at(const ContactModel& base, const Point& p);

// (Phi^* lambda - lambda) at (s, x) as a covector on (s, x).
Eigen::VectorXd descent_residual(const MappingTorusModel& model, double s, const Point& x);

struct DescentReport {
    double max_residual = 0.0;
    std::size_t samples = 0;
    double tol = 0.0;
    double worst_s = 0.0;
    Point worst_x;
    bool pass = false;
};

// Max componentwise residual over quasi-random (s, x), s in [0, g_max].
// Throws DescentViolation on failure unless throw_on_violation is false.
DescentReport descent_check(const MappingTorusModel& model, std::size_t samples, double tol,
                            std::uint64_t seed = 0, bool throw_on_violation = true);

struct FundamentalDomainPoint {
    double s = 0.0;
    Point x;
    int steps = 0;  // signed count of identifications applied
};

// Applies (s, x) -> (s + G(phi(x)), phi(x)) while s < 0 and
// (s, x) -> (s - G(x), phi^{-1}(x)) while s >= G(x). LeftDomain when the
// inverse step leaves M.
FundamentalDomainPoint normalize_fundamental(double s, const Point& x, const MappingTorusModel& model,
                                             int max_steps = 10000);

// -eps s / G(x) < tau(x) <= 0 with tau the radial collar coordinate;
// false outside the collar [-eps, 0].
bool in_tilt_region_P(double s, const Point& x, const MappingTorusModel& model);

struct TransversalityReport {
    double tilted_min = 0.0;      // d s-component of the tilted face conormal
    double horizontal_min = 0.0;  // same for the horizontal face s = G(x)
    double min_margin = 0.0;
    std::size_t samples = 0;
    bool pass = false;
};

TransversalityReport boundary_transversality_check(const MappingTorusModel& model, std::size_t samples,
                                                   std::uint64_t seed = 0);

struct SkeletonSample {
    std::string model;
    int depth = 0;
    std::size_t seed_count = 0;
    std::uint64_t rng_seed = 0;
    std::vector<Point> points;  // phi^depth of the kept seeds
    std::vector<Point> seeds;   // initial point of each kept orbit
};

SkeletonSample iterate_attractor(const ContactModel& model, int depth, std::size_t seeds, std::uint64_t rng_seed = 0);

// Indices that survive removing, from every pair closer than tol (chart
// metric), the later point.
std::vector<std::size_t> dedupe_indices(const std::vector<Point>& points, const contact::Chart& chart, double tol);

// Sample points within thickness of theta0 along the model's section
// coordinate. With snap, each orbit's seed is slid along that coordinate so
// its image lands on theta0 exactly. Returns the remaining coordinates.
std::vector<Point> cross_section(const SkeletonSample& sample, const ContactModel& model, double theta0,
                                 double thickness, bool snap = true);

// Single-linkage clusters at the given link distance.
std::size_t count_clusters(const std::vector<Point>& points, double link);

struct BoxCountResult {
    std::vector<double> scales;
    std::vector<std::size_t> counts;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Grid anchored at the origin. A single point gives slope 0; two or more
// coincident points raise DegenerateCloud.
BoxCountResult box_counting_dimension(const std::vector<Point>& cloud, std::vector<double> scales);

struct SkeletonEstimate {
    double estimate = 0.0;
    std::string method;  // "section" or "cloud"
    BoxCountResult box;
    std::size_t cloud_size = 0;
    std::size_t section_size = 0;
};

struct SkeletonOptions {
    double theta0 = 0.0;
    double thickness = 0.05;
    std::vector<double> scales;  // defaults depend on the method
    std::uint64_t rng_seed = 0;
};

std::vector<double> default_section_scales();
std::vector<double> default_cloud_scales();

// 2 + box-dim of the theta0 cross-section for models with a section
// coordinate, otherwise 1 + box-dim of the attractor cloud.
SkeletonEstimate skeleton_dimension(const ContactModel& model, const SkeletonSample& sample,
                                    const SkeletonOptions& options = {});
SkeletonEstimate skeleton_dimension(const ContactModel& model, int depth, std::size_t seeds,
                                    const SkeletonOptions& options = {});

// Header row then one point per row; beyond max_rows a uniform stride is
// applied. Returns the number of rows written.
std::size_t write_csv(std::ostream& out, const std::vector<Point>& points, const std::vector<std::string>& header,
                      std::size_t max_rows = 10000000);

}  // namespace liouville::torus
