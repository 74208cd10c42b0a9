#pragma once

// Search for hyperbolic toral automorphisms A in SL(n, Z) with all-real
// spectrum: n-2 eigenvalues close to a prescribed tuple mu, one eigenvalue
// larger than 1/eps in magnitude and one smaller than eps.
//
// Pipeline: seed the middle eigenvalues near mu, reduce the Vieta system to
// the (n-2)-dimensional "dynamics" x(r) + k1 r = k', scan k1 until the
// orbit lands eps-close to the integer lattice, Newton-solve the system
// exactly for the middle eigenvalues, solve the remaining quadratic for the
// large/small pair, then hand the integer tuple to exactlin for an exact
// certificate.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "liouville/exactlin.hpp"

namespace liouville::spectrum {

using exactlin::Integer;
using exactlin::IntMatrix;
using exactlin::IntPolynomial;
using exactlin::RootInterval;

struct SpectrumRequest {
    std::size_t n = 2;
    std::vector<double> mu;  // length n - 2
    double eps = 0.5;
    std::int64_t k1_max = 100000;
    std::uint64_t seed = 0;

    // Throws InvalidRequest.
    void validate() const;
};

struct SeedLambdas {
    std::vector<double> lams;
};

// sigma_1 .. sigma_m of m values. Indexing through at() applies the
// conventions sigma_0 = 1, sigma_{m+1} = 0 (and 0 below index 0).
struct SigmaVector {
    std::vector<double> sigma;

    std::size_t size() const { return sigma.size(); }
    double at(long j) const;
    // sigma_m, or sigma_0 = 1 when m = 0.
    double top() const { return at(static_cast<long>(sigma.size())); }
};

struct ScanHit {
    std::int64_t k1 = 0;
    std::vector<std::int64_t> kprime;
    double distance = 0.0;
};

struct NewtonResult {
    std::vector<double> lams;
    int iterations = 0;
    double residual = 0.0;
};

struct SpectrumCertificate {
    IntMatrix a{2};
    std::vector<Integer> k;            // sigma_i(all roots) = k_i, i = 1..n-1 (k_n = 1)
    std::vector<Integer> companion_k;  // argument given to companion_matrix (k reversed)
    IntPolynomial char_poly;
    std::size_t sturm_count = 0;
    bool square_free = false;
    // Labeled roots: [0, n-2) middle, n-2 the large one, n-1 the small one.
    std::vector<RootInterval> roots;
    std::vector<double> lambdas;  // float construction, same labeling
    std::vector<double> seed_lambdas;
    bool condition1 = false;  // |lambda_i - mu_i| < eps
    bool condition2 = false;  // |lambda_{n-1}| > 1/eps and |lambda_n| < eps
    // recursion 1, recursion 2 for j = 2..n-1, recursion 3.
    std::vector<double> recursion_residuals;
    double dynamics_residual = 0.0;
    double rounding_error = 0.0;
    double scan_distance = 0.0;
    int newton_iterations = 0;
    std::int64_t k1 = 0;
    int attempts = 0;

    std::size_t n() const { return a.size(); }
    // Root indices reordered so the smallest-magnitude root comes last
    // (the Anosov labeling 0 < lambda_n < |lambda_i|).
    std::vector<std::size_t> anosov_order() const;
};

SigmaVector elementary_symmetric(std::span<const double> lams);

// x_j = sigma_j - sigma_1 sigma_{j-1} + sigma_{j-2} / sigma_m, j = 2..m+1.
std::vector<double> x_vector(const SigmaVector& sigma);

// sigma_j + (k1 - sigma_1) sigma_{j-1} + sigma_{j-2} / sigma_m - k_j, j = 2..m+1.
std::vector<double> residual_dynamics(const SigmaVector& sigma, double k1, std::span<const double> kprime);
std::vector<double> residual_dynamics(const SigmaVector& sigma, std::int64_t k1,
                                      std::span<const std::int64_t> kprime);

// Jacobian of residual_dynamics(elementary_symmetric(lams), k1, .) in lams,
// using d sigma_j / d lambda_i = sigma_{j-1}(lams without lambda_i).
Eigen::MatrixXd dynamics_jacobian(std::span<const double> lams, double k1);

// First k1 in [k1_min, k1_max] with |x + k1 r - round(x + k1 r)|_inf < eps.
// Rounding is half-to-even. The range is split across workers; the smallest
// successful k1 wins.
std::optional<ScanHit> ergodic_scan(std::span<const double> x, const SigmaVector& r, double eps,
                                    std::int64_t k1_min, std::int64_t k1_max);

NewtonResult newton_refine(std::span<const double> kprime, double k1, const SeedLambdas& seed, double tol,
                           int max_iterations = 50);
NewtonResult newton_refine(std::span<const std::int64_t> kprime, std::int64_t k1, const SeedLambdas& seed,
                           double tol, int max_iterations = 50);

// Real roots of t^2 - sum t + product, larger magnitude first.
std::pair<double, double> solve_quadratic_pair(double sum, double product);

// (lambda_{n-1}, lambda_n) with sum k1 - sigma_1 and product 1 / sigma_m.
std::pair<double, double> solve_tail(const SigmaVector& sigma, double k1);

SeedLambdas seed_lambdas(const SpectrumRequest& request);

SpectrumCertificate find_matrix(const SpectrumRequest& request);

// Elementary symmetric functions of the certificate's root intervals in
// exact interval arithmetic; true when each contains the integer k_i
// (and k_n = 1).
bool vieta_consistent(const SpectrumCertificate& cert);

// Re-derives conditions (1), (2) for a certificate against (mu, eps) from
// its exact root intervals.
std::pair<bool, bool> check_conditions(const SpectrumCertificate& cert, std::span<const double> mu, double eps);

}  // namespace liouville::spectrum
