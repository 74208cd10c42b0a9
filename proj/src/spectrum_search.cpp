#include "liouville/spectrum_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "liouville/errors.hpp"
#include "liouville/parallel.hpp"

namespace liouville::spectrum {

namespace {

using exactlin::Rational;

constexpr double kCollision = 1e-6;
constexpr double kMinSigmaTop = 1e-9;
constexpr double kRoundingLimit = 1e-6;
constexpr double kRootTol = 1e-12;
constexpr int kReseeds = 3;

double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool collides(std::span<const double> lams, double gap) {
    for (std::size_t i = 0; i < lams.size(); ++i)
        for (std::size_t j = i + 1; j < lams.size(); ++j)
            if (std::abs(lams[i] - lams[j]) < gap) return true;
    return false;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Interval product/sum over exact rationals, used for the Vieta check.
struct RatInterval {
    Rational lo, hi;
};

RatInterval mul(const RatInterval& a, const RatInterval& b) {
    Rational c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

RatInterval add(const RatInterval& a, const RatInterval& b) { return {a.lo + b.lo, a.hi + b.hi}; }

}  // namespace

void SpectrumRequest::validate() const {
    if (n < 2) throw InvalidRequest("n must be at least 2");
    if (mu.size() != n - 2)
        throw InvalidRequest("mu must have exactly n-2 = " + std::to_string(n - 2) + " entries, got " +
                             std::to_string(mu.size()));
    if (!(eps > 0.0) || !std::isfinite(eps)) throw InvalidRequest("eps must be a positive finite number");
    if (k1_max < 1) throw InvalidRequest("k1_max must be at least 1");
    for (double m : mu)
        if (!std::isfinite(m)) throw InvalidRequest("mu entries must be finite");
}

double SigmaVector::at(long j) const {
    if (j < 0) return 0.0;
    if (j == 0) return 1.0;
    if (static_cast<std::size_t>(j) > sigma.size()) return 0.0;
    return sigma[static_cast<std::size_t>(j - 1)];
}

std::vector<std::size_t> SpectrumCertificate::anosov_order() const {
    std::vector<std::size_t> idx(roots.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (idx.empty()) return idx;
    auto smallest = std::min_element(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(lambdas[a]) < std::abs(lambdas[b]);
    });
    std::rotate(smallest, smallest + 1, idx.end());
    return idx;
}

SigmaVector elementary_symmetric(std::span<const double> lams) {
    std::vector<double> e(lams.size() + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t i = 0; i < lams.size(); ++i)
        for (std::size_t j = i + 1; j >= 1; --j) e[j] += lams[i] * e[j - 1];
    return SigmaVector{std::vector<double>(e.begin() + 1, e.end())};
}

std::vector<double> x_vector(const SigmaVector& sigma) {
    const long m = static_cast<long>(sigma.size());
    const double top = sigma.top();
    if (m > 0 && top == 0.0) throw DegenerateSigma("sigma_{n-2} vanishes");
    std::vector<double> x;
    x.reserve(sigma.size());
    for (long j = 2; j <= m + 1; ++j)
        x.push_back(sigma.at(j) - sigma.at(1) * sigma.at(j - 1) + sigma.at(j - 2) / top);
    return x;
}

std::vector<double> residual_dynamics(const SigmaVector& sigma, double k1, std::span<const double> kprime) {
    const long m = static_cast<long>(sigma.size());
    if (kprime.size() != sigma.size()) throw std::invalid_argument("residual_dynamics: k' must have length n-2");
    const double top = sigma.top();
    if (m > 0 && top == 0.0) throw DegenerateSigma("sigma_{n-2} vanishes");
    std::vector<double> out;
    out.reserve(sigma.size());
    for (long j = 2; j <= m + 1; ++j) {
        out.push_back(sigma.at(j) + (k1 - sigma.at(1)) * sigma.at(j - 1) + sigma.at(j - 2) / top -
                      kprime[static_cast<std::size_t>(j - 2)]);
    }
    return out;
}

std::vector<double> residual_dynamics(const SigmaVector& sigma, std::int64_t k1,
                                      std::span<const std::int64_t> kprime) {
    std::vector<double> kp(kprime.begin(), kprime.end());
    return residual_dynamics(sigma, static_cast<double>(k1), kp);
}

Eigen::MatrixXd dynamics_jacobian(std::span<const double> lams, double k1) {
    const std::size_t m = lams.size();
    const SigmaVector sigma = elementary_symmetric(lams);
    const double top = sigma.top();
    Eigen::MatrixXd jac(m, m);
    std::vector<double> others;
    for (std::size_t i = 0; i < m; ++i) {
        others.clear();
        for (std::size_t t = 0; t < m; ++t)
            if (t != i) others.push_back(lams[t]);
        const SigmaVector omit = elementary_symmetric(others);
        // d sigma_t / d lambda_i = sigma_{t-1}(others); zero for t <= 0.
        auto d = [&](long t) { return t <= 0 ? 0.0 : omit.at(t - 1); };
        const double dtop = d(static_cast<long>(m));
        for (long j = 2; j <= static_cast<long>(m) + 1; ++j) {
            const double val = d(j) + (k1 - sigma.at(1)) * d(j - 1) - d(1) * sigma.at(j - 1) +
                               (d(j - 2) * top - sigma.at(j - 2) * dtop) / (top * top);
            jac(j - 2, static_cast<long>(i)) = val;
        }
    }
    return jac;
}

std::optional<ScanHit> ergodic_scan(std::span<const double> x, const SigmaVector& r, double eps,
                                    std::int64_t k1_min, std::int64_t k1_max) {
    if (!(eps > 0.0)) throw std::invalid_argument("ergodic_scan: eps must be positive");
    if (k1_min < 1) throw std::invalid_argument("ergodic_scan: k1_min must be at least 1");
    if (x.size() != r.size()) throw std::invalid_argument("ergodic_scan: x and r differ in length");
    const std::size_t m = x.size();

    auto distance_at = [&](std::int64_t k1, std::vector<std::int64_t>* kprime) {
        double dist = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double v = x[i] + static_cast<double>(k1) * r.sigma[i];
            const double nearest = std::nearbyint(v);  // FE_TONEAREST: ties to even
            dist = std::max(dist, std::abs(v - nearest));
            if (kprime) (*kprime)[i] = static_cast<std::int64_t>(nearest);
        }
        return dist;
    };

    const std::int64_t block = 1 << 14;
    for (std::int64_t start = k1_min; start <= k1_max; start += block) {
        const std::int64_t stop = std::min(k1_max, start + block - 1);
        const std::size_t count = static_cast<std::size_t>(stop - start + 1);
        std::vector<std::int64_t> best(worker_count() + 1, std::numeric_limits<std::int64_t>::max());
        parallel_chunks(count, [&](std::size_t b, std::size_t e, std::size_t w) {
            for (std::size_t i = b; i < e; ++i) {
                const std::int64_t k1 = start + static_cast<std::int64_t>(i);
                if (distance_at(k1, nullptr) < eps) {
                    best[w] = k1;
                    return;
                }
            }
        });
        const std::int64_t hit = *std::min_element(best.begin(), best.end());
        if (hit != std::numeric_limits<std::int64_t>::max()) {
            ScanHit out;
            out.k1 = hit;
            out.kprime.resize(m);
            out.distance = distance_at(hit, &out.kprime);
            return out;
        }
    }
    return std::nullopt;
}

NewtonResult newton_refine(std::span<const double> kprime, double k1, const SeedLambdas& seed, double tol,
                           int max_iterations) {
    const std::size_t m = seed.lams.size();
    if (kprime.size() != m) throw std::invalid_argument("newton_refine: k' must match the seed length");
    NewtonResult out{seed.lams, 0, 0.0};
    if (m == 0) return out;

    for (int it = 0; it <= max_iterations; ++it) {
        const double scale = std::max(1.0, max_abs(out.lams));
        if (collides(out.lams, 1e-12 * scale)) throw SingularJacobian("seed eigenvalues collided");
        const SigmaVector sigma = elementary_symmetric(out.lams);
        if (std::abs(sigma.top()) < std::numeric_limits<double>::min())
            throw DegenerateSigma("sigma_{n-2} vanished during Newton iteration");
        const std::vector<double> f = residual_dynamics(sigma, k1, kprime);
        out.residual = max_abs(f);
        out.iterations = it;
        if (out.residual < tol) return out;
        if (it == max_iterations) break;

        const Eigen::MatrixXd jac = dynamics_jacobian(out.lams, k1);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
        if (!lu.isInvertible()) throw SingularJacobian("Jacobian is rank deficient");
        const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<long>(m));
        const Eigen::VectorXd step = lu.solve(rhs);
        if (!step.allFinite()) throw SingularJacobian("Newton step is not finite");
        for (std::size_t i = 0; i < m; ++i) out.lams[i] -= step[static_cast<long>(i)];
    }
    throw NoConvergence("Newton did not reach residual " + std::to_string(tol) + " in " +
                        std::to_string(max_iterations) + " iterations (last " + std::to_string(out.residual) + ")");
}

NewtonResult newton_refine(std::span<const std::int64_t> kprime, std::int64_t k1, const SeedLambdas& seed,
                           double tol, int max_iterations) {
    std::vector<double> kp(kprime.begin(), kprime.end());
    return newton_refine(kp, static_cast<double>(k1), seed, tol, max_iterations);
}

std::pair<double, double> solve_quadratic_pair(double sum, double product) {
    const double disc = sum * sum - 4.0 * product;
    if (disc < 0.0) throw ComplexTail("discriminant " + std::to_string(disc) + " is negative");
    // Stable form: the larger root from the sign-matched branch, the other
    // from the product.
    const double root = std::sqrt(disc);
    const double big = sum >= 0.0 ? 0.5 * (sum + root) : 0.5 * (sum - root);
    if (big == 0.0) return {0.0, 0.0};
    const double small = product / big;
    return std::abs(big) >= std::abs(small) ? std::pair{big, small} : std::pair{small, big};
}

std::pair<double, double> solve_tail(const SigmaVector& sigma, double k1) {
    const double top = sigma.top();
    if (top == 0.0) throw DegenerateSigma("sigma_{n-2} vanishes");
    return solve_quadratic_pair(k1 - sigma.at(1), 1.0 / top);
}

SeedLambdas seed_lambdas(const SpectrumRequest& request) {
    request.validate();
    std::mt19937_64 rng(request.seed);
    double spread = request.eps / 4.0;
    const double widest = request.eps / 2.0 * 0.999;
    SeedLambdas out;
    out.lams.resize(request.mu.size());
    for (int draw = 1;; ++draw) {
        for (std::size_t i = 0; i < request.mu.size(); ++i)
            out.lams[i] = request.mu[i] + (2.0 * unit_draw(rng) - 1.0) * spread;
        const SigmaVector sigma = elementary_symmetric(out.lams);
        if (!collides(out.lams, kCollision) && std::abs(sigma.top()) >= kMinSigmaTop) return out;
        if (draw % 100 == 0) spread = std::min(widest, spread * 2.0);
        if (draw > 100000) throw InvalidRequest("could not draw distinct non-degenerate seeds");
    }
}

namespace {

std::optional<SpectrumCertificate> certify_candidate(const SpectrumRequest& req, const SeedLambdas& seed,
                                                      const ScanHit& hit) {
    const std::size_t n = req.n;
    const std::size_t m = n - 2;
    SpectrumCertificate cert;
    cert.k1 = hit.k1;
    cert.scan_distance = hit.distance;
    cert.seed_lambdas = seed.lams;

    const NewtonResult refined = newton_refine(hit.kprime, hit.k1, seed, 1e-11);
    cert.newton_iterations = refined.iterations;
    const SigmaVector sigma = elementary_symmetric(refined.lams);
    const auto [big, small] = solve_tail(sigma, static_cast<double>(hit.k1));

    cert.lambdas = refined.lams;
    cert.lambdas.push_back(big);
    cert.lambdas.push_back(small);

    // Cheap float screen before the exact work.
    for (std::size_t i = 0; i < m; ++i)
        if (!(std::abs(refined.lams[i] - req.mu[i]) < req.eps)) return std::nullopt;
    if (!(std::abs(big) > 1.0 / req.eps) || !(std::abs(small) < req.eps)) return std::nullopt;

    // Integer assembly: k_j re-derived from the dynamics must round cleanly.
    const double k1d = static_cast<double>(hit.k1);
    double rounding = 0.0;
    for (long j = 2; j <= static_cast<long>(m) + 1; ++j) {
        const double kj = sigma.at(j) + (k1d - sigma.at(1)) * sigma.at(j - 1) + sigma.at(j - 2) / sigma.top();
        rounding = std::max(rounding, std::abs(kj - static_cast<double>(hit.kprime[static_cast<std::size_t>(j - 2)])));
    }
    cert.rounding_error = rounding;
    if (!(rounding < kRoundingLimit)) return std::nullopt;
    cert.dynamics_residual = refined.residual;

    cert.k.reserve(n - 1);
    cert.k.emplace_back(static_cast<long>(hit.k1));
    for (std::int64_t kj : hit.kprime) cert.k.emplace_back(static_cast<long>(kj));
    cert.companion_k.assign(cert.k.rbegin(), cert.k.rend());

    // Residuals of the original recursion in the float solution.
    const double pair_sum = big + small;
    const double pair_prod = big * small;
    cert.recursion_residuals.push_back(sigma.at(1) + pair_sum - k1d);
    for (long j = 2; j <= static_cast<long>(n) - 1; ++j)
        cert.recursion_residuals.push_back(sigma.at(j) + pair_sum * sigma.at(j - 1) + pair_prod * sigma.at(j - 2) -
                                           cert.k[static_cast<std::size_t>(j - 1)].get_d());
    cert.recursion_residuals.push_back(sigma.top() * pair_prod - 1.0);

    // Exact verification on the integer matrix.
    cert.a = exactlin::companion_matrix(cert.companion_k);
    if (exactlin::determinant(cert.a) != 1) return std::nullopt;
    cert.char_poly = exactlin::char_poly(cert.a);
    if (!(cert.char_poly == exactlin::companion_polynomial(cert.companion_k))) return std::nullopt;
    exactlin::RootIsolation iso;
    try {
        iso = exactlin::sturm_isolate(cert.char_poly, true);
    } catch (const SquareFreeViolation&) {
        return std::nullopt;
    }
    cert.square_free = iso.square_free;
    cert.sturm_count = iso.count_real;
    if (iso.count_real != n) return std::nullopt;

    std::vector<RootInterval> exact;
    exact.reserve(n);
    for (const auto& iv : iso.intervals) exact.push_back(exactlin::refine_root(cert.char_poly, iv, kRootTol));

    // Label the exact roots by the float construction they came from.
    std::vector<bool> used(n, false);
    cert.roots.resize(n);
    for (std::size_t label = 0; label < n; ++label) {
        std::size_t best = n;
        double best_gap = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < n; ++r) {
            if (used[r]) continue;
            const double gap = std::abs(exact[r].midpoint() - cert.lambdas[label]);
            if (gap < best_gap) {
                best_gap = gap;
                best = r;
            }
        }
        used[best] = true;
        cert.roots[label] = exact[best];
    }

    const auto [c1, c2] = check_conditions(cert, req.mu, req.eps);
    cert.condition1 = c1;
    cert.condition2 = c2;
    if (!c1 || !c2) return std::nullopt;
    return cert;
}

}  // namespace

SpectrumCertificate find_matrix(const SpectrumRequest& request) {
    request.validate();
    std::int64_t budget = request.k1_max;
    for (int attempt = 0; attempt <= kReseeds; ++attempt) {
        SpectrumRequest req = request;
        req.seed = request.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(attempt);
        const SeedLambdas seed = seed_lambdas(req);
        const SigmaVector sigma = elementary_symmetric(seed.lams);
        const std::vector<double> x = x_vector(sigma);
        std::int64_t k1_min = 1;
        while (k1_min <= budget) {
            const auto hit = ergodic_scan(x, sigma, request.eps, k1_min, budget);
            if (!hit) break;
            k1_min = hit->k1 + 1;
            try {
                if (auto cert = certify_candidate(req, seed, *hit)) {
                    cert->attempts = attempt + 1;
                    return *cert;
                }
            } catch (const Error&) {
                // Complex tail, singular or non-converging Newton: keep scanning.
            }
        }
        budget *= 2;
    }
    throw SearchExhausted("no certified matrix with k1 <= " + std::to_string(budget / 2) +
                          "; raise k1_max or change the seed");
}

bool vieta_consistent(const SpectrumCertificate& cert) {
    const std::size_t n = cert.roots.size();
    if (n != cert.n() || cert.k.size() + 1 != n) return false;
    std::vector<RatInterval> e(n + 1, RatInterval{0, 0});
    e[0] = {1, 1};
    for (std::size_t i = 0; i < n; ++i) {
        const RatInterval root{cert.roots[i].lo, cert.roots[i].hi};
        for (std::size_t j = i + 1; j >= 1; --j) e[j] = add(e[j], mul(root, e[j - 1]));
    }
    for (std::size_t i = 1; i <= n; ++i) {
        const Rational target = (i == n) ? Rational(1) : Rational(cert.k[i - 1]);
        if (target < e[i].lo || target > e[i].hi) return false;
    }
    return true;
}

std::pair<bool, bool> check_conditions(const SpectrumCertificate& cert, std::span<const double> mu, double eps) {
    const std::size_t n = cert.roots.size();
    if (n < 2 || mu.size() != n - 2) return {false, false};
    const Rational e(eps);
    const Rational inv = Rational(1) / e;
    bool c1 = true;
    for (std::size_t i = 0; i + 2 < n; ++i) {
        const Rational target(mu[i]);
        const Rational lo_gap = abs(Rational(cert.roots[i].lo - target));
        const Rational hi_gap = abs(Rational(cert.roots[i].hi - target));
        c1 = c1 && lo_gap < e && hi_gap < e;
    }
    const RootInterval& big = cert.roots[n - 2];
    const RootInterval& small = cert.roots[n - 1];
    const bool big_ok = big.lo > inv || big.hi < -inv;
    const bool small_ok = abs(small.lo) < e && abs(small.hi) < e;
    return {c1, big_ok && small_ok};
}

}  // namespace liouville::spectrum
