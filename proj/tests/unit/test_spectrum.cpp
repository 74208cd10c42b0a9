#include <doctest.h>

#include <cmath>
#include <numeric>

#include "generators.hpp"
#include "liouville/errors.hpp"
#include "liouville/spectrum_search.hpp"
#include "spectrum_oracle.hpp"

using namespace liouville;
using namespace liouville::spectrum;

namespace {

// Product expansion of prod (x - l_i), read back as sigma_1..sigma_m.
std::vector<double> sigma_by_expansion(const std::vector<double>& lams) {
    std::vector<double> c{1.0};  // highest degree first
    for (double l : lams) {
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i] += c[i];
            next[i + 1] -= l * c[i];
        }
        c = next;
    }
    std::vector<double> sigma;
    for (std::size_t j = 1; j < c.size(); ++j) sigma.push_back((j % 2 ? -1.0 : 1.0) * c[j]);
    return sigma;
}

}  // namespace

TEST_CASE("elementary symmetric functions") {
    const auto s = elementary_symmetric(std::vector<double>{2, 3});
    REQUIRE(s.size() == 2);
    CHECK(s.at(1) == 5.0);
    CHECK(s.at(2) == 6.0);
    CHECK(s.at(0) == 1.0);
    CHECK(s.at(3) == 0.0);

    const auto empty = elementary_symmetric(std::vector<double>{});
    CHECK(empty.size() == 0);
    CHECK(empty.top() == 1.0);

    const auto t = elementary_symmetric(std::vector<double>{0.5, -1.2, 3.0});
    CHECK(t.at(1) == doctest::Approx(2.3));
    CHECK(t.at(2) == doctest::Approx(-2.7));
    CHECK(t.at(3) == doctest::Approx(-1.8));
}

TEST_CASE("property: elementary symmetric functions match polynomial expansion") {
    gen::Source src(21);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> lams;
        const long m = src.integer(0, 6);
        for (long i = 0; i < m; ++i) lams.push_back(src.real(-3, 3));
        const auto s = elementary_symmetric(lams);
        const auto oracle = sigma_by_expansion(lams);
        REQUIRE(s.size() == oracle.size());
        for (std::size_t j = 0; j < oracle.size(); ++j)
            CHECK(s.sigma[j] == doctest::Approx(oracle[j]).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("dynamics vector and residual") {
    SigmaVector s{{0.5}};
    const auto x = x_vector(s);
    REQUIRE(x.size() == 1);
    CHECK(x[0] == doctest::Approx(1.75));
    CHECK(x_vector(SigmaVector{}).empty());

    const std::vector<std::int64_t> kp{4};
    const auto r = residual_dynamics(s, std::int64_t{4}, kp);
    CHECK(r[0] == doctest::Approx(-0.25));
    CHECK_THROWS_AS(x_vector(SigmaVector{{0.0}}), DegenerateSigma);
}

TEST_CASE("property: analytic dynamics Jacobian matches finite differences") {
    gen::Source src(22);
    for (int trial = 0; trial < 50; ++trial) {
        const long m = src.integer(1, 4);
        std::vector<double> lams;
        for (long i = 0; i < m; ++i) lams.push_back(src.real(0.5, 2.5) * (src.integer(0, 1) ? 1 : -1));
        const double k1 = static_cast<double>(src.integer(1, 50));
        std::vector<double> kp(static_cast<std::size_t>(m), 0.0);
        const auto jac = dynamics_jacobian(lams, k1);
        const double h = 1e-6;
        for (long i = 0; i < m; ++i) {
            auto up = lams, dn = lams;
            up[static_cast<std::size_t>(i)] += h;
            dn[static_cast<std::size_t>(i)] -= h;
            const auto ru = residual_dynamics(elementary_symmetric(up), k1, kp);
            const auto rd = residual_dynamics(elementary_symmetric(dn), k1, kp);
            for (long j = 0; j < m; ++j) {
                const double fd = (ru[static_cast<std::size_t>(j)] - rd[static_cast<std::size_t>(j)]) / (2 * h);
                CHECK(jac(j, i) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
            }
        }
    }
}

TEST_CASE("ergodic scan") {
    const std::vector<double> zero{0.0};
    const auto hit = ergodic_scan(zero, SigmaVector{{2.0}}, 0.1, 7, 100);
    REQUIRE(hit);
    CHECK(hit->k1 == 7);
    CHECK(hit->distance == 0.0);

    // Brute force is the oracle: first k1 with x + k1 r within eps of Z.
    const std::vector<double> x{0.3};
    const SigmaVector r{{std::sqrt(2.0) - 1.0}};
    const auto found = ergodic_scan(x, r, 0.05, 1, 100);
    REQUIRE(found);
    std::int64_t first = 0;
    for (std::int64_t k = 1; k <= 100 && !first; ++k) {
        const double v = x[0] + static_cast<double>(k) * r.sigma[0];
        if (std::abs(v - std::nearbyint(v)) < 0.05) first = k;
    }
    CHECK(found->k1 == first);
    CHECK(found->distance < 0.05);
    CHECK_FALSE(ergodic_scan(x, r, 1e-9, 1, 10));
}

TEST_CASE("newton refinement") {
    // Synthetic target: choose lambdas, read off the real k' they solve.
    const std::vector<double> truth{1.3, -0.7};
    const double k1 = 9.0;
    const auto s = elementary_symmetric(truth);
    const auto x = x_vector(s);
    std::vector<double> kp(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) kp[j] = x[j] + k1 * s.sigma[j];

    const auto exact = newton_refine(kp, k1, SeedLambdas{truth}, 1e-12);
    CHECK(exact.iterations == 0);
    CHECK(exact.lams == truth);

    const auto moved = newton_refine(kp, k1, SeedLambdas{{1.301, -0.699}}, 1e-12);
    CHECK(moved.iterations <= 10);
    CHECK(moved.residual < 1e-12);
    CHECK(moved.lams[0] == doctest::Approx(1.3).epsilon(1e-10));
    CHECK(moved.lams[1] == doctest::Approx(-0.7).epsilon(1e-10));

    CHECK_THROWS_AS(newton_refine(kp, k1, SeedLambdas{{1.0, 1.0}}, 1e-12), SingularJacobian);
}

TEST_CASE("tail pair") {
    const auto [big, small] = solve_tail(SigmaVector{}, 3.0);
    CHECK(big == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0));
    CHECK(small == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0));
    const auto [a, b] = solve_quadratic_pair(5.0, 4.0);
    CHECK(a == doctest::Approx(4.0));
    CHECK(b == doctest::Approx(1.0));
    CHECK_THROWS_AS(solve_quadratic_pair(1.0, 1.0), ComplexTail);
}

TEST_CASE("seed lambdas") {
    SpectrumRequest req;
    req.n = 3;
    req.mu = {0.5};
    req.eps = 0.4;
    req.seed = 1;
    const auto s = seed_lambdas(req);
    REQUIRE(s.lams.size() == 1);
    CHECK(s.lams[0] > 0.4);
    CHECK(s.lams[0] < 0.6);
    CHECK(seed_lambdas(req).lams == s.lams);

    req.n = 4;
    req.mu = {0.5, 0.5};
    const auto d = seed_lambdas(req);
    CHECK(d.lams[0] != d.lams[1]);
}

TEST_CASE("request validation") {
    SpectrumRequest req;
    req.n = 3;
    CHECK_THROWS_AS(req.validate(), InvalidRequest);
    req.mu = {1.0};
    req.eps = 0.0;
    CHECK_THROWS_AS(req.validate(), InvalidRequest);
    req.n = 1;
    req.mu = {};
    req.eps = 0.5;
    CHECK_THROWS_AS(req.validate(), InvalidRequest);
}

TEST_CASE("find_matrix n = 2 picks the golden pair") {
    SpectrumRequest req;
    req.eps = 0.4;
    const auto cert = find_matrix(req);
    CHECK(cert.k == std::vector<exactlin::Integer>{3});
    CHECK(cert.condition1);
    CHECK(cert.condition2);
    CHECK(vieta_consistent(cert));

    req.eps = 10.0;
    const auto loose = find_matrix(req);
    CHECK(loose.k[0] >= 3);
    CHECK(loose.square_free);
}

TEST_CASE("find_matrix n = 3 agrees with an exhaustive scan") {
    SpectrumRequest req;
    req.n = 3;
    req.mu = {2.0};
    req.eps = 0.5;
    const auto cert = find_matrix(req);
    CHECK(exactlin::determinant(cert.a) == 1);
    CHECK(cert.a == exactlin::companion_matrix(cert.companion_k));
    const auto ev = oracle::real_eigenvalues(cert.a);
    CHECK(oracle::satisfies(ev, 2.0, 0.5) == 1);

    const auto hits = oracle::exhaustive_n3(2.0, 0.5, 200);
    CHECK_FALSE(hits.empty());
    const long a = cert.companion_k[0].get_si();
    const long b = cert.companion_k[1].get_si();
    CHECK(hits.count({a, b}) == 1);
}

TEST_CASE("property: certificates are Vieta consistent and satisfy their conditions") {
    gen::Source src(23);
    for (int trial = 0; trial < 12; ++trial) {
        SpectrumRequest req;
        req.n = static_cast<std::size_t>(src.integer(2, 4));
        for (std::size_t i = 0; i + 2 < req.n; ++i) req.mu.push_back(src.real(-2, 2));
        req.eps = src.integer(0, 1) ? 0.5 : 0.2;
        req.seed = static_cast<std::uint64_t>(trial);
        const auto cert = find_matrix(req);
        CHECK(exactlin::determinant(cert.a) == 1);
        CHECK(cert.square_free);
        CHECK(cert.sturm_count == req.n);
        CHECK(vieta_consistent(cert));
        const auto [c1, c2] = check_conditions(cert, req.mu, req.eps);
        CHECK(c1);
        CHECK(c2);
        // The Anosov labeling puts the smallest magnitude last.
        const auto order = cert.anosov_order();
        for (std::size_t i = 0; i < req.n; ++i)
            CHECK(std::abs(cert.lambdas[order.back()]) <= std::abs(cert.lambdas[i]));
    }
}

TEST_CASE("Vieta check rejects a tampered certificate") {
    SpectrumRequest req;
    req.eps = 0.4;
    auto cert = find_matrix(req);
    cert.k[0] += 1;
    CHECK_FALSE(vieta_consistent(cert));
}
