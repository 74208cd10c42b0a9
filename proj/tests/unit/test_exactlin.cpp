#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "liouville/errors.hpp"
#include "liouville/exactlin.hpp"

using namespace liouville;
using namespace liouville::exactlin;

namespace {

// Laplace expansion along the first row; independent of the Bareiss code.
Integer laplace_det(const std::vector<std::vector<Integer>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    Integer total = 0;
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::vector<Integer>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<Integer> row;
            for (std::size_t j = 0; j < n; ++j)
                if (j != c) row.push_back(m[r][j]);
            minor.push_back(row);
        }
        const Integer term = m[0][c] * laplace_det(minor);
        total += (c % 2 == 0) ? term : Integer(-term);
    }
    return total;
}

std::vector<std::vector<Integer>> rows_of(const IntMatrix& a) {
    std::vector<std::vector<Integer>> m(a.size(), std::vector<Integer>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j) m[i][j] = a(i, j);
    return m;
}

// det(t I - A) by expansion.
Integer shifted_det(const IntMatrix& a, long t) {
    auto m = rows_of(a);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) m[i][j] = -m[i][j];
        m[i][i] += t;
    }
    return laplace_det(m);
}

// x^n - k_{n-1} x^{n-1} + k_{n-2} x^{n-2} - ... + (-1)^{n-1} k_1 x + (-1)^n,
// written out coefficient by coefficient.
IntPolynomial display_polynomial(const std::vector<Integer>& k) {
    const std::size_t n = k.size() + 1;
    std::vector<Integer> c(n + 1);
    c[n] = 1;
    c[0] = (n % 2 == 0) ? 1 : -1;
    for (std::size_t j = 1; j < n; ++j) {
        // coefficient of x^j carries k_j with sign (-1)^{n-j}
        c[j] = ((n - j) % 2 == 0) ? k[j - 1] : Integer(-k[j - 1]);
    }
    return IntPolynomial(c);
}

std::size_t grid_sign_changes(const IntPolynomial& p, double lo, double hi, int steps) {
    std::size_t changes = 0;
    double prev = p.evaluate(lo);
    for (int i = 1; i <= steps; ++i) {
        const double v = p.evaluate(lo + (hi - lo) * i / steps);
        if ((prev < 0) != (v < 0) && v != 0.0) ++changes;
        if (v != 0.0) prev = v;
    }
    return changes;
}

}  // namespace

TEST_CASE("companion matrix matches the displayed layout") {
    CHECK(companion_matrix({3}) == IntMatrix{{0, -1}, {1, 3}});
    CHECK(companion_matrix({5, 7}) == IntMatrix{{0, 0, 1}, {1, 0, -5}, {0, 1, 7}});
    for (std::size_t n = 2; n <= 6; ++n) {
        const auto p = char_poly(companion_matrix(std::vector<Integer>(n - 1, 0)));
        std::vector<Integer> expect(n + 1, 0);
        expect[n] = 1;
        expect[0] = (n % 2 == 0) ? 1 : -1;
        CHECK(p == IntPolynomial(expect));
    }
}

TEST_CASE("char_poly small examples") {
    CHECK(char_poly(IntMatrix{{0, -1}, {1, 3}}) == IntPolynomial{1, -3, 1});
    CHECK(char_poly(IntMatrix::identity(2)) == IntPolynomial{1, -2, 1});
}

TEST_CASE("determinant examples") {
    CHECK(determinant(IntMatrix::identity(4)) == 1);
    CHECK(determinant(IntMatrix{{2, 1}, {1, 1}}) == 1);
    CHECK(determinant(IntMatrix{{0, 1}, {1, 0}}) == -1);
    CHECK(determinant(IntMatrix{{1, 2}, {2, 4}}) == 0);
}

TEST_CASE("property: companion matrices are unimodular with the displayed polynomial") {
    gen::Source src(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = static_cast<std::size_t>(src.integer(2, 6));
        const auto k = src.tuple(n - 1, 1000);
        const IntMatrix a = companion_matrix(k);
        CHECK(determinant(a) == 1);
        CHECK(char_poly(a) == display_polynomial(k));
        CHECK(companion_polynomial(k) == display_polynomial(k));
    }
}

TEST_CASE("property: Bareiss and Faddeev-LeVerrier agree with cofactor expansion") {
    gen::Source src(12);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = static_cast<std::size_t>(src.integer(1, 5));
        const IntMatrix a = src.matrix(n, 50);
        CHECK(determinant(a) == laplace_det(rows_of(a)));
        const IntPolynomial p = char_poly(a);
        REQUIRE(p.degree() == static_cast<int>(n));
        CHECK(p.is_monic());
        for (long t = -3; t <= 3; ++t) CHECK(p.evaluate(Rational(t)) == shifted_det(a, t));
    }
}

TEST_CASE("property: unimodular inverse") {
    gen::Source src(13);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = static_cast<std::size_t>(src.integer(2, 5));
        const IntMatrix a = companion_matrix(src.tuple(n - 1, 30));
        CHECK(a * unimodular_inverse(a) == IntMatrix::identity(n));
    }
    CHECK_THROWS_AS(unimodular_inverse(IntMatrix{{2, 0}, {0, 1}}), std::domain_error);
}

TEST_CASE("polynomial gcd") {
    // (x - 1)^2 (x + 2) and (x - 1)(x + 3)
    const IntPolynomial a{2, -3, 0, 1};
    const IntPolynomial b{-3, 2, 1};
    CHECK(polynomial_gcd(a, b) == IntPolynomial{-1, 1});
    CHECK(polynomial_gcd(IntPolynomial{1, 0, 1}, IntPolynomial{-1, 1}) == IntPolynomial{1});
}

TEST_CASE("sturm isolation examples") {
    const IntPolynomial p{1, -3, 1};
    const auto iso = sturm_isolate(p);
    REQUIRE(iso.count_real == 2);
    REQUIRE(iso.intervals.size() == 2);
    CHECK(iso.intervals[0].contains(Rational(38, 100)));
    CHECK(iso.intervals[1].contains(Rational(262, 100)));
    CHECK(iso.square_free);

    CHECK(sturm_isolate(IntPolynomial{1, 0, 1}).count_real == 0);
    CHECK(sturm_count(p, Rational(0), Rational(1)) == 1);
    CHECK(sturm_count(p, Rational(-10), Rational(10)) == 2);

    // (x - 1)^2 (x + 2)
    const IntPolynomial repeated{2, -3, 0, 1};
    const auto rep = sturm_isolate(repeated);
    CHECK(rep.count_real == 2);
    CHECK_FALSE(rep.square_free);
    CHECK_THROWS_AS(sturm_isolate(repeated, true), SquareFreeViolation);
}

TEST_CASE("property: isolation agrees with grid sign changes") {
    gen::Source src(14);
    for (int trial = 0; trial < 100; ++trial) {
        const auto k = src.tuple(2, 40);
        const IntPolynomial p = companion_polynomial(k);
        const auto iso = sturm_isolate(p);
        if (!iso.square_free) continue;
        // Roots of a monic polynomial lie inside the Cauchy bound.
        double bound = 1.0;
        for (const auto& c : p.coeffs()) bound = std::max(bound, 1.0 + std::abs(c.get_d()));
        CHECK(iso.count_real == grid_sign_changes(p, -bound, bound, 400000));
        for (std::size_t i = 0; i + 1 < iso.intervals.size(); ++i)
            CHECK(iso.intervals[i].hi <= iso.intervals[i + 1].lo);
    }
}

TEST_CASE("refine_root examples") {
    const IntPolynomial p{1, -3, 1};
    const auto r = refine_root(p, RootInterval{Rational(2), Rational(3)}, 1e-12);
    CHECK(r.width() < Rational(1, 1e12));
    CHECK(r.midpoint() == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));

    const auto exact = refine_root(IntPolynomial{-1, 1}, RootInterval{Rational(0), Rational(2)}, 1e-12);
    CHECK(exact.contains(Rational(1)));
    CHECK(exact.width() < Rational(1, 1e12));

    CHECK_THROWS_AS(refine_root(p, RootInterval{Rational(3), Rational(4)}, 1e-12), NotIsolating);
}

TEST_CASE("real spectrum of the cat map") {
    const auto roots = real_spectrum(IntMatrix{{2, 1}, {1, 1}}, 1e-14);
    REQUIRE(roots.size() == 2);
    CHECK(roots[0].midpoint() == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-13));
    CHECK(roots[1].midpoint() == doctest::Approx((3.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-13));
}
