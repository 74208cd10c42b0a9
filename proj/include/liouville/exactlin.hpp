#pragma once

// Exact integer linear algebra and certified real-root isolation.
//
// Everything here runs on GMP integers and rationals; no floating point
// enters a decision. Polynomials are stored lowest degree first.

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

namespace liouville::exactlin {

using Integer = mpz_class;
using Rational = mpq_class;

class IntMatrix {
public:
    explicit IntMatrix(std::size_t n);
    IntMatrix(std::initializer_list<std::initializer_list<long>> rows);
    static IntMatrix identity(std::size_t n);
    static IntMatrix from_rows(const std::vector<std::vector<Integer>>& rows);

    std::size_t size() const { return n_; }
    Integer& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
    const Integer& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }

    IntMatrix operator*(const IntMatrix& rhs) const;
    IntMatrix transpose() const;
    bool operator==(const IntMatrix& rhs) const;

    std::vector<std::vector<double>> to_double() const;
    std::string to_string() const;

private:
    std::size_t n_;
    std::vector<Integer> entries_;
};

class IntPolynomial {
public:
    IntPolynomial() = default;
    // coeffs[i] multiplies x^i; trailing zeros are trimmed.
    explicit IntPolynomial(std::vector<Integer> coeffs);
    IntPolynomial(std::initializer_list<long> coeffs);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    bool is_monic() const { return !coeffs_.empty() && coeffs_.back() == 1; }
    const std::vector<Integer>& coeffs() const { return coeffs_; }
    const Integer& coeff(std::size_t i) const { return coeffs_.at(i); }

    Rational evaluate(const Rational& x) const;
    int sign_at(const Rational& x) const;
    double evaluate(double x) const;
    IntPolynomial derivative() const;

    bool operator==(const IntPolynomial& rhs) const { return coeffs_ == rhs.coeffs_; }
    std::string to_string() const;

private:
    std::vector<Integer> coeffs_;
};

// Open interval (lo, hi) holding one distinct real root, or the exact
// root lo == hi. Endpoints are dyadic rationals.
struct RootInterval {
    Rational lo;
    Rational hi;
    bool repeated = false;

    bool is_exact() const { return lo == hi; }
    Rational width() const { return hi - lo; }
    double lo_d() const { return lo.get_d(); }
    double hi_d() const { return hi.get_d(); }
    double midpoint() const;
    bool contains(const Rational& x) const;
};

struct RootIsolation {
    std::vector<RootInterval> intervals;  // sorted, pairwise disjoint
    std::size_t count_real = 0;           // distinct real roots
    bool square_free = true;
};

// A_k for k = (k_1, ..., k_{n-1}): ones on the subdiagonal, last column
// ((-1)^{n+1}, (-1)^n k_1, (-1)^{n-1} k_2, ..., k_{n-1}). det = 1.
IntMatrix companion_matrix(const std::vector<Integer>& k);

// P_k = x^n - k_{n-1} x^{n-1} + ... + (-1)^{n-1} k_1 x + (-1)^n.
IntPolynomial companion_polynomial(const std::vector<Integer>& k);

// Monic det(xI - A), computed by Faddeev-LeVerrier with exact division.
IntPolynomial char_poly(const IntMatrix& a);

// Fraction-free (Bareiss) elimination.
Integer determinant(const IntMatrix& a);

// Inverse of a unimodular matrix (det = +-1); throws std::domain_error otherwise.
IntMatrix unimodular_inverse(const IntMatrix& a);

// gcd over Q, normalised to a primitive integer polynomial with positive
// leading coefficient.
IntPolynomial polynomial_gcd(const IntPolynomial& a, const IntPolynomial& b);

// Number of distinct real roots in (lo, hi] via Sturm's theorem.
std::size_t sturm_count(const IntPolynomial& p, const Rational& lo, const Rational& hi);

// Isolates every distinct real root of p. When require_simple is set a
// repeated root raises SquareFreeViolation.
RootIsolation sturm_isolate(const IntPolynomial& p, bool require_simple = false);

// Bisects an isolating interval of a simple root down to width < tol.
// Throws NotIsolating when p does not change sign across the interval.
RootInterval refine_root(const IntPolynomial& p, const RootInterval& interval, double tol);

// Isolates and refines all real eigenvalues of a, ascending.
std::vector<RootInterval> real_spectrum(const IntMatrix& a, double tol, bool require_simple = true);

}  // namespace liouville::exactlin
