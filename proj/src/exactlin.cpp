#include "liouville/exactlin.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "liouville/errors.hpp"

namespace liouville::exactlin {

namespace {

using RatPoly = std::vector<Rational>;

void trim(RatPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

RatPoly to_rational(const IntPolynomial& p) {
    RatPoly out;
    out.reserve(p.coeffs().size());
    for (const auto& c : p.coeffs()) out.emplace_back(c);
    return out;
}

IntPolynomial to_primitive(RatPoly p) {
    trim(p);
    if (p.empty()) return {};
    Integer den = 1;
    for (const auto& c : p) den = lcm(den, Integer(c.get_den()));
    std::vector<Integer> ints;
    ints.reserve(p.size());
    Integer content = 0;
    for (const auto& c : p) {
        Rational scaled = c * den;
        Integer v = scaled.get_num();
        content = gcd(content, v);
        ints.push_back(v);
    }
    if (ints.back() < 0) content = -content;
    for (auto& v : ints) v /= content;
    return IntPolynomial(std::move(ints));
}

RatPoly derivative(const RatPoly& p) {
    RatPoly out;
    for (std::size_t i = 1; i < p.size(); ++i) out.push_back(p[i] * static_cast<long>(i));
    trim(out);
    return out;
}

// Remainder of a / b over Q.
RatPoly remainder(RatPoly a, const RatPoly& b) {
    assert(!b.empty());
    trim(a);
    while (a.size() >= b.size() && !a.empty()) {
        const Rational factor = a.back() / b.back();
        const std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= factor * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

RatPoly quotient(RatPoly a, const RatPoly& b) {
    trim(a);
    if (a.size() < b.size()) return {};
    RatPoly q(a.size() - b.size() + 1);
    while (a.size() >= b.size() && !a.empty()) {
        const Rational factor = a.back() / b.back();
        const std::size_t shift = a.size() - b.size();
        q[shift] = factor;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= factor * b[i];
        a.pop_back();
        trim(a);
    }
    trim(q);
    return q;
}

Rational eval(const RatPoly& p, const Rational& x) {
    Rational acc = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
    return acc;
}

int sgn_of(const Rational& v) { return sgn(v); }

// Sturm chain p, p', -rem(p, p'), ...
std::vector<RatPoly> sturm_chain(const RatPoly& p) {
    std::vector<RatPoly> chain{p, derivative(p)};
    trim(chain.back());
    while (!chain.back().empty()) {
        RatPoly r = remainder(chain[chain.size() - 2], chain.back());
        for (auto& c : r) c = -c;
        if (r.empty()) break;
        // Rescale to keep coefficient growth in check; only signs matter.
        const Rational lead = abs(r.back());
        for (auto& c : r) c /= lead;
        chain.push_back(std::move(r));
    }
    if (chain.back().empty()) chain.pop_back();
    return chain;
}

std::size_t variations(const std::vector<int>& signs) {
    std::size_t count = 0;
    int last = 0;
    for (int s : signs) {
        if (s == 0) continue;
        if (last != 0 && s != last) ++count;
        last = s;
    }
    return count;
}

std::size_t variations_at(const std::vector<RatPoly>& chain, const Rational& x) {
    std::vector<int> signs;
    signs.reserve(chain.size());
    for (const auto& q : chain) signs.push_back(sgn_of(eval(q, x)));
    return variations(signs);
}

std::size_t variations_at_infinity(const std::vector<RatPoly>& chain, bool positive) {
    std::vector<int> signs;
    signs.reserve(chain.size());
    for (const auto& q : chain) {
        int s = sgn_of(q.back());
        if (!positive && (q.size() - 1) % 2 == 1) s = -s;
        signs.push_back(s);
    }
    return variations(signs);
}

// Smallest power of two strictly above the Cauchy bound 1 + max|a_i / a_n|.
Rational cauchy_bound(const RatPoly& p) {
    Rational m = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) m = std::max(m, Rational(abs(p[i] / p.back())));
    Rational bound = 1 + m;
    Rational pow2 = 1;
    while (pow2 <= bound) pow2 *= 2;
    return pow2;
}

RatPoly square_free_part(const RatPoly& p, bool& square_free) {
    RatPoly dp = derivative(p);
    RatPoly g = p;
    RatPoly h = dp;
    while (!h.empty()) {
        RatPoly r = remainder(g, h);
        g = std::move(h);
        h = std::move(r);
    }
    square_free = g.size() <= 1;
    if (square_free) return p;
    return quotient(p, g);
}

}  // namespace

// ---------------------------------------------------------------- IntMatrix

IntMatrix::IntMatrix(std::size_t n) : n_(n), entries_(n * n, Integer(0)) {}

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows)
    : IntMatrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != n_) throw std::invalid_argument("IntMatrix: rows must form a square matrix");
        std::size_t j = 0;
        for (long v : row) (*this)(i, j++) = v;
        ++i;
    }
}

IntMatrix IntMatrix::identity(std::size_t n) {
    IntMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<Integer>>& rows) {
    IntMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
            throw std::invalid_argument("IntMatrix: rows must form a square matrix");
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& rhs) const {
    if (rhs.n_ != n_) throw std::invalid_argument("IntMatrix: dimension mismatch");
    IntMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = 0; k < n_; ++k) {
            if ((*this)(i, k) == 0) continue;
            for (std::size_t j = 0; j < n_; ++j) out(i, j) += (*this)(i, k) * rhs(k, j);
        }
    return out;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out(j, i) = (*this)(i, j);
    return out;
}

bool IntMatrix::operator==(const IntMatrix& rhs) const {
    return n_ == rhs.n_ && entries_ == rhs.entries_;
}

std::vector<std::vector<double>> IntMatrix::to_double() const {
    std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) out[i][j] = (*this)(i, j).get_d();
    return out;
}

std::string IntMatrix::to_string() const {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < n_; ++i) {
        os << (i ? ", [" : "[");
        for (std::size_t j = 0; j < n_; ++j) os << (j ? ", " : "") << (*this)(i, j).get_str();
        os << ']';
    }
    os << ']';
    return os.str();
}

// ------------------------------------------------------------ IntPolynomial

IntPolynomial::IntPolynomial(std::vector<Integer> coeffs) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

IntPolynomial::IntPolynomial(std::initializer_list<long> coeffs) {
    for (long c : coeffs) coeffs_.emplace_back(c);
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational IntPolynomial::evaluate(const Rational& x) const {
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

int IntPolynomial::sign_at(const Rational& x) const { return sgn(evaluate(x)); }

double IntPolynomial::evaluate(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + it->get_d();
    return acc;
}

IntPolynomial IntPolynomial::derivative() const {
    std::vector<Integer> out;
    for (std::size_t i = 1; i < coeffs_.size(); ++i) out.push_back(coeffs_[i] * static_cast<long>(i));
    return IntPolynomial(std::move(out));
}

std::string IntPolynomial::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const Integer& c = coeffs_[static_cast<std::size_t>(i)];
        if (c == 0) continue;
        Integer mag = abs(c);
        if (first) {
            if (c < 0) os << '-';
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        if (mag != 1 || i == 0) os << mag.get_str();
        if (i >= 1) os << 'x';
        if (i >= 2) os << '^' << i;
    }
    return os.str();
}

// ------------------------------------------------------------ RootInterval

double RootInterval::midpoint() const {
    Rational mid = (lo + hi) / 2;
    return mid.get_d();
}

bool RootInterval::contains(const Rational& x) const {
    if (is_exact()) return x == lo;
    return lo < x && x < hi;
}

// --------------------------------------------------------------- operations

IntMatrix companion_matrix(const std::vector<Integer>& k) {
    const std::size_t n = k.size() + 1;
    if (n < 2) throw std::invalid_argument("companion_matrix: need n >= 2");
    IntMatrix a(n);
    for (std::size_t i = 1; i < n; ++i) a(i, i - 1) = 1;
    // Row i of the last column carries (-1)^{n+1-i} k_i, with k_0 = 1.
    for (std::size_t i = 0; i < n; ++i) {
        const Integer ki = (i == 0) ? Integer(1) : k[i - 1];
        const bool negative = (n + 1 - i) % 2 == 1;
        a(i, n - 1) = negative ? Integer(-ki) : ki;
    }
    return a;
}

IntPolynomial companion_polynomial(const std::vector<Integer>& k) {
    const std::size_t n = k.size() + 1;
    std::vector<Integer> coeffs(n + 1);
    coeffs[n] = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const Integer ki = (i == 0) ? Integer(1) : k[i - 1];
        const bool negative = (n - i) % 2 == 1;
        coeffs[i] = negative ? Integer(-ki) : ki;
    }
    return IntPolynomial(std::move(coeffs));
}

IntPolynomial char_poly(const IntMatrix& a) {
    const std::size_t n = a.size();
    std::vector<Integer> c(n + 1);
    c[n] = 1;
    IntMatrix m(n);  // M_0 = 0
    for (std::size_t k = 1; k <= n; ++k) {
        IntMatrix am = a * m;
        for (std::size_t i = 0; i < n; ++i) am(i, i) += c[n - k + 1];
        m = std::move(am);
        IntMatrix prod = a * m;
        Integer trace = 0;
        for (std::size_t i = 0; i < n; ++i) trace += prod(i, i);
        Integer kk = static_cast<long>(k);
        assert(trace % kk == 0);
        Integer q;
        mpz_divexact(q.get_mpz_t(), trace.get_mpz_t(), kk.get_mpz_t());
        c[n - k] = -q;
    }
    return IntPolynomial(std::move(c));
}

Integer determinant(const IntMatrix& a) {
    const std::size_t n = a.size();
    if (n == 0) return 1;
    IntMatrix m = a;
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t swap = k + 1;
            while (swap < n && m(swap, k) == 0) ++swap;
            if (swap == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(swap, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Integer num = m(i, j) * m(k, k) - m(i, k) * m(k, j);
                mpz_divexact(m(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
            }
            m(i, k) = 0;
        }
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

IntMatrix unimodular_inverse(const IntMatrix& a) {
    const std::size_t n = a.size();
    const Integer det = determinant(a);
    if (abs(det) != 1) throw std::domain_error("unimodular_inverse: det must be +-1");
    // Gauss-Jordan over Q; the result is integral because det = +-1.
    std::vector<std::vector<Rational>> aug(n, std::vector<Rational>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug[i][j] = a(i, j);
        aug[i][n + i] = 1;
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (aug[piv][col] == 0) ++piv;
        std::swap(aug[piv], aug[col]);
        const Rational inv = 1 / aug[col][col];
        for (auto& v : aug[col]) v *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || aug[r][col] == 0) continue;
            const Rational f = aug[r][col];
            for (std::size_t j = 0; j < 2 * n; ++j) aug[r][j] -= f * aug[col][j];
        }
    }
    IntMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            assert(aug[i][n + j].get_den() == 1);
            out(i, j) = aug[i][n + j].get_num();
        }
    return out;
}

IntPolynomial polynomial_gcd(const IntPolynomial& a, const IntPolynomial& b) {
    RatPoly x = to_rational(a);
    RatPoly y = to_rational(b);
    while (!y.empty()) {
        RatPoly r = remainder(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    return to_primitive(std::move(x));
}

std::size_t sturm_count(const IntPolynomial& p, const Rational& lo, const Rational& hi) {
    if (p.is_zero()) throw std::invalid_argument("sturm_count: zero polynomial");
    bool square_free = true;
    const RatPoly q = square_free_part(to_rational(p), square_free);
    const auto chain = sturm_chain(q);
    const std::size_t vlo = variations_at(chain, lo);
    const std::size_t vhi = variations_at(chain, hi);
    return vlo >= vhi ? vlo - vhi : 0;
}

RootIsolation sturm_isolate(const IntPolynomial& p, bool require_simple) {
    if (p.is_zero()) throw std::invalid_argument("sturm_isolate: zero polynomial");
    RootIsolation result;
    if (p.degree() == 0) return result;

    const RatPoly full = to_rational(p);
    const RatPoly q = square_free_part(full, result.square_free);
    if (!result.square_free && require_simple)
        throw SquareFreeViolation("polynomial " + p.to_string() + " has a repeated root");

    const auto chain = sturm_chain(q);
    const std::size_t total =
        variations_at_infinity(chain, false) - variations_at_infinity(chain, true);
    result.count_real = total;
    if (total == 0) return result;

    const Rational bound = cauchy_bound(q);

    struct Pending {
        Rational lo, hi;
        std::size_t vlo, vhi;
    };
    std::vector<Pending> stack{{-bound, bound, variations_at(chain, -bound), variations_at(chain, bound)}};
    while (!stack.empty()) {
        Pending cur = std::move(stack.back());
        stack.pop_back();
        const std::size_t count = cur.vlo - cur.vhi;
        if (count == 0) continue;
        if (count == 1) {
            result.intervals.push_back({cur.lo, cur.hi, false});
            continue;
        }
        // Split off-centre when the midpoint is itself a root so that no
        // interval endpoint is ever a root of q.
        Rational mid = (cur.lo + cur.hi) / 2;
        for (unsigned j = 3; sgn_of(eval(q, mid)) == 0; ++j) {
            Rational offset = (cur.hi - cur.lo);
            mpq_div_2exp(offset.get_mpq_t(), offset.get_mpq_t(), j);
            mid = (cur.lo + cur.hi) / 2 + offset;
        }
        const std::size_t vmid = variations_at(chain, mid);
        stack.push_back({cur.lo, mid, cur.vlo, vmid});
        stack.push_back({mid, cur.hi, vmid, cur.vhi});
    }
    std::sort(result.intervals.begin(), result.intervals.end(),
              [](const RootInterval& a, const RootInterval& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });

    if (!result.square_free) {
        // Flag the roots shared with gcd(p, p').
        const IntPolynomial g = polynomial_gcd(p, p.derivative());
        for (auto& iv : result.intervals) {
            if (iv.is_exact()) {
                iv.repeated = g.sign_at(iv.lo) == 0;
            } else {
                iv.repeated = g.degree() > 0 && sturm_count(g, iv.lo, iv.hi) > 0;
            }
        }
    }
    return result;
}

RootInterval refine_root(const IntPolynomial& p, const RootInterval& interval, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("refine_root: tol must be positive");
    if (interval.is_exact()) {
        if (p.sign_at(interval.lo) != 0) throw NotIsolating("exact endpoint is not a root");
        return interval;
    }
    Rational lo = interval.lo;
    Rational hi = interval.hi;
    int slo = p.sign_at(lo);
    const int shi = p.sign_at(hi);
    if (slo == 0) return {lo, lo, interval.repeated};
    if (shi == 0) return {hi, hi, interval.repeated};
    if (slo == shi)
        throw NotIsolating("no sign change on (" + lo.get_str() + ", " + hi.get_str() + ")");
    const Rational target(tol);
    while (hi - lo >= target) {
        Rational mid = (lo + hi) / 2;
        const int s = p.sign_at(mid);
        if (s == 0) return {mid, mid, interval.repeated};
        if (s == slo) {
            lo = std::move(mid);
        } else {
            hi = std::move(mid);
        }
    }
    return {lo, hi, interval.repeated};
}

std::vector<RootInterval> real_spectrum(const IntMatrix& a, double tol, bool require_simple) {
    const IntPolynomial p = char_poly(a);
    const RootIsolation iso = sturm_isolate(p, require_simple);
    std::vector<RootInterval> out;
    out.reserve(iso.intervals.size());
    for (const auto& iv : iso.intervals) {
        out.push_back(iv.repeated ? iv : refine_root(p, iv, tol));
    }
    return out;
}

}  // namespace liouville::exactlin
