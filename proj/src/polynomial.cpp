#include "factorlab/polynomial.hpp"

#include <algorithm>
#include <utility>

#include "factorlab/ntheory.hpp"

namespace factorlab::poly {

void trim(UPoly& a)
{
    while (!a.empty() && a.back() == 0) {
        a.pop_back();
    }
}

int degree(const UPoly& a)
{
    for (std::size_t i = a.size(); i > 0; --i) {
        if (a[i - 1] != 0) {
            return static_cast<int>(i) - 1;
        }
    }
    return -1;
}

mpz_class evaluate(const UPoly& a, const mpz_class& x)
{
    mpz_class r = 0;
    for (std::size_t i = a.size(); i > 0; --i) {
        r = r * x + a[i - 1];
    }
    return r;
}

UPoly derivative(const UPoly& a)
{
    UPoly d;
    for (std::size_t i = 1; i < a.size(); ++i) {
        d.push_back(a[i] * static_cast<unsigned long>(i));
    }
    trim(d);
    return d;
}

UPoly add(const UPoly& a, const UPoly& b)
{
    UPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] += a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        r[i] += b[i];
    }
    trim(r);
    return r;
}

UPoly sub(const UPoly& a, const UPoly& b)
{
    UPoly r(std::max(a.size(), b.size()));
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] += a[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        r[i] -= b[i];
    }
    trim(r);
    return r;
}

UPoly mul(const UPoly& a, const UPoly& b)
{
    if (a.empty() || b.empty()) {
        return {};
    }
    UPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) {
            continue;
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
            r[i + j] += a[i] * b[j];
        }
    }
    trim(r);
    return r;
}

UPoly exact_div(const UPoly& a, const UPoly& b)
{
    const int db = degree(b);
    if (db < 0) {
        throw Error("exact_div: division by zero polynomial");
    }
    UPoly rem = a;
    trim(rem);
    const int da = degree(rem);
    if (da < db) {
        if (da >= 0) {
            throw Error("exact_div: inexact division");
        }
        return {};
    }
    UPoly q(static_cast<std::size_t>(da - db + 1));
    const mpz_class& lead = b[db];
    for (int i = da; i >= db; --i) {
        const mpz_class& top = rem[i];
        if (top == 0) {
            continue;
        }
        if (mpz_divisible_p(top.get_mpz_t(), lead.get_mpz_t()) == 0) {
            throw Error("exact_div: inexact division");
        }
        mpz_class c;
        mpz_divexact(c.get_mpz_t(), top.get_mpz_t(), lead.get_mpz_t());
        for (int j = 0; j <= db; ++j) {
            rem[i - db + j] -= c * b[j];
        }
        q[i - db] = std::move(c);
    }
    trim(rem);
    if (!rem.empty()) {
        throw Error("exact_div: inexact division");
    }
    trim(q);
    return q;
}

BiPoly::BiPoly(std::size_t x_terms, std::size_t y_terms)
    : x_terms_(x_terms), y_terms_(y_terms), c_(x_terms * y_terms)
{
}

bool BiPoly::is_zero() const
{
    return std::all_of(c_.begin(), c_.end(), [](const mpz_class& v) { return v == 0; });
}

int BiPoly::degree_y() const
{
    for (std::size_t j = y_terms_; j > 0; --j) {
        for (std::size_t i = 0; i < x_terms_; ++i) {
            if (coeff(i, j - 1) != 0) {
                return static_cast<int>(j) - 1;
            }
        }
    }
    return -1;
}

UPoly BiPoly::y_coefficient(std::size_t j) const
{
    UPoly r(x_terms_);
    for (std::size_t i = 0; i < x_terms_; ++i) {
        r[i] = coeff(i, j);
    }
    trim(r);
    return r;
}

mpz_class BiPoly::operator()(const mpz_class& x, const mpz_class& y) const
{
    mpz_class r = 0;
    for (std::size_t i = x_terms_; i > 0; --i) {
        mpz_class row = 0;
        for (std::size_t j = y_terms_; j > 0; --j) {
            row = row * y + coeff(i - 1, j - 1);
        }
        r = r * x + row;
    }
    return r;
}

UPoly bareiss_determinant(std::vector<std::vector<UPoly>> m)
{
    const std::size_t n = m.size();
    if (n == 0) {
        return {mpz_class(1)};
    }
    bool negate = false;
    UPoly prev{mpz_class(1)};
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].empty()) {
            std::size_t r = k + 1;
            while (r < n && m[r][k].empty()) {
                ++r;
            }
            if (r == n) {
                return {};
            }
            std::swap(m[k], m[r]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m[i][j] = exact_div(sub(mul(m[i][j], m[k][k]), mul(m[i][k], m[k][j])), prev);
            }
            m[i][k].clear();
        }
        prev = m[k][k];
    }
    UPoly det = m[n - 1][n - 1];
    if (negate) {
        for (auto& c : det) {
            c = -c;
        }
    }
    return det;
}

UPoly resultant_y(const BiPoly& f, const BiPoly& h)
{
    const int df = f.degree_y();
    const int dh = h.degree_y();
    if (df < 0 || dh < 0) {
        return {};
    }
    const auto m = static_cast<std::size_t>(df);
    const auto n = static_cast<std::size_t>(dh);
    const std::size_t size = m + n;
    if (size == 0) {
        return {mpz_class(1)};
    }
    // Sylvester matrix: n shifted rows of f, then m shifted rows of h, with
    // coefficients from the leading power of y downward.
    std::vector<std::vector<UPoly>> s(size, std::vector<UPoly>(size));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j <= m; ++j) {
            s[r][r + j] = f.y_coefficient(m - j);
        }
    }
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j <= n; ++j) {
            s[n + r][r + j] = h.y_coefficient(n - j);
        }
    }
    return bareiss_determinant(std::move(s));
}

namespace {

using QPoly = std::vector<mpq_class>;

void trim(QPoly& a)
{
    while (!a.empty() && a.back() == 0) {
        a.pop_back();
    }
}

QPoly to_rational(const UPoly& a)
{
    QPoly r(a.begin(), a.end());
    trim(r);
    return r;
}

// Remainder and quotient of a / b over Q.
std::pair<QPoly, QPoly> divmod(QPoly a, const QPoly& b)
{
    QPoly q;
    if (a.size() >= b.size()) {
        q.resize(a.size() - b.size() + 1);
    }
    while (!a.empty() && a.size() >= b.size()) {
        const std::size_t shift = a.size() - b.size();
        mpq_class c = a.back() / b.back();
        for (std::size_t j = 0; j < b.size(); ++j) {
            a[shift + j] -= c * b[j];
        }
        q[shift] = c;
        a.pop_back();
        trim(a);
    }
    trim(q);
    return {std::move(q), std::move(a)};
}

QPoly derivative(const QPoly& a)
{
    QPoly d;
    for (std::size_t i = 1; i < a.size(); ++i) {
        d.push_back(a[i] * static_cast<unsigned long>(i));
    }
    trim(d);
    return d;
}

QPoly gcd(QPoly a, QPoly b)
{
    while (!b.empty()) {
        QPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

int sign_at(const QPoly& a, const mpq_class& x)
{
    mpq_class r = 0;
    for (std::size_t i = a.size(); i > 0; --i) {
        r = r * x + a[i - 1];
    }
    return sgn(r);
}

class SturmChain {
public:
    explicit SturmChain(const UPoly& a)
    {
        QPoly p = to_rational(a);
        QPoly dp = derivative(p);
        // Square-free part: same distinct roots, and the chain counts them.
        if (!dp.empty()) {
            QPoly g = gcd(p, dp);
            if (g.size() > 1) {
                p = divmod(p, g).first;
                dp = derivative(p);
            }
        }
        chain_.push_back(p);
        if (!dp.empty()) {
            chain_.push_back(dp);
        }
        while (chain_.size() >= 2 && chain_.back().size() > 1) {
            QPoly r = divmod(chain_[chain_.size() - 2], chain_.back()).second;
            if (r.empty()) {
                break;
            }
            for (auto& c : r) {
                c = -c;
            }
            chain_.push_back(std::move(r));
        }
    }

    const QPoly& base() const { return chain_.front(); }

    int variations(const mpq_class& x) const
    {
        int count = 0;
        int last = 0;
        for (const auto& p : chain_) {
            const int s = sign_at(p, x);
            if (s == 0) {
                continue;
            }
            if (last != 0 && s != last) {
                ++count;
            }
            last = s;
        }
        return count;
    }

    // A point strictly between n - 1 and n that is not a root.
    mpq_class probe_below(const mpz_class& n) const
    {
        for (unsigned long d = 2;; ++d) {
            mpq_class e(n * d - 1, d);
            e.canonicalize();
            if (sign_at(base(), e) != 0) {
                return e;
            }
        }
    }

    // Upper bound on the number of distinct real roots in [lo, hi].
    int count_near(const mpz_class& lo, const mpz_class& hi) const
    {
        return variations(probe_below(lo)) - variations(probe_below(hi + 1));
    }

private:
    std::vector<QPoly> chain_;
};

void collect_roots(const UPoly& a, const SturmChain& sturm, const mpz_class& lo, const mpz_class& hi,
                   std::vector<mpz_class>& out)
{
    if (lo > hi || sturm.count_near(lo, hi) == 0) {
        return;
    }
    if (hi - lo < 8) {
        for (mpz_class x = lo; x <= hi; ++x) {
            if (evaluate(a, x) == 0) {
                out.push_back(x);
            }
        }
        return;
    }
    mpz_class mid;
    mpz_class sum = lo + hi;
    mpz_fdiv_q_2exp(mid.get_mpz_t(), sum.get_mpz_t(), 1);
    collect_roots(a, sturm, lo, mid, out);
    collect_roots(a, sturm, mid + 1, hi, out);
}

}  // namespace

std::vector<mpz_class> integer_roots(const UPoly& a, const mpz_class& lo, const mpz_class& hi)
{
    UPoly p = a;
    trim(p);
    if (p.empty()) {
        throw Error("integer_roots: zero polynomial");
    }
    std::vector<mpz_class> out;
    if (p.size() == 1) {
        return out;
    }
    const SturmChain sturm(p);
    collect_roots(p, sturm, lo, hi, out);
    return out;
}

}  // namespace factorlab::poly
