#include "factorlab/ntheory.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <utility>
#include <vector>

namespace factorlab::ntheory {

mpz_class isqrt(const mpz_class& n)
{
    if (n < 0) {
        throw Error("isqrt: negative argument");
    }
    if (n < 2) {
        return n;
    }
    // Start above the root: 2^ceil(bits/2) > sqrt(n). Newton then decreases
    // monotonically until it stops decreasing.
    const size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    mpz_class x = 1;
    x <<= (bits + 1) / 2;
    while (true) {
        mpz_class y = (x + n / x) >> 1;
        if (y >= x) {
            break;
        }
        x = std::move(y);
    }
    if (!(x * x <= n && (x + 1) * (x + 1) > n)) {
        throw Error("isqrt: post-check failed");
    }
    return x;
}

namespace {

mpz_class ipow(const mpz_class& base, unsigned long e)
{
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

}  // namespace

mpz_class iroot(const mpz_class& n, unsigned long k)
{
    if (n < 0 || k == 0) {
        throw Error("iroot: invalid argument");
    }
    if (k == 1 || n < 2) {
        return n;
    }
    if (k == 2) {
        return isqrt(n);
    }
    const size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    mpz_class x = 1;
    x <<= (bits + k - 1) / k;  // > n^(1/k)
    while (true) {
        // x' = ((k-1) x + n / x^(k-1)) / k
        mpz_class y = ((k - 1) * x + n / ipow(x, k - 1)) / k;
        if (y >= x) {
            break;
        }
        x = std::move(y);
    }
    if (!(ipow(x, k) <= n && ipow(x + 1, k) > n)) {
        throw Error("iroot: post-check failed");
    }
    return x;
}

std::optional<mpz_class> is_perfect_square(const mpz_class& n)
{
    if (n < 0) {
        return std::nullopt;
    }
    // Quadratic residue filters mod 64, 63, 65 and 11; together they reject
    // all but about 1.5% of non-squares before the root is taken.
    static const auto kResidues = [] {
        std::array<std::vector<bool>, 4> t;
        const unsigned mods[4] = {64, 63, 65, 11};
        for (int k = 0; k < 4; ++k) {
            t[k].assign(mods[k], false);
            for (unsigned i = 0; i < mods[k]; ++i) {
                t[k][(i * i) % mods[k]] = true;
            }
        }
        return t;
    }();
    if (!kResidues[0][mpz_fdiv_ui(n.get_mpz_t(), 64)]) {
        return std::nullopt;
    }
    const unsigned long r = mpz_fdiv_ui(n.get_mpz_t(), 63UL * 65 * 11);
    if (!kResidues[1][r % 63] || !kResidues[2][r % 65] || !kResidues[3][r % 11]) {
        return std::nullopt;
    }
    mpz_class s = isqrt(n);
    if (s * s == n) {
        return s;
    }
    return std::nullopt;
}

mpz_class mod(const mpz_class& a, const mpz_class& m)
{
    mpz_class r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

mpz_class modinv(const mpz_class& a, const mpz_class& m)
{
    if (m < 2) {
        throw Error("modinv: modulus must be >= 2");
    }
    // Extended Euclid on (a mod m, m).
    mpz_class old_r = mod(a, m), r = m;
    mpz_class old_s = 1, s = 0;
    while (r != 0) {
        mpz_class q = old_r / r;
        mpz_class t = old_r - q * r;
        old_r = std::move(r);
        r = std::move(t);
        t = old_s - q * s;
        old_s = std::move(s);
        s = std::move(t);
    }
    if (old_r != 1) {
        throw NotInvertible("modinv: " + a.get_str() + " is not invertible modulo " + m.get_str());
    }
    return mod(old_s, m);
}

namespace {

constexpr std::array<unsigned long, 13> kWitnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};

bool strong_probable_prime(const mpz_class& n, const mpz_class& d, unsigned long s, unsigned long base)
{
    const mpz_class n1 = n - 1;
    mpz_class x;
    mpz_class a = base;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n1) {
        return true;
    }
    for (unsigned long r = 1; r < s; ++r) {
        x = x * x % n;
        if (x == n1) {
            return true;
        }
        if (x == 1) {
            return false;
        }
    }
    return false;
}

}  // namespace

bool is_prime(const mpz_class& n)
{
    if (n < 2) {
        return false;
    }
    for (unsigned long p : kWitnesses) {
        if (n == p) {
            return true;
        }
        if (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) {
            return false;
        }
    }
    mpz_class d = n - 1;
    unsigned long s = 0;
    while (mpz_even_p(d.get_mpz_t())) {
        d >>= 1;
        ++s;
    }
    for (unsigned long base : kWitnesses) {
        if (!strong_probable_prime(n, d, s, base)) {
            return false;
        }
    }
    return true;
}

mpz_class next_prime(const mpz_class& n)
{
    if (n <= 2) {
        return 2;
    }
    mpz_class c = n;
    if (mpz_even_p(c.get_mpz_t())) {
        ++c;
    }
    while (!is_prime(c)) {
        c += 2;
    }
    return c;
}

mpz_class round_div(const mpz_class& num, const mpz_class& den)
{
    mpz_class q;
    mpz_class twice = 2 * num + den;
    mpz_class dd = 2 * den;
    mpz_fdiv_q(q.get_mpz_t(), twice.get_mpz_t(), dd.get_mpz_t());
    return q;
}

double log2(const mpz_class& n)
{
    if (n <= 0) {
        throw Error("log2: argument must be positive");
    }
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return std::log2(mant) + static_cast<double>(exp);
}

mpz_class parse_integer(const std::string& text)
{
    std::string t = text;
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        neg = t[0] == '-';
        t.erase(0, 1);
    }
    int base = 10;
    if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
        base = 16;
        t.erase(0, 2);
    }
    if (t.empty()) {
        throw Error("invalid integer: '" + text + "'");
    }
    for (char c : t) {
        const bool ok = base == 10 ? std::isdigit(static_cast<unsigned char>(c)) != 0
                                   : std::isxdigit(static_cast<unsigned char>(c)) != 0;
        if (!ok) {
            throw Error("invalid integer: '" + text + "'");
        }
    }
    mpz_class v(t, base);
    return neg ? mpz_class(-v) : v;
}

PrimeModulus::PrimeModulus(mpz_class b) : b_(std::move(b))
{
    if (b_ < 2 || !is_prime(b_)) {
        throw Error("PrimeModulus: " + b_.get_str() + " is not prime");
    }
}

ModulusSelection select_modulus(const mpz_class& N, const mpz_class& p, bool allow_zero_residue)
{
    return select_modulus_centered(N, p, isqrt(N), allow_zero_residue);
}

ModulusSelection select_modulus_centered(const mpz_class& N, const mpz_class& p, const mpz_class& s,
                                         bool allow_zero_residue)
{
    if (p <= 1 || N % p != 0) {
        throw Error("select_modulus: p must be a nontrivial divisor of N");
    }
    mpz_class B = next_prime(iroot(N, 6));
    for (int tried = 0; tried < kModulusCandidateCap; ++tried, B = next_prime(B + 1)) {
        mpz_class x0 = mod(p - s, B);
        if (x0 == 0) {
            if (!allow_zero_residue) {
                continue;
            }
        } else if (gcd(B, x0) != 1) {
            continue;
        }
        if (gcd(s, B) != 1 || gcd(s + x0, B) != 1) {
            continue;
        }
        return {PrimeModulus(B), std::move(x0)};
    }
    throw SelectionExhausted("select_modulus: no admissible prime among " +
                             std::to_string(kModulusCandidateCap) + " candidates");
}

}  // namespace factorlab::ntheory
