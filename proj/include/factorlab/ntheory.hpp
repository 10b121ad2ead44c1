#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace factorlab {

// Errors shared by every module. Each signals a violated precondition or an
// exhausted search budget; none is used for ordinary control flow.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotInvertible : public Error {
public:
    using Error::Error;
};

class SelectionExhausted : public Error {
public:
    using Error::Error;
};

namespace ntheory {

/// floor(sqrt(n)) by integer Newton iteration, certified s^2 <= n < (s+1)^2.
mpz_class isqrt(const mpz_class& n);

/// floor(n^(1/k)) for n >= 0, k >= 1.
mpz_class iroot(const mpz_class& n, unsigned long k);

std::optional<mpz_class> is_perfect_square(const mpz_class& n);

/// Canonical residue of a in [0, m) for m > 0, also for negative a.
mpz_class mod(const mpz_class& a, const mpz_class& m);

/// Inverse of a modulo m in [1, m). Throws NotInvertible when gcd(a, m) > 1.
mpz_class modinv(const mpz_class& a, const mpz_class& m);

/// Miller-Rabin over the prime bases 2..41. Deterministic below 3.3e24
/// (covers all of 64 bits); above that a strong-pseudoprime test with error
/// below 4^-13 for adversarial input and far less for random input.
bool is_prime(const mpz_class& n);

/// Smallest prime >= n (2 for n <= 2).
mpz_class next_prime(const mpz_class& n);

/// Round-to-nearest of num/den (den > 0), ties toward +infinity.
mpz_class round_div(const mpz_class& num, const mpz_class& den);

/// Exact base-2 logarithm of a positive integer to double precision, valid
/// far beyond the double exponent range.
double log2(const mpz_class& n);

/// Parse decimal or 0x-prefixed hex, with optional leading sign.
mpz_class parse_integer(const std::string& text);

/// A prime modulus B >= 2.
class PrimeModulus {
public:
    explicit PrimeModulus(mpz_class b);
    const mpz_class& value() const { return b_; }

private:
    mpz_class b_;
};

struct ModulusSelection {
    PrimeModulus modulus;
    mpz_class x0;  // (p - [N^(1/2)]) mod B
};

/// Picks the partial-residue modulus for the factor p of N: the smallest prime
/// B >= [N^(1/6)] with gcd(B, x0) = gcd([N^(1/2)], B) = gcd([N^(1/2)] + x0, B) = 1,
/// where x0 = (p - [N^(1/2)]) mod B. At most 64 candidate primes are tried.
///
/// With allow_zero_residue the gcd(B, x0) condition is waived for x0 = 0,
/// which is the only way to place p = [N^(1/2)] exactly.
ModulusSelection select_modulus(const mpz_class& N, const mpz_class& p,
                                bool allow_zero_residue = false);

/// Same search around an arbitrary center P0 in place of [N^(1/2)].
ModulusSelection select_modulus_centered(const mpz_class& N, const mpz_class& p, const mpz_class& center,
                                         bool allow_zero_residue = false);

inline constexpr int kModulusCandidateCap = 64;

}  // namespace ntheory
}  // namespace factorlab
