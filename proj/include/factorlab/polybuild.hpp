#pragma once

#include <optional>

#include <gmpxx.h>

#include "factorlab/ntheory.hpp"

namespace factorlab::polybuild {

/// Approximation pair around which the two factors are expanded:
/// p = P0 + B x + x0, q = Q0 + B y + y0.
struct FactorCenter {
    mpz_class P0;
    mpz_class Q0;

    FactorCenter(mpz_class p0, mpz_class q0);

    /// P0 = Q0 = [N^(1/2)].
    static FactorCenter balanced(const mpz_class& N);
    /// P0 = [N^(1/3)], Q0 = [N^(2/3)].
    static FactorCenter unbalanced(const mpz_class& N);
};

/// The "known low part" of p: x0 = (p - P0) mod B.
struct PartialResidue {
    ntheory::PrimeModulus B;
    mpz_class x0;

    PartialResidue(ntheory::PrimeModulus b, mpz_class residue);
};

/// f(x, y) = c3 xy + c2 x + c1 y + c0.
struct BilinearPoly {
    mpz_class c3, c2, c1, c0;

    mpz_class operator()(const mpz_class& x, const mpz_class& y) const
    {
        return c3 * x * y + c2 * x + c1 * y + c0;
    }
    bool is_zero() const { return c3 == 0 && c2 == 0 && c1 == 0 && c0 == 0; }
    bool operator==(const BilinearPoly&) const = default;
};

struct RootBounds {
    mpz_class X;
    mpz_class Y;

    RootBounds(mpz_class x, mpz_class y);

    /// X = Y = [N^(1/3)].
    static RootBounds balanced(const mpz_class& N);
    /// X = 2 [N^(1/12)], Y = 2 [N^(7/12)].
    static RootBounds unbalanced(const mpz_class& N);
};

/// Which constant term / companion-residue formula to use.
///
/// kExact expands (P0 + B x + x0)(Q0 + B y + y0) - N in full. kOmitCenterDefect
/// drops the P0 Q0 - N term from both the constant and the congruence; it is
/// kept only to measure how often that truncated form loses the planted root.
enum class Expansion { kExact, kOmitCenterDefect };

PartialResidue derive_partial_residue(const mpz_class& p, const FactorCenter& center,
                                      const ntheory::PrimeModulus& B);

/// The unique y0 in [0, B) with (P0 + x0)(Q0 + y0) = N (mod B).
/// Throws NotInvertible if B divides P0 + x0.
mpz_class solve_companion_residue(const mpz_class& N, const FactorCenter& center, const PartialResidue& pr,
                                  Expansion expansion = Expansion::kExact);

BilinearPoly build_polynomial(const mpz_class& N, const FactorCenter& center, const PartialResidue& pr,
                              const mpz_class& y0, Expansion expansion = Expansion::kExact);

/// A bilinear form splits as (a1 x + a0)(b1 y + b0) over Z iff c0 c3 = c1 c2.
bool is_reducible(const BilinearPoly& f);

/// max(|c3| X Y, |c2| X, |c1| Y, |c0|).
mpz_class poly_height(const BilinearPoly& f, const RootBounds& b);

/// (2 / (3 d)) log2 W - log2(X Y), in bits. Positive means X Y < W^(2/(3d)).
double bound_margin(const BilinearPoly& f, const RootBounds& b, int degree = 1);

/// gcd of the four coefficients (0 for the zero polynomial).
mpz_class content(const BilinearPoly& f);

/// P0 + B x + x0 if it is a proper divisor of N.
std::optional<mpz_class> recover_factor(const mpz_class& N, const FactorCenter& center, const PartialResidue& pr,
                                        const mpz_class& x);

}  // namespace factorlab::polybuild
