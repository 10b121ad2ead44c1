#include "factorlab/polybuild.hpp"

#include <algorithm>
#include <utility>

namespace factorlab::polybuild {

using ntheory::iroot;
using ntheory::mod;

FactorCenter::FactorCenter(mpz_class p0, mpz_class q0) : P0(std::move(p0)), Q0(std::move(q0))
{
    if (P0 < 2 || P0 > Q0) {
        throw Error("FactorCenter: need 2 <= P0 <= Q0");
    }
}

FactorCenter FactorCenter::balanced(const mpz_class& N)
{
    mpz_class s = ntheory::isqrt(N);
    return {s, s};
}

FactorCenter FactorCenter::unbalanced(const mpz_class& N)
{
    return {iroot(N, 3), iroot(N * N, 3)};
}

PartialResidue::PartialResidue(ntheory::PrimeModulus b, mpz_class residue) : B(std::move(b)), x0(std::move(residue))
{
    if (x0 < 0 || x0 >= B.value()) {
        throw Error("PartialResidue: x0 must lie in [0, B)");
    }
    if (x0 != 0 && gcd(B.value(), x0) != 1) {
        throw Error("PartialResidue: gcd(B, x0) != 1");
    }
}

RootBounds::RootBounds(mpz_class x, mpz_class y) : X(std::move(x)), Y(std::move(y))
{
    if (X < 1 || Y < 1) {
        throw Error("RootBounds: X and Y must be >= 1");
    }
}

RootBounds RootBounds::balanced(const mpz_class& N)
{
    mpz_class c = std::max(iroot(N, 3), mpz_class(1));
    return {c, c};
}

RootBounds RootBounds::unbalanced(const mpz_class& N)
{
    mpz_class n7;
    mpz_pow_ui(n7.get_mpz_t(), N.get_mpz_t(), 7);
    return {std::max(mpz_class(2 * iroot(N, 12)), mpz_class(1)), std::max(mpz_class(2 * iroot(n7, 12)), mpz_class(1))};
}

PartialResidue derive_partial_residue(const mpz_class& p, const FactorCenter& center, const ntheory::PrimeModulus& B)
{
    if (p < 2) {
        throw Error("derive_partial_residue: p must be >= 2");
    }
    return {B, mod(p - center.P0, B.value())};
}

mpz_class solve_companion_residue(const mpz_class& N, const FactorCenter& center, const PartialResidue& pr,
                                  Expansion expansion)
{
    const mpz_class& B = pr.B.value();
    const mpz_class inv = ntheory::modinv(center.P0 + pr.x0, B);
    if (expansion == Expansion::kOmitCenterDefect) {
        return mod(-pr.x0 * center.Q0 * inv, B);
    }
    return mod((N - center.P0 * center.Q0 - pr.x0 * center.Q0) * inv, B);
}

BilinearPoly build_polynomial(const mpz_class& N, const FactorCenter& center, const PartialResidue& pr,
                              const mpz_class& y0, Expansion expansion)
{
    const mpz_class& B = pr.B.value();
    if (y0 < 0 || y0 >= B) {
        throw Error("build_polynomial: y0 must lie in [0, B)");
    }
    BilinearPoly f;
    f.c3 = B * B;
    f.c2 = B * (center.Q0 + y0);
    f.c1 = B * (center.P0 + pr.x0);
    if (expansion == Expansion::kOmitCenterDefect) {
        f.c0 = pr.x0 * center.Q0 + y0 * center.P0 + pr.x0 * y0;
    } else {
        f.c0 = (center.P0 + pr.x0) * (center.Q0 + y0) - N;
    }
    return f;
}

bool is_reducible(const BilinearPoly& f)
{
    return f.c0 * f.c3 == f.c1 * f.c2;
}

mpz_class poly_height(const BilinearPoly& f, const RootBounds& b)
{
    mpz_class w = abs(f.c3) * b.X * b.Y;
    w = std::max(w, mpz_class(abs(f.c2) * b.X));
    w = std::max(w, mpz_class(abs(f.c1) * b.Y));
    w = std::max(w, mpz_class(abs(f.c0)));
    return w;
}

double bound_margin(const BilinearPoly& f, const RootBounds& b, int degree)
{
    const mpz_class w = poly_height(f, b);
    if (w < 2) {
        throw Error("bound_margin: height must be >= 2");
    }
    return 2.0 / (3.0 * degree) * ntheory::log2(w) - ntheory::log2(b.X * b.Y);
}

mpz_class content(const BilinearPoly& f)
{
    mpz_class g = gcd(gcd(f.c3, f.c2), gcd(f.c1, f.c0));
    return g;
}

std::optional<mpz_class> recover_factor(const mpz_class& N, const FactorCenter& center, const PartialResidue& pr,
                                        const mpz_class& x)
{
    mpz_class p = center.P0 + pr.B.value() * x + pr.x0;
    if (p > 1 && p < N && mpz_divisible_p(N.get_mpz_t(), p.get_mpz_t()) != 0) {
        return p;
    }
    return std::nullopt;
}

}  // namespace factorlab::polybuild
