#include "factorlab/fermat.hpp"

#include <string>
#include <utility>

namespace factorlab::fermat {

using ntheory::is_perfect_square;
using ntheory::isqrt;

std::optional<FermatReport> fermat_factor(const mpz_class& N, std::uint64_t step_cap)
{
    if (N < 3 || mpz_even_p(N.get_mpz_t())) {
        throw Error("fermat_factor: N must be odd and >= 3");
    }
    mpz_class u = isqrt(N);
    if (u * u < N) {
        ++u;
    }
    FermatReport report;
    report.start_u = u;
    // r = u^2 - N, updated incrementally: (u+1)^2 - u^2 = 2u + 1.
    mpz_class r = u * u - N;
    mpz_class step = 2 * u + 1;
    while (report.steps < step_cap) {
        ++report.steps;
        if (auto v = is_perfect_square(r)) {
            report.p = u - *v;
            report.q = u + *v;
            return report;
        }
        r += step;
        step += 2;
        ++u;
    }
    return std::nullopt;
}

mpz_class compute_initial_u(const mpz_class& N, const mpz_class& x, RootSemantics roots)
{
    if (N < 16) {
        throw Error("compute_initial_u: N must be >= 16");
    }
    // s = N^(1/2), t = N^(1/4) as S / 2^k, T / 2^k; k = 0 gives the floors.
    const unsigned long k = roots == RootSemantics::kFloor ? 0 : kRootFractionBits;
    const mpz_class S = isqrt(N << (2 * k));
    const mpz_class T = ntheory::iroot(N << (4 * k), 4);
    const mpz_class one = mpz_class(1) << k;
    const mpz_class den = T + x * one;
    if (den <= 0) {
        throw DegenerateDenominator("compute_initial_u: N^(1/4) + x = " + den.get_str() + " / 2^" +
                                    std::to_string(k) + " <= 0");
    }
    // U0 = 2s + 2tx - (2sx + tx^2) / (t + x), as one fraction over 2^k (t + x) 2^k.
    const mpz_class num = (2 * S + 2 * T * x) * den - (2 * S * x + T * x * x) * one;
    // Nearest even integer: 2 * round(num / (2 den 2^k)).
    return 2 * ntheory::round_div(num, 2 * den * one);
}

std::optional<FermatReport> shifted_fermat(const mpz_class& N, const mpz_class& x, std::uint64_t step_cap,
                                           RootSemantics roots)
{
    if (N < 3 || mpz_even_p(N.get_mpz_t())) {
        throw Error("shifted_fermat: N must be odd and >= 3");
    }
    const mpz_class four_n = 4 * N;
    // Smallest even U with U^2 >= 4N.
    mpz_class floor_u = isqrt(four_n);
    if (floor_u * floor_u < four_n) {
        ++floor_u;
    }
    if (mpz_odd_p(floor_u.get_mpz_t())) {
        ++floor_u;
    }

    // Tiny N have no N^(1/4)-scale offset; the classic starting point is exact.
    const mpz_class u0 = N >= 16 ? compute_initial_u(N, x, roots) : floor_u;

    FermatReport report;
    report.start_u = u0;

    auto probe = [&](const mpz_class& u) -> bool {
        ++report.steps;
        if (auto v = is_perfect_square(u * u - four_n)) {
            report.p = (u - *v) / 2;
            report.q = (u + *v) / 2;
            return true;
        }
        return false;
    };

    if (u0 >= floor_u && probe(u0)) {
        return report;
    }
    mpz_class up = u0 + 2;
    mpz_class down = u0 - 2;
    while (report.steps < step_cap) {
        if (up < floor_u) {
            up = floor_u;
        }
        if (probe(up)) {
            return report;
        }
        up += 2;
        if (down >= floor_u && report.steps < step_cap) {
            if (probe(down)) {
                return report;
            }
            down -= 2;
        }
    }
    return std::nullopt;
}

}  // namespace factorlab::fermat
