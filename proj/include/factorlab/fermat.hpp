#pragma once

#include <cstdint>
#include <optional>

#include <gmpxx.h>

#include "factorlab/ntheory.hpp"

namespace factorlab {

class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

namespace fermat {

/// Outcome of a difference-of-squares search. p <= q, p * q = N.
struct FermatReport {
    mpz_class p;
    mpz_class q;
    std::uint64_t steps = 0;  // square tests performed
    mpz_class start_u;        // first U probed (u for the classic search, U = p+q for the shifted one)
};

inline constexpr std::uint64_t kDefaultStepCap = std::uint64_t{1} << 20;

/// Classic Fermat: u = ceil(sqrt N), ceil(sqrt N)+1, ... until u^2 - N = v^2.
/// Returns nullopt after step_cap square tests.
std::optional<FermatReport> fermat_factor(const mpz_class& N, std::uint64_t step_cap = kDefaultStepCap);

/// How N^(1/2) and N^(1/4) enter the starting estimate.
///
/// kFloor uses [N^(1/2)] and [N^(1/4)]. Since [N^(1/4)]^2 can miss [N^(1/2)]
/// by up to 2 N^(1/4), the estimate is then off by up to about 4|x|.
/// kReal uses both roots to kRootFractionBits fractional bits; the estimate
/// is exact for x0 = 0 and the error is quadratic in x0.
enum class RootSemantics { kFloor, kReal };

inline constexpr unsigned long kRootFractionBits = 64;

/// Estimate of U = p + q for p = N^(1/2) + N^(1/4) x + x0 with x0
/// unknown (treated as 0), rounded to the nearest even integer.
/// Throws DegenerateDenominator if N^(1/4) + x <= 0.
mpz_class compute_initial_u(const mpz_class& N, const mpz_class& x, RootSemantics roots = RootSemantics::kFloor);

/// Searches U = U0, U0+2, U0-2, U0+4, ... for U^2 - 4N = V^2, where U0 is
/// compute_initial_u(N, x, roots). Candidates with U^2 < 4N are skipped and
/// not counted as steps.
std::optional<FermatReport> shifted_fermat(const mpz_class& N, const mpz_class& x,
                                           std::uint64_t step_cap = kDefaultStepCap,
                                           RootSemantics roots = RootSemantics::kReal);

}  // namespace fermat
}  // namespace factorlab
