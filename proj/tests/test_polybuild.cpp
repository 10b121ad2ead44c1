#include <doctest.h>

#include <cmath>

#include "factorlab/harness.hpp"
#include "factorlab/polybuild.hpp"

using namespace factorlab;
using namespace factorlab::polybuild;
using ntheory::PrimeModulus;

namespace {

const BilinearPoly kWorked{25, 540, 540, 25};

PartialResidue residue(long B, long x0) { return PartialResidue(PrimeModulus(B), x0); }

}  // namespace

TEST_CASE("FactorCenter and RootBounds constructors")
{
    const auto c = FactorCenter::balanced(11639);
    CHECK(c.P0 == 107);
    CHECK(c.Q0 == 107);
    const auto u = FactorCenter::unbalanced(mpz_class(1) << 36);
    CHECK(u.P0 == 4096);
    CHECK(u.Q0 == mpz_class(1) << 24);
    CHECK_THROWS_AS(FactorCenter(1, 5), Error);
    CHECK_THROWS_AS(FactorCenter(7, 5), Error);

    const auto b = RootBounds::balanced(11639);
    CHECK(b.X == 22);
    CHECK(b.Y == 22);
    const auto ub = RootBounds::unbalanced(mpz_class(1) << 36);
    CHECK(ub.X == 16);
    CHECK(ub.Y == 2 * (mpz_class(1) << 21));
    CHECK_THROWS_AS(RootBounds(0, 3), Error);
}

TEST_CASE("PartialResidue validation")
{
    CHECK_NOTHROW(residue(5, 0));
    CHECK_THROWS_AS(residue(5, 5), Error);
    CHECK_THROWS_AS(residue(5, -1), Error);
}

TEST_CASE("derive_partial_residue")
{
    const PrimeModulus B(5);
    CHECK(derive_partial_residue(103, FactorCenter(107, 107), B).x0 == 1);
    CHECK(derive_partial_residue(113, FactorCenter(107, 107), B).x0 == 1);
    CHECK(derive_partial_residue(101, FactorCenter(101, 103), B).x0 == 0);
}

TEST_CASE("solve_companion_residue")
{
    const FactorCenter c(107, 107);
    CHECK(solve_companion_residue(11639, c, residue(5, 1)) == 1);
    // brute force over [0, B)
    for (long y = 0; y < 5; ++y) {
        CHECK(((108 * (107 + y) - 11639) % 5 == 0) == (y == 1));
    }
    // x0 = 0 and N = P0 Q0 (mod B)
    CHECK(solve_companion_residue(107 * 107 + 35, c, residue(7, 0)) == 0);
}

TEST_CASE("build_polynomial worked instance")
{
    const FactorCenter c(107, 107);
    const auto f = build_polynomial(11639, c, residue(5, 1), 1);
    CHECK(f == kWorked);
    CHECK(f(-1, 1) == 0);
    CHECK(f(1, -1) == 0);

    const auto g = build_polynomial(11639, c, residue(5, 1), 1, Expansion::kOmitCenterDefect);
    CHECK(g.c0 == 215);
    CHECK(g(-1, 1) == 190);
}

TEST_CASE("build_polynomial at exact centers")
{
    const auto f = build_polynomial(101 * 103, FactorCenter(101, 103), residue(5, 0), 0);
    CHECK(f.c0 == 0);
    CHECK(f(0, 0) == 0);
}

TEST_CASE("build_polynomial unbalanced instance")
{
    const mpz_class p = 4093, q = ntheory::next_prime(mpz_class(1) << 23 | 12345);
    const mpz_class N = p * q;
    const auto c = FactorCenter::unbalanced(N);
    const auto sel = ntheory::select_modulus_centered(N, p, c.P0);
    const PartialResidue pr(sel.modulus, sel.x0);
    const mpz_class y0 = solve_companion_residue(N, c, pr);
    const mpz_class B = pr.B.value();
    CHECK(ntheory::mod(q - c.Q0, B) == y0);
    const auto f = build_polynomial(N, c, pr, y0);
    CHECK(f((p - c.P0 - pr.x0) / B, (q - c.Q0 - y0) / B) == 0);
}

TEST_CASE("is_reducible")
{
    CHECK(is_reducible({1, 1, 1, 1}));
    CHECK_FALSE(is_reducible(kWorked));
    CHECK(is_reducible({1, 2, 3, 6}));
}

TEST_CASE("poly_height and bound_margin")
{
    CHECK(poly_height(kWorked, RootBounds(22, 22)) == 12100);
    CHECK(poly_height({0, 0, 0, -9}, RootBounds(100, 3)) == 9);
    CHECK(poly_height(kWorked, RootBounds(4, 4)) == 2160);

    const double m22 = bound_margin(kWorked, RootBounds(22, 22));
    CHECK(m22 == doctest::Approx(2.0 / 3.0 * std::log2(12100.0) - std::log2(484.0)));
    CHECK(m22 == doctest::Approx(0.12).epsilon(0.05));
    CHECK(bound_margin(kWorked, RootBounds(4, 4)) == doctest::Approx(3.4).epsilon(0.02));
    CHECK(bound_margin(kWorked, RootBounds(1, 1)) >= 0);
    CHECK(bound_margin(kWorked, RootBounds(4, 4), 2) ==
          doctest::Approx(1.0 / 3.0 * std::log2(2160.0) - 4.0));
    CHECK_THROWS_AS(bound_margin({0, 0, 0, 1}, RootBounds(1, 1)), Error);
}

TEST_CASE("recover_factor")
{
    const FactorCenter c(107, 107);
    CHECK(recover_factor(11639, c, residue(5, 1), -1) == mpz_class(103));
    CHECK_FALSE(recover_factor(11639, c, residue(5, 1), 0).has_value());
    CHECK(recover_factor(101 * 103, FactorCenter(101, 103), residue(5, 0), 0) == mpz_class(101));
}

TEST_CASE("content of the pipeline polynomial is B")
{
    const auto f = build_polynomial(11639, FactorCenter(107, 107), residue(5, 1), 1);
    CHECK(content(f) == 5);
    CHECK(content({6, 4, 10, 0}) == 2);
}

TEST_CASE("root identity, irreducibility and W ~ N on generated instances")
{
    int w_below_n = 0, w_checked = 0;
    for (std::uint64_t seed = 1; seed <= 400; ++seed) {
        harness::SemiprimeSpec spec;
        spec.bits = 20 + seed % 41;
        spec.seed = seed;
        spec.balance = seed % 3 == 0 ? harness::Balance::kUnbalanced : harness::Balance::kBalanced;
        const auto s = harness::gen_semiprime(spec);
        const auto c = harness::center_for(s.N, spec.balance);
        const auto pr = harness::reveal_partial_residue(s.N, s.p, c);
        const mpz_class B = pr.B.value();
        const mpz_class y0 = solve_companion_residue(s.N, c, pr);
        REQUIRE(y0 == ntheory::mod(s.q - c.Q0, B));
        const auto f = build_polynomial(s.N, c, pr, y0);
        const mpz_class dx = s.p - c.P0 - pr.x0, dy = s.q - c.Q0 - y0;
        REQUIRE(dx % B == 0);
        REQUIRE(dy % B == 0);
        REQUIRE(f(dx / B, dy / B) == 0);
        if (s.N != (c.P0 + pr.x0) * (c.Q0 + y0)) {
            REQUIRE_FALSE(is_reducible(f));
        }
        REQUIRE(content(f) % B == 0);
        if (spec.balance == harness::Balance::kBalanced && spec.bits % 10 == 0) {
            // W >= N holds only up to the floors in B, [N^(1/2)] and [N^(1/3)]
            const mpz_class W = poly_height(f, RootBounds::balanced(s.N));
            ++w_checked;
            w_below_n += W < s.N ? 1 : 0;
            CHECK(ntheory::log2(W) - ntheory::log2(s.N) > -0.05);
        }
    }
    MESSAGE("W < N on " << w_below_n << " of " << w_checked << " balanced instances");
}

TEST_CASE("W against N on 100 balanced 40-bit instances")
{
    int below = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        harness::SemiprimeSpec spec;
        spec.bits = 40;
        spec.seed = seed;
        const auto s = harness::gen_semiprime(spec);
        const auto c = FactorCenter::balanced(s.N);
        const auto pr = harness::reveal_partial_residue(s.N, s.p, c);
        const auto f = build_polynomial(s.N, c, pr, solve_companion_residue(s.N, c, pr));
        const mpz_class W = poly_height(f, RootBounds::balanced(s.N));
        below += W < s.N ? 1 : 0;
        CHECK(ntheory::log2(W) - ntheory::log2(s.N) > -0.05);
        CHECK(W * 2 >= s.N);
    }
    MESSAGE("W < N on " << below << " of 100");
}
