// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "factorlab/fermat.hpp"
#include "factorlab/harness.hpp"
#include "factorlab/lattice.hpp"
#include "factorlab/ntheory.hpp"
#include "factorlab/polybuild.hpp"

using namespace factorlab;
using harness::SplitMix64;
using polybuild::BilinearPoly;
using polybuild::RootBounds;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = limit_s <= 0 || secs < limit_s;
    const bool ok = o.pass && in_time;
    failures += ok ? 0 : 1;
    std::ostringstream t;
    t.precision(2);
    t << std::fixed << secs << " s";
    if (limit_s > 0) {
        t << " / limit " << limit_s << " s";
    }
    std::cout << (ok ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << o.detail << " [" << t.str()
              << (in_time ? "" : ", TOO SLOW") << "]" << std::endl;
}

// instances shared by criteria 4 and 5
struct Instance {
    harness::Semiprime s;
    polybuild::FactorCenter c;
    polybuild::PartialResidue pr;
};

std::vector<Instance> balanced_instances(std::size_t count)
{
    std::vector<Instance> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        harness::SemiprimeSpec spec;
        spec.bits = 20 + static_cast<unsigned>(i % 41);
        spec.seed = 1000 + i;
        auto s = harness::gen_semiprime(spec);
        auto c = polybuild::FactorCenter::balanced(s.N);
        auto pr = harness::reveal_partial_residue(s.N, s.p, c);
        out.push_back({std::move(s), std::move(c), std::move(pr)});
    }
    return out;
}

Outcome twin_primes()
{
    SplitMix64 rng(101);
    int done = 0, bad = 0;
    while (done < 50) {
        const mpz_class p = ntheory::next_prime(rng.uniform(3, (mpz_class(1) << 20) - 3));
        if (p + 2 > (mpz_class(1) << 20) || !ntheory::is_prime(p + 2)) {
            continue;
        }
        const mpz_class N = p * (p + 2);
        const auto r = fermat::fermat_factor(N, 10);
        ++done;
        // p = sqrt(N + 1) - 1 exactly
        const auto root = ntheory::is_perfect_square(N + 1);
        if (!r || r->steps != 1 || r->p != p || r->q != p + 2 || !root || *root - 1 != p) {
            ++bad;
        }
    }
    return {bad == 0, std::to_string(done - bad) + "/50 twin products split in exactly 1 step"};
}

Outcome fermat_bruteforce()
{
    const unsigned lim = 100000;
    std::vector<unsigned> spf(lim + 1, 0);
    for (unsigned i = 2; i <= lim; ++i) {
        if (spf[i] == 0) {
            for (unsigned j = i; j <= lim; j += i) {
                if (spf[j] == 0) {
                    spf[j] = i;
                }
            }
        }
    }
    int count = 0, bad = 0;
    for (unsigned n = 9; n <= lim; n += 2) {
        const unsigned p = spf[n], q = n / p;
        if (p == n || spf[q] != q) {
            continue;  // prime, or more than two prime factors
        }
        ++count;
        // independent count of u in [ceil sqrt n, (p+q)/2]
        unsigned u0 = static_cast<unsigned>(std::sqrt(static_cast<double>(n)));
        while (u0 * u0 < n) {
            ++u0;
        }
        while (u0 > 0 && (u0 - 1) * (u0 - 1) >= n) {
            --u0;
        }
        const std::uint64_t expect = (p + q) / 2 - u0 + 1;
        const auto r = fermat::fermat_factor(n, 1u << 20);
        if (!r || r->steps != expect || r->p * r->q != n || r->p != p) {
            ++bad;
        }
    }
    return {bad == 0 && count > 0,
            std::to_string(count - bad) + "/" + std::to_string(count) + " odd semiprimes <= 1e5 match"};
}

Outcome shifted_cycles()
{
    SplitMix64 rng(303);
    int done = 0, bad = 0, attempts = 0, floor_over = 0;
    std::uint64_t worst_steps = 0, floor_worst = 0;
    while (done < 100 && ++attempts < 100000) {
        // aim for a 40-bit N: center s0 in [2^19.5, 2^20)
        const mpz_class s0 = rng.uniform(mpz_class(741456), (mpz_class(1) << 20) - 1);
        const long x = static_cast<long>(rng.next() % 33) - 16;
        const long jitter = static_cast<long>(rng.next() % 81) - 40;
        const mpz_class t0 = ntheory::isqrt(s0);
        const mpz_class p = ntheory::next_prime(s0 + t0 * x + jitter);
        const mpz_class q = ntheory::next_prime((s0 * s0 + p - 1) / p);
        if (p == q) {
            continue;
        }
        const mpz_class N = p * q;
        if (mpz_sizeinbase(N.get_mpz_t(), 2) != 40) {
            continue;
        }
        // x0 relative to the exact [sqrt N], [N^(1/4)] of this N
        const mpz_class s = ntheory::isqrt(N), t = ntheory::isqrt(s);
        const mpz_class x0 = p - s - t * x;
        if (abs(x0) > 64) {
            continue;
        }
        ++done;
        const mpz_class bound = 4 * x0 * x0 / p + 8;
        const auto r = fermat::shifted_fermat(N, x, 1u << 20);
        if (!r || r->p * r->q != N || mpz_class(static_cast<unsigned long>(r->steps)) > bound) {
            ++bad;
        } else {
            worst_steps = std::max(worst_steps, r->steps);
        }
        // the same search started from the floor-root estimate, reported only
        const auto f = fermat::shifted_fermat(N, x, 1u << 20, fermat::RootSemantics::kFloor);
        if (f) {
            floor_worst = std::max(floor_worst, f->steps);
            floor_over += mpz_class(static_cast<unsigned long>(f->steps)) > bound ? 1 : 0;
        }
    }
    return {bad == 0 && done == 100, std::to_string(done - bad) + "/" + std::to_string(done) +
                                         " within 4 x0^2/p + 8 steps, max steps " + std::to_string(worst_steps) +
                                         "; floor-root start exceeds the bound on " + std::to_string(floor_over) +
                                         "/" + std::to_string(done) + ", max steps " + std::to_string(floor_worst)};
}

Outcome root_identity(const std::vector<Instance>& inst)
{
    int bad = 0;
    for (const auto& in : inst) {
        const mpz_class B = in.pr.B.value();
        const mpz_class y0 = polybuild::solve_companion_residue(in.s.N, in.c, in.pr);
        const auto f = polybuild::build_polynomial(in.s.N, in.c, in.pr, y0);
        const mpz_class dx = in.s.p - in.c.P0 - in.pr.x0, dy = in.s.q - in.c.Q0 - y0;
        if (y0 != ntheory::mod(in.s.q - in.c.Q0, B) || dx % B != 0 || dy % B != 0 || f(dx / B, dy / B) != 0) {
            ++bad;
        }
    }
    return {bad == 0, std::to_string(inst.size() - bad) + "/" + std::to_string(inst.size()) +
                          " instances (20-60 bits) with f(x1, y1) = 0 and y0 = (q - Q0) mod B"};
}

Outcome uncorrected_constant(const std::vector<Instance>& inst)
{
    int nonresidue = 0, root_lost = 0, y0_differs = 0, coincide = 0;
    double expected = 0.0;
    for (const auto& in : inst) {
        const mpz_class B = in.pr.B.value();
        const mpz_class s = in.c.P0;
        const bool differs_mod_b = ntheory::mod(in.s.N - s * s, B) != 0;
        const mpz_class y0 = polybuild::solve_companion_residue(in.s.N, in.c, in.pr);
        const mpz_class y0_short =
            polybuild::solve_companion_residue(in.s.N, in.c, in.pr, polybuild::Expansion::kOmitCenterDefect);
        const auto g = polybuild::build_polynomial(in.s.N, in.c, in.pr, y0, polybuild::Expansion::kOmitCenterDefect);
        const mpz_class x1 = (in.s.p - s - in.pr.x0) / B, y1 = (in.s.q - s - y0) / B;
        nonresidue += differs_mod_b ? 1 : 0;
        root_lost += (differs_mod_b && g(x1, y1) != 0) ? 1 : 0;
        y0_differs += y0_short != y0 ? 1 : 0;
        coincide += (y0_short != y0) == differs_mod_b ? 1 : 0;
        expected += 1.0 - 1.0 / B.get_d();
    }
    const double n = static_cast<double>(inst.size());
    std::ostringstream d;
    d.precision(3);
    d << std::fixed << "root lost on " << root_lost << "/" << nonresidue << " instances with N != [sqrt N]^2 mod B; "
      << "short-form y0 wrong on " << y0_differs / n << " of instances (mean 1 - 1/B = " << expected / n
      << "), agreement with the residue test " << coincide << "/" << inst.size();
    return {root_lost == nonresidue && coincide == static_cast<int>(inst.size()), d.str()};
}

Outcome lll_suite()
{
    SplitMix64 rng(606);
    const mpz_class lim = mpz_class(1) << 40;
    int done = 0, bad = 0;
    while (done < 200) {
        const std::size_t n = 2 + done % 7;
        std::vector<lattice::Vector> rows(n, lattice::Vector(n));
        for (auto& r : rows) {
            for (auto& v : r) {
                v = rng.uniform(-lim, lim);
            }
        }
        const lattice::IntegerMatrix in(rows);
        if (lattice::gram_determinant(in) == 0) {
            continue;
        }
        ++done;
        const auto out = lattice::lll_reduce(in);
        const auto chk = lattice::verify_reduction(in, out);
        if (!chk.ok() || lattice::gram_determinant(out) != lattice::gram_determinant(in)) {
            ++bad;
        }
    }
    return {bad == 0, std::to_string(bad) + " violations over 200 bases (dims 2-8, entries up to 2^40)"};
}

// Random bilinear f with a planted root. Coefficient sizes are chosen so that
// the margin lands near `target` bits.
std::optional<std::pair<BilinearPoly, RootBounds>> planted_instance(SplitMix64& rng, double target)
{
    const unsigned lx = static_cast<unsigned>(rng.uniform(1, 10).get_ui());
    const unsigned ly = static_cast<unsigned>(rng.uniform(1, 10).get_ui());
    const mpz_class X = rng.uniform(mpz_class(1) << (lx - 1), mpz_class(1) << lx);
    const mpz_class Y = rng.uniform(mpz_class(1) << (ly - 1), mpz_class(1) << ly);
    const double lw = 1.5 * (ntheory::log2(X * Y) + target);
    if (lw < 1) {
        return std::nullopt;
    }
    const mpz_class W = mpz_class(1) << static_cast<unsigned>(lw + 1);
    auto coeff = [&](mpz_class mag) {
        if (mag < 1) {
            mag = 1;
        }
        const mpz_class v = rng.uniform(1, mag);
        return (rng.next() & 1) != 0 ? mpz_class(-v) : v;
    };
    const mpz_class x1 = rng.uniform(-X, X), y1 = rng.uniform(-Y, Y);
    BilinearPoly f{coeff(W / (X * Y)), coeff(W / X), coeff(W / Y), 0};
    f.c0 = -(f.c3 * x1 * y1 + f.c2 * x1 + f.c1 * y1);
    if (polybuild::is_reducible(f)) {
        return std::nullopt;
    }
    return std::make_pair(f, RootBounds(X, Y));
}

Outcome coppersmith_completeness()
{
    SplitMix64 rng(707);
    int complete = 0, high = 0, unsound = 0, any = 0, attempts = 0;
    // margin >= 2: must equal the exhaustive answer
    while (high < 200 && ++attempts < 100000) {
        const double target = 2.0 + static_cast<double>(rng.next() % 1000) / 100.0;
        const auto inst = planted_instance(rng, target);
        if (!inst || polybuild::bound_margin(inst->first, inst->second) < 2.0) {
            continue;
        }
        ++high;
        const auto& [f, b] = *inst;
        const auto r = lattice::coppersmith_bivariate(f, b);
        complete += r.roots == lattice::exhaustive_roots(f, b) ? 1 : 0;
    }
    // every margin, including negative: soundness only
    while (any < 200) {
        const double target = -6.0 + static_cast<double>(rng.next() % 1400) / 100.0;
        const auto inst = planted_instance(rng, target);
        if (!inst) {
            continue;
        }
        ++any;
        const auto& [f, b] = *inst;
        for (const auto& [x, y] : lattice::coppersmith_bivariate(f, b).roots) {
            if (f(x, y) != 0 || abs(x) > b.X || abs(y) > b.Y) {
                ++unsound;
            }
        }
    }
    return {complete == 200 && high == 200 && unsound == 0,
            std::to_string(complete) + "/" + std::to_string(high) + " exact at margin >= 2 bits; " +
                std::to_string(unsound) + " unverified roots over " + std::to_string(any) +
                " instances at margins -6..8"};
}

Outcome pipeline_40()
{
    int ok = 0;
    std::map<std::string, int> by_method;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        harness::SemiprimeSpec spec;
        spec.bits = 40;
        spec.seed = 4000 + seed;
        const auto s = harness::gen_semiprime(spec);
        const auto r = harness::run_pipeline(s.N, s.p);
        if (r.success && r.p * r.q == s.N && ntheory::is_prime(r.p) && ntheory::is_prime(r.q)) {
            ++ok;
            ++by_method[harness::to_string(r.method)];
        }
    }
    std::string d = std::to_string(ok) + "/100 factored (";
    for (const auto& [m, n] : by_method) {
        d += m + " " + std::to_string(n) + " ";
    }
    d.back() = ')';
    return {ok == 100, d};
}

Outcome margin_scan()
{
    const auto rows = harness::bound_scan(20, 60, 4, 25, 9);
    std::ostringstream d;
    d.precision(2);
    d << std::fixed;
    // least-squares slope of mean margin against bits
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool in_band = true;
    for (const auto& r : rows) {
        std::cout << "      " << harness::to_json(r).dump() << '\n';
        sx += r.bits;
        sy += r.mean;
        sxx += double(r.bits) * r.bits;
        sxy += r.bits * r.mean;
        in_band = in_band && r.mean >= -5 && r.mean <= 5;
    }
    const double n = static_cast<double>(rows.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    d << rows.size() << " sizes reported; mean margin " << (in_band ? "inside" : "outside") << " [-5, 5], slope "
      << slope << " bits/bit; primitive margin " << rows.front().mean_primitive << " at " << rows.front().bits
      << " bits, " << rows.back().mean_primitive << " at " << rows.back().bits << " bits";
    return {rows.size() == 11, d.str()};
}

Outcome auto_totality()
{
    int bad = 0;
    for (unsigned long n = 2; n <= 10000; ++n) {
        const auto f = harness::factor_auto(n);
        mpz_class prod = 1;
        bool primes = f.complete;
        for (const auto& x : f.factors) {
            prod *= x;
            primes = primes && ntheory::is_prime(x);
        }
        bad += (primes && prod == n) ? 0 : 1;
    }
    return {bad == 0, std::to_string(9999 - bad) + "/9999 of 2..10^4 fully factored"};
}

}  // namespace

int main()
{
    criterion(1, "Fermat twin-prime identity", 1, twin_primes);
    criterion(2, "Fermat brute-force equivalence", 10, fermat_bruteforce);
    criterion(3, "Shifted-center cycle bound", 5, shifted_cycles);

    std::vector<Instance> inst;
    criterion(4, "Root identity", 30, [&] {
        inst = balanced_instances(1000);
        return root_identity(inst);
    });
    criterion(5, "Uncorrected constant term (negative result)", 0, [&] { return uncorrected_constant(inst); });

    criterion(6, "LLL invariant suite", 60, lll_suite);
    criterion(7, "Coppersmith soundness and conditional completeness", 120, coppersmith_completeness);
    criterion(8, "End-to-end pipeline, 40-bit balanced", 60, pipeline_40);
    criterion(9, "Bound-margin scan 20-60 bits", 0, margin_scan);
    criterion(10, "factor_auto totality to 10^4", 5, auto_totality);

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
