#include "factorlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <thread>
#include <utility>

namespace factorlab::harness {

using polybuild::BilinearPoly;
using polybuild::FactorCenter;
using polybuild::PartialResidue;
using polybuild::RootBounds;

mpz_class SplitMix64::uniform(const mpz_class& lo, const mpz_class& hi)
{
    if (hi < lo) {
        throw Error("uniform: empty range");
    }
    const mpz_class span = hi - lo + 1;
    const size_t bits = mpz_sizeinbase(span.get_mpz_t(), 2);
    // Rejection sampling on the smallest power of two covering the span.
    while (true) {
        mpz_class v = 0;
        for (size_t have = 0; have < bits; have += 64) {
            v <<= 64;
            const std::uint64_t w = next();
            v += mpz_class(static_cast<unsigned long>(w >> 32)) << 32;
            v += static_cast<unsigned long>(w & 0xffffffffULL);
        }
        v >>= (bits + 63) / 64 * 64 - bits;
        if (v < span) {
            return lo + v;
        }
    }
}

namespace {

mpz_class pow2(unsigned e)
{
    mpz_class r = 1;
    r <<= e;
    return r;
}

mpz_class ceil_div(const mpz_class& a, const mpz_class& b)
{
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

// Smallest integer strictly above the rational r, minus one: the largest
// integer strictly below r.
mpz_class floor_strict_below(const mpq_class& r)
{
    mpz_class c;
    mpz_cdiv_q(c.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return c - 1;
}

Semiprime gen_balanced(const SemiprimeSpec& spec, SplitMix64& rng)
{
    const mpz_class n_lo = pow2(spec.bits - 1);
    const mpz_class n_hi = pow2(spec.bits) - 1;
    // p < q < 2p gives sqrt(N/2) < p < sqrt(N).
    const mpz_class p_lo = ntheory::isqrt(n_lo / 2);
    const mpz_class p_hi = ntheory::isqrt(n_hi);
    for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
        const mpz_class p = ntheory::next_prime(rng.uniform(p_lo, p_hi));
        const mpz_class q_lo = std::max(mpz_class(p + 1), ceil_div(n_lo, p));
        const mpz_class q_hi = std::min(mpz_class(2 * p - 1), mpz_class(n_hi / p));
        if (q_lo > q_hi) {
            continue;
        }
        const mpz_class q = ntheory::next_prime(rng.uniform(q_lo, q_hi));
        if (q > q_hi) {
            continue;
        }
        return {p * q, p, q};
    }
    throw GenerationExhausted("gen_semiprime: no balanced instance found");
}

Semiprime gen_unbalanced(const SemiprimeSpec& spec, SplitMix64& rng)
{
    const mpz_class n_lo = pow2(spec.bits - 1);
    const mpz_class n_hi = pow2(spec.bits) - 1;
    // N < p^3 / alpha and N < 2^bits.
    const mpq_class scaled_lo = spec.alpha * mpq_class(n_lo);
    const mpz_class p_lo = std::max(mpz_class(2), ntheory::iroot(mpz_class(scaled_lo.get_num() / scaled_lo.get_den()), 3));
    const mpz_class p_hi = ntheory::iroot(n_hi, 3);
    for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
        const mpz_class p = ntheory::next_prime(rng.uniform(p_lo, p_hi));
        const mpq_class p2(p * p);
        // p^2 < q < min(p^2 / alpha, beta^2 p^2).
        const mpq_class upper = std::min(mpq_class(p2 / spec.alpha), mpq_class(spec.beta * spec.beta * p2));
        mpz_class q_lo = std::max(mpz_class(p * p + 1), ceil_div(n_lo, p));
        mpz_class q_hi = std::min(floor_strict_below(upper), mpz_class(n_hi / p));
        if (q_lo > q_hi) {
            continue;
        }
        const mpz_class q = ntheory::next_prime(rng.uniform(q_lo, q_hi));
        if (q > q_hi) {
            continue;
        }
        Semiprime s{p * q, p, q};
        if (in_class(s, spec)) {
            return s;
        }
    }
    throw GenerationExhausted("gen_semiprime: no unbalanced instance found");
}

}  // namespace

bool in_class(const Semiprime& s, const SemiprimeSpec& spec)
{
    if (s.p * s.q != s.N || !ntheory::is_prime(s.p) || !ntheory::is_prime(s.q)) {
        return false;
    }
    if (spec.balance == Balance::kBalanced) {
        return s.p < s.q && s.q < 2 * s.p;
    }
    const mpz_class p3 = s.p * s.p * s.p;
    const mpz_class q3 = s.q * s.q * s.q;
    const mpq_class n(s.N);
    return spec.alpha * n < mpq_class(p3) && p3 < s.N && s.N * s.N < q3 &&
           mpq_class(q3) < spec.beta * spec.beta * n * n;
}

Semiprime gen_semiprime(const SemiprimeSpec& spec)
{
    if (spec.bits < 16) {
        throw Error("gen_semiprime: bits must be >= 16");
    }
    if (spec.alpha <= 0 || spec.alpha >= 1 || spec.beta <= 1) {
        throw Error("gen_semiprime: need 0 < alpha < 1 < beta");
    }
    SplitMix64 rng(spec.seed);
    return spec.balance == Balance::kBalanced ? gen_balanced(spec, rng) : gen_unbalanced(spec, rng);
}

std::string to_string(Method m)
{
    switch (m) {
    case Method::kFermat:
        return "FERMAT";
    case Method::kShiftedFermat:
        return "SHIFTED_FERMAT";
    case Method::kCoppersmith:
        return "COPPERSMITH";
    case Method::kXSweep:
        return "X_SWEEP";
    }
    return "X_SWEEP";
}

Method method_from_string(const std::string& s)
{
    for (Method m : {Method::kFermat, Method::kShiftedFermat, Method::kCoppersmith, Method::kXSweep}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw Error("unknown method '" + s + "'");
}

nlohmann::json to_json(const TrialRecord& r)
{
    // Integers travel as decimal strings so no consumer truncates them to 53 bits.
    nlohmann::json j = nlohmann::json::object();
    j["N"] = r.N.get_str();
    j["p"] = r.p.get_str();
    j["q"] = r.q.get_str();
    j["B"] = r.B.get_str();
    j["x0"] = r.x0.get_str();
    j["y0"] = r.y0.get_str();
    j["method"] = to_string(r.method);
    j["steps"] = std::to_string(r.steps);
    j["margin_bits"] = r.margin_bits;
    j["success"] = r.success;
    j["elapsed_ms"] = r.elapsed_ms;
    return j;
}

TrialRecord record_from_json(const nlohmann::json& j)
{
    TrialRecord r;
    r.N = mpz_class(j.at("N").get<std::string>());
    r.p = mpz_class(j.at("p").get<std::string>());
    r.q = mpz_class(j.at("q").get<std::string>());
    r.B = mpz_class(j.at("B").get<std::string>());
    r.x0 = mpz_class(j.at("x0").get<std::string>());
    r.y0 = mpz_class(j.at("y0").get<std::string>());
    r.method = method_from_string(j.at("method").get<std::string>());
    r.steps = std::stoull(j.at("steps").get<std::string>());
    r.margin_bits = j.at("margin_bits").get<double>();
    r.success = j.at("success").get<bool>();
    r.elapsed_ms = j.at("elapsed_ms").get<double>();
    return r;
}

FactorCenter center_for(const mpz_class& N, Balance balance)
{
    return balance == Balance::kBalanced ? FactorCenter::balanced(N) : FactorCenter::unbalanced(N);
}

RootBounds bounds_for(const mpz_class& N, Balance balance)
{
    return balance == Balance::kBalanced ? RootBounds::balanced(N) : RootBounds::unbalanced(N);
}

mpz_class sweep_limit_for(const mpz_class& N, Balance balance, const mpz_class& B)
{
    if (balance == Balance::kBalanced) {
        return bounds_for(N, balance).X;
    }
    // p <= [N^(1/3)] = P0, so the planted x lies in [-(P0 / B) - 1, 0].
    return ntheory::iroot(N, 3) / B + 1;
}

PartialResidue reveal_partial_residue(const mpz_class& N, const mpz_class& p, const FactorCenter& center)
{
    try {
        auto sel = ntheory::select_modulus_centered(N, p, center.P0);
        return {sel.modulus, sel.x0};
    } catch (const SelectionExhausted&) {
        // p sits on the center modulo every candidate; accept x0 = 0.
        auto sel = ntheory::select_modulus_centered(N, p, center.P0, true);
        return {sel.modulus, sel.x0};
    }
}

namespace {

void set_factor(TrialRecord& rec, const mpz_class& N, const mpz_class& f)
{
    const mpz_class other = N / f;
    rec.p = std::min(f, other);
    rec.q = std::max(f, other);
    rec.success = true;
}

// Tests P0 + B x + x0 | N for x = 0, 1, -1, 2, -2, ... with |x| <= limit.
std::optional<mpz_class> x_sweep(const mpz_class& N, const FactorCenter& center, const PartialResidue& pr,
                                 const mpz_class& limit, std::uint64_t& steps)
{
    const mpz_class base = center.P0 + pr.x0;
    const mpz_class& B = pr.B.value();
    if (N < mpz_class(std::numeric_limits<long>::max()) && abs(base) + B * limit < mpz_class(std::numeric_limits<long>::max())) {
        const auto n = static_cast<unsigned __int128>(N.get_ui());
        const __int128 b0 = base.get_si();
        const __int128 step = B.get_si();
        const long lim = limit.get_si();
        for (long x = 0; x <= lim; ++x) {
            for (int sign : {1, -1}) {
                if (x == 0 && sign == -1) {
                    continue;
                }
                ++steps;
                const __int128 cand = b0 + step * (sign * x);
                if (cand > 1 && static_cast<unsigned __int128>(cand) < n &&
                    n % static_cast<unsigned __int128>(cand) == 0) {
                    return mpz_class(static_cast<unsigned long>(cand));
                }
            }
        }
        return std::nullopt;
    }
    for (mpz_class x = 0; x <= limit; ++x) {
        for (int sign : {1, -1}) {
            if (x == 0 && sign == -1) {
                continue;
            }
            ++steps;
            if (auto f = polybuild::recover_factor(N, center, pr, sign * x)) {
                return f;
            }
        }
    }
    return std::nullopt;
}

double elapsed_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TrialRecord solve_from_residue(const mpz_class& N, const FactorCenter& center, const PartialResidue& pr,
                               const RootBounds& bounds, const mpz_class& sweep_limit, const PipelineOptions& opts)
{
    TrialRecord rec;
    rec.N = N;
    rec.B = pr.B.value();
    rec.x0 = pr.x0;
    try {
        rec.y0 = polybuild::solve_companion_residue(N, center, pr);
    } catch (const NotInvertible&) {
        return rec;
    }
    const BilinearPoly f = polybuild::build_polynomial(N, center, pr, rec.y0);
    if (polybuild::poly_height(f, bounds) >= 2) {
        rec.margin_bits = polybuild::bound_margin(f, bounds);
    }

    if (opts.use_lattice && !polybuild::is_reducible(f)) {
        const auto solved = lattice::coppersmith_bivariate(f, bounds, opts.reduction);
        rec.steps = solved.rows_scanned;
        for (const auto& [x, y] : solved.roots) {
            if (auto p = polybuild::recover_factor(N, center, pr, x)) {
                rec.method = Method::kCoppersmith;
                set_factor(rec, N, *p);
                return rec;
            }
        }
    }

    std::uint64_t steps = 0;
    if (auto p = x_sweep(N, center, pr, sweep_limit, steps)) {
        rec.method = Method::kXSweep;
        rec.steps = steps;
        set_factor(rec, N, *p);
        return rec;
    }
    rec.method = Method::kXSweep;
    rec.steps = steps;
    return rec;
}

TrialRecord run_pipeline(const mpz_class& N, const mpz_class& p_hint, const PipelineOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    const FactorCenter center = center_for(N, opts.balance);
    const PartialResidue pr = reveal_partial_residue(N, p_hint, center);
    const RootBounds bounds = bounds_for(N, opts.balance);
    TrialRecord rec = solve_from_residue(N, center, pr, bounds, sweep_limit_for(N, opts.balance, pr.B.value()), opts);
    rec.elapsed_ms = elapsed_since(t0);
    if (!rec.success) {
        throw PipelineFailure("run_pipeline: neither the lattice nor the sweep found a factor of " + N.get_str());
    }
    return rec;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<unsigned long> primes_up_to(unsigned long bound)
{
    std::vector<bool> composite(bound + 1, false);
    std::vector<unsigned long> out;
    for (unsigned long i = 2; i <= bound; ++i) {
        if (composite[i]) {
            continue;
        }
        out.push_back(i);
        for (unsigned long j = i * i; j <= bound; j += i) {
            composite[j] = true;
        }
    }
    return out;
}

std::optional<std::pair<mpz_class, unsigned long>> perfect_power(const mpz_class& m)
{
    const size_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);
    for (unsigned long e = 2; e <= bits; ++e) {
        mpz_class r = ntheory::iroot(m, e);
        mpz_class back;
        mpz_pow_ui(back.get_mpz_t(), r.get_mpz_t(), e);
        if (back == m && r > 1) {
            return std::make_pair(r, e);
        }
    }
    return std::nullopt;
}

// Residue pipeline without an oracle: every x0 in [0, B) is tried.
std::optional<TrialRecord> split_by_residue_enumeration(const mpz_class& m, const AutoCaps& caps,
                                                        std::uint64_t& sweep_used)
{
    const mpz_class s = ntheory::isqrt(m);
    mpz_class B = ntheory::next_prime(ntheory::iroot(m, 6));
    while (s % B == 0) {
        B = ntheory::next_prime(B + 1);
    }
    if (m % B == 0 && m != B) {
        TrialRecord rec;
        rec.N = m;
        rec.B = B;
        set_factor(rec, m, B);
        return rec;
    }
    const FactorCenter center = FactorCenter::balanced(m);
    const RootBounds bounds = RootBounds::balanced(m);
    // Any factor p <= s is P0 + B x + x0 with -(s / B) - 1 <= x <= 0.
    const mpz_class limit = std::max(bounds.X, mpz_class(s / B + 1));
    const ntheory::PrimeModulus modulus(B);
    PipelineOptions opts;
    opts.reduction = caps.reduction;
    opts.use_lattice = caps.use_lattice;
    const std::uint64_t per_run = 2 * limit.get_ui() + 1;
    for (mpz_class x0 = 0; x0 < B; ++x0) {
        if ((s + x0) % B == 0) {
            continue;  // p = 0 mod B, ruled out above
        }
        if (sweep_used + per_run > caps.sweep_budget) {
            return std::nullopt;
        }
        TrialRecord rec = solve_from_residue(m, center, PartialResidue(modulus, x0), bounds, limit, opts);
        if (rec.method == Method::kXSweep) {
            sweep_used += rec.steps;
        }
        if (rec.success) {
            return rec;
        }
    }
    return std::nullopt;
}

}  // namespace

Factorization factor_auto(const mpz_class& N, const AutoCaps& caps)
{
    if (N < 2) {
        throw Error("factor_auto: N must be >= 2");
    }
    Factorization out;
    mpz_class m = N;
    const unsigned long bound = std::max(caps.trial_bound, 2UL);
    for (unsigned long pr : primes_up_to(bound)) {
        if (mpz_class(pr) * pr > m) {
            break;
        }
        while (mpz_divisible_ui_p(m.get_mpz_t(), pr) != 0) {
            out.factors.emplace_back(pr);
            m /= pr;
        }
    }

    std::vector<mpz_class> work;
    if (m > 1) {
        work.push_back(m);
    }
    std::uint64_t sweep_used = 0;
    while (!work.empty()) {
        mpz_class c = std::move(work.back());
        work.pop_back();
        if (c == 1) {
            continue;
        }
        if (ntheory::is_prime(c)) {
            out.factors.push_back(std::move(c));
            continue;
        }
        if (auto pp = perfect_power(c)) {
            for (unsigned long i = 0; i < pp->second; ++i) {
                work.push_back(pp->first);
            }
            continue;
        }
        if (mpz_even_p(c.get_mpz_t())) {
            work.emplace_back(2);
            work.push_back(c / 2);
            continue;
        }
        if (caps.use_fermat) {
            const auto t0 = std::chrono::steady_clock::now();
            if (auto rep = fermat::fermat_factor(c, caps.fermat_cap); rep && rep->p > 1) {
                TrialRecord rec;
                rec.N = c;
                rec.p = rep->p;
                rec.q = rep->q;
                rec.method = Method::kFermat;
                rec.steps = rep->steps;
                rec.success = true;
                rec.elapsed_ms = elapsed_since(t0);
                out.splits.push_back(rec);
                work.push_back(rep->p);
                work.push_back(rep->q);
                continue;
            }
        }
        if (caps.use_pipeline) {
            const auto t0 = std::chrono::steady_clock::now();
            if (auto rec = split_by_residue_enumeration(c, caps, sweep_used)) {
                rec->elapsed_ms = elapsed_since(t0);
                out.splits.push_back(*rec);
                work.push_back(rec->p);
                work.push_back(rec->q);
                continue;
            }
        }
        out.complete = false;
        out.factors.push_back(std::move(c));
    }
    std::sort(out.factors.begin(), out.factors.end());
    return out;
}

std::vector<TrialRecord> experiment_run(const SemiprimeSpec& spec, std::size_t count, const PipelineOptions& opts,
                                        unsigned threads)
{
    std::vector<TrialRecord> records(count);
    if (count == 0) {
        return records;
    }
    auto run_trial = [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        SemiprimeSpec s = spec;
        s.seed = spec.seed + i;
        TrialRecord rec;
        try {
            const Semiprime sp = gen_semiprime(s);
            PipelineOptions o = opts;
            o.balance = spec.balance;
            const FactorCenter center = center_for(sp.N, spec.balance);
            const PartialResidue pr = reveal_partial_residue(sp.N, sp.p, center);
            rec = solve_from_residue(sp.N, center, pr, bounds_for(sp.N, spec.balance),
                                     sweep_limit_for(sp.N, spec.balance, pr.B.value()), o);
        } catch (const Error&) {
            rec.success = false;
        }
        rec.elapsed_ms = elapsed_since(t0);
        records[i] = std::move(rec);
    };

    unsigned workers = threads != 0 ? threads : std::max(1U, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                run_trial(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    return records;
}

std::vector<BoundScanRow> bound_scan(unsigned bits_min, unsigned bits_max, unsigned step, std::size_t trials_per_size,
                                     std::uint64_t seed)
{
    if (bits_min < 16 || bits_max > 64 || bits_min > bits_max || step == 0 || trials_per_size == 0) {
        throw Error("bound_scan: need 16 <= bits_min <= bits_max <= 64, step >= 1, trials >= 1");
    }
    std::vector<BoundScanRow> rows;
    for (unsigned bits = bits_min; bits <= bits_max; bits += step) {
        BoundScanRow row;
        row.bits = bits;
        row.min = std::numeric_limits<double>::infinity();
        row.max = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        double sum_primitive = 0.0;
        for (std::size_t t = 0; t < trials_per_size; ++t) {
            SemiprimeSpec spec;
            spec.bits = bits;
            spec.seed = seed * 1000003ULL + bits * 7919ULL + t;
            const Semiprime sp = gen_semiprime(spec);
            const FactorCenter center = FactorCenter::balanced(sp.N);
            const PartialResidue pr = reveal_partial_residue(sp.N, sp.p, center);
            const mpz_class y0 = polybuild::solve_companion_residue(sp.N, center, pr);
            BilinearPoly f = polybuild::build_polynomial(sp.N, center, pr, y0);
            const RootBounds bounds = RootBounds::balanced(sp.N);
            const double margin = polybuild::bound_margin(f, bounds);
            const mpz_class cont = polybuild::content(f);
            for (mpz_class* c : {&f.c3, &f.c2, &f.c1, &f.c0}) {
                *c /= cont;
            }
            sum += margin;
            sum_primitive += polybuild::bound_margin(f, bounds);
            row.min = std::min(row.min, margin);
            row.max = std::max(row.max, margin);
        }
        row.trials = trials_per_size;
        row.mean = sum / static_cast<double>(trials_per_size);
        row.mean_primitive = sum_primitive / static_cast<double>(trials_per_size);
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json to_json(const BoundScanRow& row)
{
    nlohmann::json j = nlohmann::json::object();
    j["bits"] = row.bits;
    j["trials"] = row.trials;
    j["mean_margin_bits"] = row.mean;
    j["min_margin_bits"] = row.min;
    j["max_margin_bits"] = row.max;
    j["mean_primitive_margin_bits"] = row.mean_primitive;
    return j;
}

}  // namespace factorlab::harness
