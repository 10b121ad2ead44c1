#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

#include "factorlab/fermat.hpp"
#include "factorlab/lattice.hpp"
#include "factorlab/ntheory.hpp"
#include "factorlab/polybuild.hpp"

namespace factorlab {

class GenerationExhausted : public Error {
public:
    using Error::Error;
};

class PipelineFailure : public Error {
public:
    using Error::Error;
};

namespace harness {

/// SplitMix64. Each seed gives an independent, reproducible stream.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [lo, hi], lo <= hi.
    mpz_class uniform(const mpz_class& lo, const mpz_class& hi);

private:
    std::uint64_t state_;
};

enum class Balance { kBalanced, kUnbalanced };

struct SemiprimeSpec {
    unsigned bits = 32;
    Balance balance = Balance::kBalanced;
    std::uint64_t seed = 1;
    mpq_class alpha{1, 2};
    mpq_class beta{2, 1};
};

struct Semiprime {
    mpz_class N;
    mpz_class p;  // p < q
    mpz_class q;
};

inline constexpr int kGenerationAttempts = 100000;

/// Deterministic in spec.seed. N has exactly spec.bits bits.
/// Balanced: p < q < 2p. Unbalanced: (alpha N)^(1/3) < p < N^(1/3) and
/// N^(2/3) < q < (beta N)^(2/3).
Semiprime gen_semiprime(const SemiprimeSpec& spec);

/// Exact check of the class predicate for (p, q).
bool in_class(const Semiprime& s, const SemiprimeSpec& spec);

enum class Method { kFermat, kShiftedFermat, kCoppersmith, kXSweep };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct TrialRecord {
    mpz_class N, p, q;  // p * q = N on success (p <= q), else p = q = 0
    mpz_class B, x0, y0;
    Method method = Method::kXSweep;
    std::uint64_t steps = 0;
    double margin_bits = 0.0;
    bool success = false;
    double elapsed_ms = 0.0;
};

nlohmann::json to_json(const TrialRecord& r);
TrialRecord record_from_json(const nlohmann::json& j);

struct PipelineOptions {
    Balance balance = Balance::kBalanced;
    lattice::ReductionParams reduction;
    bool use_lattice = true;
};

/// Root bounds and center used for a given class.
polybuild::FactorCenter center_for(const mpz_class& N, Balance balance);
polybuild::RootBounds bounds_for(const mpz_class& N, Balance balance);

/// The x-sweep range that contains the planted x for every member of the
/// class: [N^(1/3)] for balanced, P0 / B + 1 for unbalanced.
mpz_class sweep_limit_for(const mpz_class& N, Balance balance, const mpz_class& B);

/// Stage 1, the simulated oracle: reveals (B, x0) for the factor p and
/// nothing else.
polybuild::PartialResidue reveal_partial_residue(const mpz_class& N, const mpz_class& p,
                                                 const polybuild::FactorCenter& center);

/// Stage 2, works from (N, residue) only: companion residue, polynomial,
/// bound margin, lattice solve, then the x-sweep. Fills B/x0/y0/margin and,
/// on success, p/q/method/steps. Never throws PipelineFailure; check success.
TrialRecord solve_from_residue(const mpz_class& N, const polybuild::FactorCenter& center,
                               const polybuild::PartialResidue& pr, const polybuild::RootBounds& bounds,
                               const mpz_class& sweep_limit, const PipelineOptions& opts = {});

/// Both stages. Throws PipelineFailure when neither the lattice nor the sweep
/// recovers a factor.
TrialRecord run_pipeline(const mpz_class& N, const mpz_class& p_hint, const PipelineOptions& opts = {});

struct AutoCaps {
    unsigned long trial_bound = 10000;
    std::uint64_t fermat_cap = fermat::kDefaultStepCap;
    bool use_fermat = true;
    bool use_pipeline = true;
    bool use_lattice = true;
    std::uint64_t sweep_budget = std::uint64_t{1} << 28;  // total x-sweep tests
    lattice::ReductionParams reduction;
};

struct Factorization {
    std::vector<mpz_class> factors;  // ascending; all prime when complete
    bool complete = true;
    std::vector<TrialRecord> splits;  // one per composite split by a search
};

/// Trial division, perfect powers, Fermat, then the residue pipeline with
/// x0 enumerated over [0, B). Product of factors is always N; when a cap is
/// hit the unsplit composite is returned and complete = false.
Factorization factor_auto(const mpz_class& N, const AutoCaps& caps = {});

/// Trials use seeds spec.seed, spec.seed + 1, ... and run in parallel on up
/// to `threads` workers (0 = hardware concurrency). Output is in trial order.
std::vector<TrialRecord> experiment_run(const SemiprimeSpec& spec, std::size_t count,
                                        const PipelineOptions& opts = {}, unsigned threads = 0);

struct BoundScanRow {
    unsigned bits = 0;
    std::size_t trials = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double mean_primitive = 0.0;  // same, after dividing f by its content
};

/// Margin of the balanced construction with X = Y = [N^(1/3)], per size.
std::vector<BoundScanRow> bound_scan(unsigned bits_min, unsigned bits_max, unsigned step,
                                     std::size_t trials_per_size, std::uint64_t seed = 1);

nlohmann::json to_json(const BoundScanRow& row);

}  // namespace harness
}  // namespace factorlab
