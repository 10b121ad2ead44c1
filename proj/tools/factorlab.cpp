#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "factorlab/fermat.hpp"
#include "factorlab/harness.hpp"
#include "factorlab/lattice.hpp"
#include "factorlab/ntheory.hpp"

using namespace factorlab;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitExhausted = 2;

void print_factors(const std::vector<mpz_class>& fs)
{
    std::cout << "factors:";
    for (const auto& f : fs) {
        std::cout << ' ' << f.get_str();
    }
    std::cout << '\n';
}

int run_fermat_like(const mpz_class& N, const std::string& method, const mpz_class& x, std::uint64_t cap,
                    fermat::RootSemantics roots)
{
    if (N < 3 || mpz_even_p(N.get_mpz_t())) {
        std::cerr << "fermat methods need an odd N >= 3\n";
        return kExitUsage;
    }
    if (ntheory::is_prime(N)) {
        print_factors({N});
        return kExitOk;
    }
    harness::TrialRecord rec;
    rec.N = N;
    rec.method = method == "fermat" ? harness::Method::kFermat : harness::Method::kShiftedFermat;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = method == "fermat" ? fermat::fermat_factor(N, cap) : fermat::shifted_fermat(N, x, cap, roots);
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (rep) {
        rec.p = rep->p;
        rec.q = rep->q;
        rec.steps = rep->steps;
        rec.success = true;
        print_factors({rep->p, rep->q});
    } else {
        rec.steps = cap;
    }
    std::cout << to_json(rec).dump() << '\n';
    return rep ? kExitOk : kExitExhausted;
}

int run_auto(const mpz_class& N, bool pipeline_only, std::uint64_t cap)
{
    harness::AutoCaps caps;
    caps.fermat_cap = cap;
    if (pipeline_only) {
        caps.trial_bound = 2;
        caps.use_fermat = false;
    }
    const auto fz = harness::factor_auto(N, caps);
    print_factors(fz.factors);
    for (const auto& rec : fz.splits) {
        std::cout << to_json(rec).dump() << '\n';
    }
    return fz.complete ? kExitOk : kExitExhausted;
}

std::ostream* open_out(const std::string& path, std::ofstream& file)
{
    if (path.empty() || path == "-") {
        return &std::cout;
    }
    file.open(path);
    if (!file) {
        throw Error("cannot open " + path);
    }
    return &file;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"factorlab: semiprime factoring experiments"};
    app.require_subcommand(1);

    std::string n_text, method = "auto", x_text = "0";
    std::uint64_t cap = fermat::kDefaultStepCap;
    auto* factor = app.add_subcommand("factor", "factor N");
    factor->add_option("N", n_text, "integer, decimal or 0x-hex")->required();
    factor->add_option("--method", method)->check(CLI::IsMember({"auto", "fermat", "shifted", "pipeline"}));
    factor->add_option("--x", x_text, "shift for --method shifted");
    factor->add_option("--cap", cap, "step cap for the Fermat searches");
    bool floor_roots = false;
    factor->add_flag("--floor-roots", floor_roots, "start the shifted search from [N^(1/2)], [N^(1/4)]");

    unsigned bits = 32;
    std::size_t count = 1;
    std::uint64_t seed = 1;
    bool unbalanced = false;
    auto* gen = app.add_subcommand("gen", "generate semiprimes as JSONL");
    gen->add_option("--bits", bits)->required();
    gen->add_option("--count", count)->required();
    gen->add_option("--seed", seed)->required();
    gen->add_flag("--unbalanced", unbalanced);

    std::string out_path;
    unsigned threads = 0;
    int shift_degree = 2;
    auto* exp = app.add_subcommand("experiment", "run the residue pipeline on generated instances");
    exp->add_option("--bits", bits)->required();
    exp->add_option("--count", count)->required();
    exp->add_option("--seed", seed)->required();
    exp->add_flag("--unbalanced", unbalanced);
    exp->add_option("--out", out_path, "output file, - for stdout")->required();
    exp->add_option("--threads", threads, "0 = all cores");
    exp->add_option("--shift-degree", shift_degree)->check(CLI::Range(1, 4));

    unsigned bits_min = 20, bits_max = 60, step = 4;
    std::size_t trials = 10;
    auto* scan = app.add_subcommand("bound-scan", "bound margin of the balanced construction per size");
    scan->add_option("--bits-min", bits_min)->required();
    scan->add_option("--bits-max", bits_max)->required();
    scan->add_option("--step", step)->required()->check(CLI::PositiveNumber);
    scan->add_option("--trials", trials)->required();
    scan->add_option("--seed", seed);

    std::size_t dim = 4;
    auto* lll = app.add_subcommand("lll-check", "LLL invariants on random bases");
    lll->add_option("--dim", dim)->required()->check(CLI::Range(1, 64));
    lll->add_option("--seed", seed)->required();
    lll->add_option("--trials", trials)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 returns 0 for --help; every real parse error is a usage error
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*factor) {
            const mpz_class N = ntheory::parse_integer(n_text);
            if (N < 2) {
                std::cerr << "N must be >= 2\n";
                return kExitUsage;
            }
            if (method == "fermat" || method == "shifted") {
                return run_fermat_like(N, method, ntheory::parse_integer(x_text), cap,
                                       floor_roots ? fermat::RootSemantics::kFloor : fermat::RootSemantics::kReal);
            }
            return run_auto(N, method == "pipeline", cap);
        }

        harness::SemiprimeSpec spec;
        spec.bits = bits;
        spec.seed = seed;
        spec.balance = unbalanced ? harness::Balance::kUnbalanced : harness::Balance::kBalanced;

        if (*gen) {
            for (std::size_t i = 0; i < count; ++i) {
                spec.seed = seed + i;
                const auto s = harness::gen_semiprime(spec);
                std::cout << json{{"N", s.N.get_str()}, {"p", s.p.get_str()}, {"q", s.q.get_str()}}.dump() << '\n';
            }
            return kExitOk;
        }
        if (*exp) {
            harness::PipelineOptions opts;
            opts.balance = spec.balance;
            opts.reduction.shift_degree = shift_degree;
            std::ofstream file;
            std::ostream& os = *open_out(out_path, file);
            int failures = 0;
            for (const auto& rec : harness::experiment_run(spec, count, opts, threads)) {
                os << to_json(rec).dump() << '\n';
                failures += rec.success ? 0 : 1;
            }
            std::cerr << count - failures << "/" << count << " succeeded\n";
            return kExitOk;
        }
        if (*scan) {
            for (const auto& row : harness::bound_scan(bits_min, bits_max, step, trials, seed)) {
                std::cout << to_json(row).dump() << '\n';
            }
            return kExitOk;
        }
        if (*lll) {
            harness::SplitMix64 rng(seed);
            const mpz_class lim = mpz_class(1) << 40;
            int bad = 0;
            for (std::size_t t = 0; t < trials; ++t) {
                std::vector<lattice::Vector> rows(dim, lattice::Vector(dim));
                for (auto& r : rows) {
                    for (auto& v : r) {
                        v = rng.uniform(-lim, lim);
                    }
                }
                lattice::IntegerMatrix in(rows);
                if (lattice::gram_determinant(in) == 0) {
                    continue;
                }
                const auto chk = lattice::verify_reduction(in, lattice::lll_reduce(in));
                if (!chk.ok()) {
                    ++bad;
                    std::cout << json{{"trial", t}, {"violations", chk.violations}}.dump() << '\n';
                }
            }
            std::cout << json{{"dim", dim}, {"trials", trials}, {"violations", bad}}.dump() << '\n';
            return bad == 0 ? kExitOk : kExitExhausted;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
