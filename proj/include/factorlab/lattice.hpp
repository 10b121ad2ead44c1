#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "factorlab/ntheory.hpp"
#include "factorlab/polybuild.hpp"

namespace factorlab {

class DependentRows : public Error {
public:
    using Error::Error;
};

class ReducibleInput : public Error {
public:
    using Error::Error;
};

class BoundsTooLarge : public Error {
public:
    using Error::Error;
};

namespace lattice {

using Vector = std::vector<mpz_class>;

/// Row basis of a lattice. Rectangular with at least one row.
class IntegerMatrix {
public:
    IntegerMatrix() = default;
    explicit IntegerMatrix(std::vector<Vector> rows);

    std::size_t row_count() const { return rows_.size(); }
    std::size_t col_count() const { return rows_.empty() ? 0 : rows_.front().size(); }

    const Vector& row(std::size_t i) const { return rows_[i]; }
    const std::vector<Vector>& rows() const { return rows_; }
    std::vector<Vector>& rows() { return rows_; }

    bool operator==(const IntegerMatrix&) const = default;

private:
    std::vector<Vector> rows_;
};

struct ReductionParams {
    mpq_class delta{3, 4};
    int shift_degree = 2;
};

/// Integral LLL (all Gram-Schmidt data kept as exact integers d_i, lambda_ij).
/// Output is size-reduced and satisfies the Lovasz condition for delta.
/// Throws DependentRows if the input rows are linearly dependent.
IntegerMatrix lll_reduce(IntegerMatrix basis, const ReductionParams& params = {});

/// Result of checking a reduced basis against its input with exact rational
/// Gram-Schmidt recomputed from scratch.
struct ReductionCheck {
    bool same_lattice = false;      // integer unimodular transform in -> out
    bool size_reduced = false;      // |mu_ij| <= 1/2
    bool lovasz = false;            // |b*_k|^2 >= (delta - mu^2) |b*_{k-1}|^2
    bool first_vector_bound = false;  // |b_1| <= 2^((n-1)/4) det^(1/n)
    std::vector<std::string> violations;

    bool ok() const { return same_lattice && size_reduced && lovasz && first_vector_bound; }
};

ReductionCheck verify_reduction(const IntegerMatrix& input, const IntegerMatrix& output,
                                const mpq_class& delta = mpq_class(3, 4));

/// Gram determinant det(B B^T), computed by exact rational elimination.
mpz_class gram_determinant(const IntegerMatrix& basis);

using RootPair = std::pair<mpz_class, mpz_class>;

enum class SolveStatus {
    kCertified,       // a row below the norm bound gave Res != 0: roots are complete
    kBestEffort,      // no certified row; union over all rows, possibly partial
    kLatticeFailure,  // every reduced row is a multiple of f
};

struct SmallRootResult {
    std::vector<RootPair> roots;  // sorted, each verified f(x, y) = 0 within bounds
    SolveStatus status = SolveStatus::kLatticeFailure;
    double margin_bits = 0.0;     // bound_margin(f, bounds) of the input as given
    std::size_t lattice_dim = 0;
    std::size_t rows_scanned = 0;
};

/// Small integer roots |x| <= X, |y| <= Y of an irreducible bilinear f.
///
/// The lattice is spanned by x^i y^j X^(k-i) Y^(k-j) q(xX, yY) for
/// 0 <= i, j <= k and n (xX)^i (yY)^j for the remaining monomials of the
/// (k+2) x (k+2) box, where q = f(0,0)^-1 f mod n and n = u (XY)^k with
/// u close to the height of f. A reduced row h whose scaled 1-norm is below n
/// vanishes at every root in range; roots come from Res_y(f, h). The first
/// such row with a nonzero resultant decides the answer. If there is none,
/// every reduced row is tried and the roots found are merged.
///
/// Every returned pair is exact. When the bound margin is small the result
/// may be empty or partial; status tells which case applied.
SmallRootResult coppersmith_bivariate(const polybuild::BilinearPoly& f, const polybuild::RootBounds& bounds,
                                      const ReductionParams& params = {});

/// All roots in the box, by one linear solve in y per x. Requires
/// (2X + 1)(2Y + 1) <= 2^28.
std::vector<RootPair> exhaustive_roots(const polybuild::BilinearPoly& f, const polybuild::RootBounds& bounds);

}  // namespace lattice
}  // namespace factorlab
