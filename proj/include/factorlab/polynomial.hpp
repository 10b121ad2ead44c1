#pragma once

#include <cstddef>
#include <vector>

#include <gmpxx.h>

namespace factorlab::poly {

/// Dense univariate polynomial over Z, coefficients from degree 0 upward.
/// Normalized form has no trailing zeros; the zero polynomial is empty.
using UPoly = std::vector<mpz_class>;

void trim(UPoly& a);
int degree(const UPoly& a);  // -1 for zero
mpz_class evaluate(const UPoly& a, const mpz_class& x);
UPoly derivative(const UPoly& a);
UPoly add(const UPoly& a, const UPoly& b);
UPoly sub(const UPoly& a, const UPoly& b);
UPoly mul(const UPoly& a, const UPoly& b);

/// a / b where b divides a exactly in Z[x]. Throws if the division is inexact.
UPoly exact_div(const UPoly& a, const UPoly& b);

/// Dense bivariate polynomial, coeff(i, j) is the coefficient of x^i y^j.
class BiPoly {
public:
    BiPoly() = default;
    BiPoly(std::size_t x_terms, std::size_t y_terms);

    std::size_t x_terms() const { return x_terms_; }
    std::size_t y_terms() const { return y_terms_; }

    mpz_class& coeff(std::size_t i, std::size_t j) { return c_[i * y_terms_ + j]; }
    const mpz_class& coeff(std::size_t i, std::size_t j) const { return c_[i * y_terms_ + j]; }

    bool is_zero() const;
    int degree_y() const;  // -1 for zero
    /// Coefficient of y^j as a polynomial in x.
    UPoly y_coefficient(std::size_t j) const;
    mpz_class operator()(const mpz_class& x, const mpz_class& y) const;

private:
    std::size_t x_terms_ = 0;
    std::size_t y_terms_ = 0;
    std::vector<mpz_class> c_;
};

/// Res_y(f, h) as a polynomial in x, from the Sylvester matrix by
/// fraction-free (Bareiss) elimination over Z[x].
UPoly resultant_y(const BiPoly& f, const BiPoly& h);

/// Determinant of a square matrix over Z[x] by Bareiss elimination.
UPoly bareiss_determinant(std::vector<std::vector<UPoly>> m);

/// All integer r in [lo, hi] with a(r) = 0, for nonzero a. Bisects [lo, hi],
/// dropping pieces where the Sturm chain of the square-free part shows no root.
std::vector<mpz_class> integer_roots(const UPoly& a, const mpz_class& lo, const mpz_class& hi);

}  // namespace factorlab::poly
