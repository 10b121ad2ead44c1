#include "factorlab/lattice.hpp"

#include <algorithm>
#include <cstdlib>
#include <utility>

#include "factorlab/polynomial.hpp"

namespace factorlab::lattice {

using polybuild::BilinearPoly;
using polybuild::RootBounds;

IntegerMatrix::IntegerMatrix(std::vector<Vector> rows) : rows_(std::move(rows))
{
    if (rows_.empty()) {
        throw Error("IntegerMatrix: at least one row required");
    }
    const std::size_t cols = rows_.front().size();
    for (const auto& r : rows_) {
        if (r.size() != cols) {
            throw Error("IntegerMatrix: ragged rows");
        }
    }
}

namespace {

mpz_class dot(const Vector& a, const Vector& b)
{
    mpz_class s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

// Integral LLL state: d[i] is the Gram determinant of the first i vectors,
// lambda[k][j] = d[j+1] * mu_kj, both exact integers.
class IntegralLll {
public:
    IntegralLll(std::vector<Vector>& b, const mpq_class& delta)
        : b_(b), n_(b.size()), d_(n_ + 1), lambda_(n_, Vector(n_)),
          delta_num_(delta.get_num()), delta_den_(delta.get_den())
    {
    }

    void run()
    {
        d_[0] = 1;
        d_[1] = dot(b_[0], b_[0]);
        if (d_[1] == 0) {
            throw DependentRows("lll_reduce: zero row");
        }
        std::size_t k = 1;
        std::size_t kmax = 0;
        while (k < n_) {
            if (k > kmax) {
                kmax = k;
                extend_gram_schmidt(k);
            }
            reduce(k, k - 1);
            if (lovasz_fails(k)) {
                swap(k, kmax);
                k = std::max<std::size_t>(1, k - 1);
                continue;
            }
            for (std::size_t l = k - 1; l-- > 0;) {
                reduce(k, l);
            }
            ++k;
        }
    }

private:
    void extend_gram_schmidt(std::size_t k)
    {
        for (std::size_t j = 0; j <= k; ++j) {
            mpz_class u = dot(b_[k], b_[j]);
            for (std::size_t i = 0; i < j; ++i) {
                u = d_[i + 1] * u - lambda_[k][i] * lambda_[j][i];
                mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), d_[i].get_mpz_t());
            }
            if (j < k) {
                lambda_[k][j] = std::move(u);
            } else {
                if (u == 0) {
                    throw DependentRows("lll_reduce: rows are linearly dependent");
                }
                d_[k + 1] = std::move(u);
            }
        }
    }

    void reduce(std::size_t k, std::size_t l)
    {
        mpz_class& lam = lambda_[k][l];
        const mpz_class& dl = d_[l + 1];
        if (2 * abs(lam) <= dl) {
            return;
        }
        const mpz_class q = ntheory::round_div(lam, dl);
        for (std::size_t c = 0; c < b_[k].size(); ++c) {
            b_[k][c] -= q * b_[l][c];
        }
        lam -= q * dl;
        for (std::size_t i = 0; i < l; ++i) {
            lambda_[k][i] -= q * lambda_[l][i];
        }
    }

    bool lovasz_fails(std::size_t k) const
    {
        const mpz_class& lam = lambda_[k][k - 1];
        return delta_den_ * d_[k + 1] * d_[k - 1] < delta_num_ * d_[k] * d_[k] - delta_den_ * lam * lam;
    }

    void swap(std::size_t k, std::size_t kmax)
    {
        std::swap(b_[k], b_[k - 1]);
        for (std::size_t j = 0; j + 1 < k; ++j) {
            std::swap(lambda_[k][j], lambda_[k - 1][j]);
        }
        const mpz_class lam = lambda_[k][k - 1];
        mpz_class bnew = d_[k - 1] * d_[k + 1] + lam * lam;
        mpz_divexact(bnew.get_mpz_t(), bnew.get_mpz_t(), d_[k].get_mpz_t());
        for (std::size_t i = k + 1; i <= kmax; ++i) {
            const mpz_class t = lambda_[i][k];
            mpz_class lik = d_[k + 1] * lambda_[i][k - 1] - lam * t;
            mpz_divexact(lik.get_mpz_t(), lik.get_mpz_t(), d_[k].get_mpz_t());
            mpz_class lik1 = bnew * t + lam * lik;
            mpz_divexact(lik1.get_mpz_t(), lik1.get_mpz_t(), d_[k + 1].get_mpz_t());
            lambda_[i][k] = std::move(lik);
            lambda_[i][k - 1] = std::move(lik1);
        }
        d_[k] = std::move(bnew);
    }

    std::vector<Vector>& b_;
    std::size_t n_;
    Vector d_;
    std::vector<Vector> lambda_;
    mpz_class delta_num_;
    mpz_class delta_den_;
};

}  // namespace

IntegerMatrix lll_reduce(IntegerMatrix basis, const ReductionParams& params)
{
    if (params.delta <= mpq_class(1, 4) || params.delta >= 1) {
        throw Error("lll_reduce: delta must lie in (1/4, 1)");
    }
    IntegralLll(basis.rows(), params.delta).run();
    return basis;
}

// ---------------------------------------------------------------------------
// Verification with exact rational Gram-Schmidt, independent of the integral
// recurrences above.

namespace {

using QMatrix = std::vector<std::vector<mpq_class>>;

struct GramSchmidt {
    QMatrix mu;                   // mu[i][j], j < i
    std::vector<mpq_class> norm;  // |b*_i|^2
};

GramSchmidt rational_gram_schmidt(const IntegerMatrix& m)
{
    const std::size_t n = m.row_count();
    const std::size_t cols = m.col_count();
    QMatrix star(n, std::vector<mpq_class>(cols));
    GramSchmidt gs{QMatrix(n, std::vector<mpq_class>(n)), std::vector<mpq_class>(n)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols; ++c) {
            star[i][c] = m.row(i)[c];
        }
        for (std::size_t j = 0; j < i; ++j) {
            mpq_class num = 0;
            for (std::size_t c = 0; c < cols; ++c) {
                num += mpq_class(m.row(i)[c]) * star[j][c];
            }
            gs.mu[i][j] = num / gs.norm[j];
            for (std::size_t c = 0; c < cols; ++c) {
                star[i][c] -= gs.mu[i][j] * star[j][c];
            }
        }
        mpq_class nn = 0;
        for (std::size_t c = 0; c < cols; ++c) {
            nn += star[i][c] * star[i][c];
        }
        if (nn == 0) {
            throw DependentRows("verify_reduction: dependent rows");
        }
        gs.norm[i] = nn;
    }
    return gs;
}

// Solves a x = rhs (a square, nonsingular) by Gauss-Jordan over Q.
std::vector<mpq_class> solve(QMatrix a, std::vector<mpq_class> rhs)
{
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) {
            ++piv;
        }
        if (piv == n) {
            throw DependentRows("solve: singular system");
        }
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) {
                continue;
            }
            const mpq_class f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) {
                a[r][c] -= f * a[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        rhs[r] /= a[r][r];
    }
    return rhs;
}

mpq_class determinant(QMatrix a)
{
    const std::size_t n = a.size();
    mpq_class det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) {
            ++piv;
        }
        if (piv == n) {
            return 0;
        }
        if (piv != col) {
            std::swap(a[piv], a[col]);
            det = -det;
        }
        det *= a[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (a[r][col] == 0) {
                continue;
            }
            const mpq_class f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    return det;
}

QMatrix gram(const IntegerMatrix& m)
{
    const std::size_t n = m.row_count();
    QMatrix g(n, std::vector<mpq_class>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            g[i][j] = dot(m.row(i), m.row(j));
        }
    }
    return g;
}

}  // namespace

mpz_class gram_determinant(const IntegerMatrix& basis)
{
    const mpq_class det = determinant(gram(basis));
    return det.get_num();
}

ReductionCheck verify_reduction(const IntegerMatrix& input, const IntegerMatrix& output, const mpq_class& delta)
{
    ReductionCheck check;
    const std::size_t n = input.row_count();
    if (output.row_count() != n || output.col_count() != input.col_count()) {
        check.violations.emplace_back("shape mismatch");
        return check;
    }

    // Coordinates of each output row in the input basis: c = (out_i . in_j) G^-1.
    const QMatrix g_in = gram(input);
    QMatrix transform(n, std::vector<mpq_class>(n));
    check.same_lattice = true;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<mpq_class> rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            rhs[j] = dot(output.row(i), input.row(j));
        }
        // G is symmetric, so solving G c = rhs gives the row coordinates.
        transform[i] = solve(g_in, rhs);
        for (std::size_t c = 0; c < input.col_count(); ++c) {
            mpq_class v = 0;
            for (std::size_t j = 0; j < n; ++j) {
                v += transform[i][j] * input.row(j)[c];
            }
            if (v != output.row(i)[c]) {
                check.same_lattice = false;
            }
        }
        for (const auto& t : transform[i]) {
            if (t.get_den() != 1) {
                check.same_lattice = false;
            }
        }
    }
    if (check.same_lattice && abs(determinant(transform)) != 1) {
        check.same_lattice = false;
    }
    if (!check.same_lattice) {
        check.violations.emplace_back("output is not a unimodular image of the input");
    }

    const GramSchmidt gs = rational_gram_schmidt(output);
    check.size_reduced = true;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (abs(gs.mu[i][j]) > mpq_class(1, 2)) {
                check.size_reduced = false;
                check.violations.emplace_back("mu[" + std::to_string(i) + "][" + std::to_string(j) + "] exceeds 1/2");
            }
        }
    }
    check.lovasz = true;
    for (std::size_t k = 1; k < n; ++k) {
        const mpq_class& mu = gs.mu[k][k - 1];
        if (gs.norm[k] < (delta - mu * mu) * gs.norm[k - 1]) {
            check.lovasz = false;
            check.violations.emplace_back("Lovasz condition fails at k=" + std::to_string(k));
        }
    }

    // |b1| <= 2^((n-1)/4) det^(1/n)  <=>  |b1|^(2n) <= 2^(n(n-1)/2) det(G).
    const mpz_class b1 = dot(output.row(0), output.row(0));
    mpz_class lhs;
    mpz_pow_ui(lhs.get_mpz_t(), b1.get_mpz_t(), n);
    mpz_class rhs = gram_determinant(output);
    rhs <<= n * (n - 1) / 2;
    check.first_vector_bound = lhs <= rhs;
    if (!check.first_vector_bound) {
        check.violations.emplace_back("first vector exceeds the LLL length bound");
    }
    return check;
}

// ---------------------------------------------------------------------------
// Small roots

namespace {

poly::BiPoly to_bipoly(const BilinearPoly& f)
{
    poly::BiPoly p(2, 2);
    p.coeff(0, 0) = f.c0;
    p.coeff(1, 0) = f.c2;
    p.coeff(0, 1) = f.c1;
    p.coeff(1, 1) = f.c3;
    return p;
}

// f(x + sx, y + sy).
BilinearPoly translate(const BilinearPoly& f, long sx, long sy)
{
    BilinearPoly g;
    g.c3 = f.c3;
    g.c2 = f.c2 + f.c3 * sy;
    g.c1 = f.c1 + f.c3 * sx;
    g.c0 = f(sx, sy);
    return g;
}

mpz_class power(const mpz_class& b, unsigned long e)
{
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
}

// Root y of f(x, y) = 0 for fixed x, if it is an integer.
std::optional<mpz_class> solve_for_y(const BilinearPoly& f, const mpz_class& x)
{
    const mpz_class a = f.c3 * x + f.c1;
    const mpz_class b = f.c2 * x + f.c0;
    if (a == 0 || mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t()) == 0) {
        return std::nullopt;
    }
    return mpz_class(-b / a);
}

}  // namespace

SmallRootResult coppersmith_bivariate(const BilinearPoly& f, const RootBounds& bounds, const ReductionParams& params)
{
    if (f.is_zero() || polybuild::is_reducible(f)) {
        throw ReducibleInput("coppersmith_bivariate: f splits into linear factors");
    }
    if (params.shift_degree < 1) {
        throw Error("coppersmith_bivariate: shift degree must be >= 1");
    }
    SmallRootResult result;
    const mpz_class h0 = polybuild::poly_height(f, bounds);
    result.margin_bits = h0 >= 2 ? polybuild::bound_margin(f, bounds) : 0.0;

    // A common factor of the coefficients inflates the height without making
    // the root any easier to find; work with the primitive part.
    BilinearPoly g = f;
    const mpz_class cont = polybuild::content(f);
    for (mpz_class* c : {&g.c3, &g.c2, &g.c1, &g.c0}) {
        mpz_divexact(c->get_mpz_t(), c->get_mpz_t(), cont.get_mpz_t());
    }

    // The construction needs a nonzero constant term; move the origin if not.
    long sx = 0;
    long sy = 0;
    for (long r = 1; g(sx, sy) == 0; ++r) {
        sx = r / 2;
        sy = (r + 1) / 2;
    }
    const BilinearPoly t = translate(g, sx, sy);
    const mpz_class a00 = t.c0;

    // Bounds for the translated roots, adjusted so that gcd(a00, XY) = 1.
    mpz_class X = bounds.X + std::labs(sx);
    mpz_class Y = bounds.Y + std::labs(sy);
    while (gcd(X, a00) != 1) {
        ++X;
    }
    while (gcd(Y, a00) != 1) {
        ++Y;
    }

    const auto k = static_cast<unsigned long>(params.shift_degree);
    const std::size_t side = k + 2;
    const std::size_t dim = side * side;
    result.lattice_dim = dim;

    const mpz_class W = polybuild::poly_height(t, RootBounds(X, Y));
    const mpz_class abs_a00 = abs(a00);
    const mpz_class u = W + ntheory::mod(1 - W, abs_a00);  // u = 1 mod |a00|
    const mpz_class n = u * power(X * Y, k);
    const mpz_class inv = ntheory::modinv(a00, n);

    // q = a00^-1 t mod n, coefficients indexed [i][j] for x^i y^j.
    mpz_class q[2][2];
    q[0][0] = 1;
    q[1][0] = ntheory::mod(t.c2 * inv, n);
    q[0][1] = ntheory::mod(t.c1 * inv, n);
    q[1][1] = ntheory::mod(t.c3 * inv, n);

    std::vector<mpz_class> xpow(side + 1), ypow(side + 1);
    for (std::size_t e = 0; e <= side; ++e) {
        xpow[e] = power(X, e);
        ypow[e] = power(Y, e);
    }
    auto column = [side](std::size_t i, std::size_t j) { return i * side + j; };

    std::vector<Vector> rows;
    rows.reserve(dim);
    for (std::size_t i = 0; i < side; ++i) {
        for (std::size_t j = 0; j < side; ++j) {
            Vector row(dim);
            if (i <= k && j <= k) {
                const mpz_class scale = xpow[k - i] * ypow[k - j];
                for (std::size_t a = 0; a < 2; ++a) {
                    for (std::size_t b = 0; b < 2; ++b) {
                        row[column(i + a, j + b)] = scale * q[a][b] * xpow[i + a] * ypow[j + b];
                    }
                }
            } else {
                row[column(i, j)] = n * xpow[i] * ypow[j];
            }
            rows.push_back(std::move(row));
        }
    }

    const IntegerMatrix reduced = lll_reduce(IntegerMatrix(std::move(rows)), params);

    const poly::BiPoly tp = to_bipoly(t);
    auto row_poly = [&](const Vector& v) {
        poly::BiPoly h(side, side);
        for (std::size_t i = 0; i < side; ++i) {
            for (std::size_t j = 0; j < side; ++j) {
                const mpz_class& c = v[column(i, j)];
                mpz_divexact(h.coeff(i, j).get_mpz_t(), c.get_mpz_t(), mpz_class(xpow[i] * ypow[j]).get_mpz_t());
            }
        }
        return h;
    };
    // Roots of f shared with h, via the integer roots of Res_y(t, h). False
    // when the resultant vanishes identically (h is a multiple of t).
    auto harvest = [&](const poly::BiPoly& h) {
        const poly::UPoly res = poly::resultant_y(tp, h);
        if (res.empty()) {
            return false;
        }
        for (const mpz_class& x : poly::integer_roots(res, -X, X)) {
            const auto y = solve_for_y(t, x);
            if (!y) {
                continue;
            }
            mpz_class rx = x + sx;
            mpz_class ry = *y + sy;
            if (abs(rx) <= bounds.X && abs(ry) <= bounds.Y && f(rx, ry) == 0) {
                result.roots.emplace_back(std::move(rx), std::move(ry));
            }
        }
        return true;
    };
    auto finish = [&](SolveStatus status) {
        std::sort(result.roots.begin(), result.roots.end());
        result.roots.erase(std::unique(result.roots.begin(), result.roots.end()), result.roots.end());
        result.status = status;
        return result;
    };

    // First pass: a row with |h(xX, yY)|_1 < n satisfies |h(x, y)| < n on the
    // box, and n | h(x, y) at every root, so h vanishes at all of them.
    std::vector<bool> tried(reduced.row_count(), false);
    for (std::size_t r = 0; r < reduced.row_count(); ++r) {
        const Vector& v = reduced.row(r);
        mpz_class norm1 = 0;
        for (const auto& c : v) {
            norm1 += abs(c);
        }
        if (norm1 >= n) {
            continue;
        }
        ++result.rows_scanned;
        tried[r] = true;
        const poly::BiPoly h = row_poly(v);
        if (!h.is_zero() && harvest(h)) {
            return finish(SolveStatus::kCertified);
        }
    }

    // Second pass: no certified row. Collect whatever every remaining row
    // yields; sound, but roots can be missed.
    bool any = false;
    for (std::size_t r = 0; r < reduced.row_count(); ++r) {
        if (tried[r]) {
            continue;
        }
        ++result.rows_scanned;
        const poly::BiPoly h = row_poly(reduced.row(r));
        if (!h.is_zero() && harvest(h)) {
            any = true;
        }
    }
    return finish(any ? SolveStatus::kBestEffort : SolveStatus::kLatticeFailure);
}

std::vector<RootPair> exhaustive_roots(const BilinearPoly& f, const RootBounds& bounds)
{
    const mpz_class cells = (2 * bounds.X + 1) * (2 * bounds.Y + 1);
    if (cells > (mpz_class(1) << 28)) {
        throw BoundsTooLarge("exhaustive_roots: search box exceeds 2^28 cells");
    }
    std::vector<RootPair> roots;
    for (mpz_class x = -bounds.X; x <= bounds.X; ++x) {
        const mpz_class a = f.c3 * x + f.c1;
        const mpz_class b = f.c2 * x + f.c0;
        if (a == 0) {
            if (b == 0) {
                for (mpz_class y = -bounds.Y; y <= bounds.Y; ++y) {
                    roots.emplace_back(x, y);
                }
            }
            continue;
        }
        if (mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t()) != 0) {
            mpz_class y = -b / a;
            if (abs(y) <= bounds.Y) {
                roots.emplace_back(x, std::move(y));
            }
        }
    }
    return roots;
}

}  // namespace factorlab::lattice
