#pragma once

//
// One-sided (Hestenes) Jacobi SVD, used as the exact oracle throughout, plus
// the two-step SVD of tall-thin matrices (unpivoted QR, then SVD of R).
//
// For m ≥ n the input is first reduced by column-pivoted QR, A·P = Q·R, and
// the Jacobi sweeps run on Rᵀ, which has strongly graded columns and
// converges in few sweeps. With Rᵀ·J = W·Σ accumulated over row-cyclic
// sweeps, A = (Q·[J; 0])·Σ·(P·W)ᵀ.
//

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cpqr.hpp"
#include "error.hpp"
#include "householder.hpp"
#include "matrix.hpp"

namespace randutv {

struct SvdResult {
    /// m×r with orthonormal columns, r = min(m,n).
    Matrix u;
    /// Non-increasing, non-negative.
    std::vector<double> sigma;
    /// n×r with orthonormal columns.
    Matrix v;
};

struct JacobiOptions {
    bool vectors = true;
    std::size_t size_cap = 1000;
    std::size_t max_sweeps = 30;
};

namespace detail {

//
// Orthogonalizes the columns of g in place by plane rotations; if acc is
// non-empty the same rotations are applied to its columns. A pair is left
// alone when |gᵢᵀgⱼ| ≤ tol·‖gᵢ‖‖gⱼ‖. Returns the number of sweeps used.
//
inline std::size_t jacobi_sweeps(Matrix& g, Matrix& acc, std::size_t max_sweeps)
{
    const std::size_t m = g.rows();
    const std::size_t n = g.cols();
    const bool accumulate = !acc.empty();
    const double tol = std::sqrt(static_cast<double>(std::max<std::size_t>(m, 1))) *
                       std::numeric_limits<double>::epsilon();

    std::vector<double> sq(n);
    std::size_t sweep = 0;
    while (sweep < max_sweeps) {
        ++sweep;
        for (std::size_t j = 0; j < n; ++j) {
            const double nj = norm2(g.col(j));
            sq[j] = nj * nj;
        }
        std::size_t rotations = 0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = sq[p];
                const double beta = sq[q];
                if (alpha == 0.0 || beta == 0.0)
                    continue;
                double* gp = g.col(p).data();
                double* gq = g.col(q).data();
                double gamma = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    gamma += gp[i] * gq[i];
                flop_counter() += 2ull * m;
                if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta))
                    continue;
                ++rotations;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double x = gp[i];
                    const double y = gq[i];
                    gp[i] = c * x - s * y;
                    gq[i] = s * x + c * y;
                }
                flop_counter() += 6ull * m;
                if (accumulate) {
                    double* ap = acc.col(p).data();
                    double* aq = acc.col(q).data();
                    for (std::size_t i = 0; i < acc.rows(); ++i) {
                        const double x = ap[i];
                        const double y = aq[i];
                        ap[i] = c * x - s * y;
                        aq[i] = s * x + c * y;
                    }
                    flop_counter() += 6ull * acc.rows();
                }
                sq[p] = alpha - t * gamma;
                sq[q] = beta + t * gamma;
            }
        }
        if (rotations == 0)
            break;
    }
    return sweep;
}

//
// Replaces the columns of q flagged in `missing` with unit vectors orthogonal
// to every other column (two passes of Gram–Schmidt over candidate eᵢ).
//
inline void complete_orthonormal(Matrix& q, const std::vector<bool>& missing)
{
    const std::size_t m = q.rows();
    std::vector<bool> done(q.cols());
    for (std::size_t j = 0; j < q.cols(); ++j)
        done[j] = !missing[j];
    std::vector<double> cand(m);
    std::size_t next_e = 0;
    for (std::size_t j = 0; j < q.cols(); ++j) {
        if (done[j])
            continue;
        double best = -1.0;
        std::vector<double> best_vec;
        for (std::size_t e = next_e; e < next_e + m; ++e) {
            std::fill(cand.begin(), cand.end(), 0.0);
            cand[e % m] = 1.0;
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t c = 0; c < q.cols(); ++c) {
                    if (!done[c])
                        continue;
                    const auto qc = q.col(c);
                    double d = 0.0;
                    for (std::size_t i = 0; i < m; ++i)
                        d += qc[i] * cand[i];
                    for (std::size_t i = 0; i < m; ++i)
                        cand[i] -= d * qc[i];
                }
            const double nrm = norm2(cand);
            if (nrm > best) {
                best = nrm;
                best_vec = cand;
                next_e = e + 1;
            }
            if (nrm > 0.5)
                break;
        }
        for (std::size_t i = 0; i < m; ++i)
            q(i, j) = best_vec[i] / best;
        done[j] = true;
    }
}

// m ≥ n; U and V unsorted, signs not canonical.
inline SvdResult jacobi_tall(ConstMatrixView a, const JacobiOptions& opt)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const CpqrFactorization f = cpqr(a);

    Matrix g(n, n); // Rᵀ
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i <= j; ++i)
            g(j, i) = f.r(i, j);

    Matrix rot = opt.vectors ? Matrix::identity(n) : Matrix();
    jacobi_sweeps(g, rot, opt.max_sweeps);

    SvdResult out;
    out.sigma.resize(n);
    for (std::size_t j = 0; j < n; ++j)
        out.sigma[j] = norm2(g.col(j));
    if (!opt.vectors)
        return out;

    Matrix w(n, n);
    std::vector<bool> missing(n, false);
    for (std::size_t j = 0; j < n; ++j) {
        if (out.sigma[j] == 0.0) {
            missing[j] = true;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i)
            w(i, j) = g(i, j) / out.sigma[j];
    }
    if (std::find(missing.begin(), missing.end(), true) != missing.end())
        complete_orthonormal(w, missing);

    out.v = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.v(f.perm[i], j) = w(i, j);

    Matrix padded(m, n);
    padded.block(0, 0, n, n).assign(rot);
    apply_left_inplace(f.q, Op::None, padded);
    out.u = std::move(padded);
    return out;
}

inline void sort_and_canonicalize(SvdResult& s)
{
    const std::size_t r = s.sigma.size();
    std::vector<std::size_t> order(r);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return s.sigma[x] > s.sigma[y]; });

    std::vector<double> sigma(r);
    for (std::size_t j = 0; j < r; ++j)
        sigma[j] = s.sigma[order[j]];
    s.sigma = std::move(sigma);
    if (s.u.empty())
        return;

    Matrix u(s.u.rows(), r);
    Matrix v(s.v.rows(), r);
    for (std::size_t j = 0; j < r; ++j) {
        u.view().cols_range(j, 1).assign(s.u.view().cols_range(order[j], 1));
        v.view().cols_range(j, 1).assign(s.v.view().cols_range(order[j], 1));
        // first entry of largest magnitude in each column of U is made non-negative
        std::size_t imax = 0;
        for (std::size_t i = 1; i < u.rows(); ++i)
            if (std::abs(u(i, j)) > std::abs(u(imax, j)))
                imax = i;
        if (u.rows() && u(imax, j) < 0.0) {
            for (double& x : u.col(j))
                x = -x;
            for (double& x : v.col(j))
                x = -x;
        }
    }
    s.u = std::move(u);
    s.v = std::move(v);
}

} // namespace detail

/// Thin SVD A = U·diag(σ)·Vᵀ with U m×r, V n×r, r = min(m,n).
inline SvdResult jacobi_svd(ConstMatrixView a, const JacobiOptions& opt = {})
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (std::min(m, n) > opt.size_cap)
        throw SizeError("jacobi_svd: min dimension " + std::to_string(std::min(m, n)) + " exceeds cap " +
                        std::to_string(opt.size_cap));
    if (!all_finite(a))
        throw InputError("jacobi_svd: non-finite input entries");
    if (m == 0 || n == 0) {
        SvdResult empty;
        empty.u = Matrix(m, 0);
        empty.v = Matrix(n, 0);
        return empty;
    }

    SvdResult out;
    if (m >= n) {
        out = detail::jacobi_tall(a, opt);
    } else {
        out = detail::jacobi_tall(transpose(a), opt);
        std::swap(out.u, out.v);
    }
    detail::sort_and_canonicalize(out);
    return out;
}

inline std::vector<double> singular_values(ConstMatrixView a)
{
    JacobiOptions opt;
    opt.vectors = false;
    return jacobi_svd(a, opt).sigma;
}

/// σ₁(A), computed exactly through the Jacobi SVD.
inline double spectral_norm(ConstMatrixView a)
{
    if (a.empty())
        return 0.0;
    return singular_values(a).front();
}

/// B = Q·blockdiag(U_small, I)·[D; 0]·V_smallᵀ for tall-thin B.
struct TallSvd {
    HouseholderFactor q; // with WY cached
    SvdResult core;      // SVD of the b×b triangular factor

    /// First `cols` left singular vectors of B as a dense m×cols matrix.
    Matrix left_vectors(std::size_t cols) const
    {
        const std::size_t b = core.u.rows();
        Matrix padded(q.rows(), cols);
        padded.block(0, 0, b, cols).assign(core.u.block(0, 0, b, cols));
        apply_left_inplace(q, Op::None, padded);
        return padded;
    }
};

inline TallSvd tall_thin_svd(ConstMatrixView b, const JacobiOptions& opt = {})
{
    if (b.rows() < b.cols())
        throw UnsupportedShapeError("tall_thin_svd: needs m >= b, got " + detail::shape_str(b.rows(), b.cols()));
    QrResult qr = qr_unpivoted(b);
    TallSvd out;
    out.core = jacobi_svd(qr.r, opt);
    out.q = build_wy(std::move(qr.q));
    return out;
}

} // namespace randutv
