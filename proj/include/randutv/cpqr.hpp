#pragma once

//
// Householder QR with column pivoting, A·P = Q·R.
//
// Pivot rule: at step j take the remaining column with the largest trailing
// norm, lowest index on ties. Trailing norms are downdated after each step
// and recomputed exactly once the downdated square drops below 1e-8 of the
// value at its last exact computation.
//

#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "error.hpp"
#include "householder.hpp"
#include "matrix.hpp"

namespace randutv {

struct CpqrFactorization {
    /// min(m,n) reflectors acting on ℝ^m.
    HouseholderFactor q;
    /// m×n upper triangular, |R(0,0)| ≥ |R(1,1)| ≥ …
    Matrix r;
    /// Column j of A·P is column perm[j] of A.
    std::vector<std::size_t> perm;
};

inline CpqrFactorization cpqr(ConstMatrixView a)
{
    if (!all_finite(a))
        throw InputError("cpqr: non-finite input entries");

    constexpr double recompute_threshold = 1e-8;

    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const std::size_t k = std::min(m, n);

    Matrix work(a);
    CpqrFactorization out;
    out.perm.resize(n);
    std::iota(out.perm.begin(), out.perm.end(), std::size_t{0});
    out.q.vectors = Matrix(m, k);
    out.q.tau.assign(k, 0.0);

    std::vector<double> norms(n);
    std::vector<double> exact(n);
    for (std::size_t c = 0; c < n; ++c)
        norms[c] = exact[c] = detail::norm2(work.col(c));

    for (std::size_t j = 0; j < k; ++j) {
        std::size_t piv = j;
        for (std::size_t c = j + 1; c < n; ++c)
            if (norms[c] > norms[piv])
                piv = c;
        if (piv != j) {
            std::swap_ranges(work.col(j).begin(), work.col(j).end(), work.col(piv).begin());
            std::swap(norms[j], norms[piv]);
            std::swap(exact[j], exact[piv]);
            std::swap(out.perm[j], out.perm[piv]);
        }

        auto x = work.col(j).subspan(j);
        double beta = 0.0;
        const double tau = detail::make_reflector(x, beta);
        out.q.tau[j] = tau;
        for (std::size_t c = j + 1; c < n; ++c)
            detail::apply_reflector(x, tau, work.col(c).subspan(j));
        if (tau != 0.0)
            flop_counter() += 4ull * x.size() * (n - j - 1);
        std::copy(x.begin(), x.end(), out.q.vectors.col(j).begin() + static_cast<std::ptrdiff_t>(j));
        x[0] = beta;
        std::fill(x.begin() + 1, x.end(), 0.0);

        for (std::size_t c = j + 1; c < n; ++c) {
            if (norms[c] == 0.0)
                continue;
            const double ratio = std::abs(work(j, c)) / norms[c];
            const double factor = std::max(0.0, (1.0 - ratio) * (1.0 + ratio));
            const double downdated_sq = norms[c] * norms[c] * factor;
            if (downdated_sq < recompute_threshold * exact[c] * exact[c]) {
                norms[c] = exact[c] = detail::norm2(work.col(c).subspan(j + 1));
            } else {
                norms[c] *= std::sqrt(factor);
            }
        }
    }

    out.r = Matrix(m, n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i < std::min(c + 1, m); ++i)
            out.r(i, c) = work(i, c);
    return out;
}

/// Dense permutation application: returns M·Pᵀ, i.e. column j of M goes to column perm[j].
inline Matrix unpermute_columns(ConstMatrixView m, const std::vector<std::size_t>& perm)
{
    Matrix out(m.rows(), m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j)
        out.view().cols_range(perm[j], 1).assign(m.cols_range(j, 1));
    return out;
}

/// Rank-k approximant Q(:,0:k)·R(0:k,:)·Pᵀ.
inline Matrix cpqr_rank_k_approx(const CpqrFactorization& f, std::size_t k)
{
    const std::size_t m = f.r.rows();
    const std::size_t n = f.r.cols();
    if (k < 1 || k > std::min(m, n))
        throw InputError("cpqr_rank_k_approx: k = " + std::to_string(k) + " outside [1, " +
                         std::to_string(std::min(m, n)) + "]");
    Matrix top(m, n);
    top.block(0, 0, k, n).assign(f.r.block(0, 0, k, n));
    apply_left_inplace(f.q, Op::None, top);
    return unpermute_columns(top, f.perm);
}

} // namespace randutv
