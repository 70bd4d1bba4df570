#pragma once

//
// Randomized range finder with power iteration, Y = (AᵀA)^q·Aᵀ·G, and the
// two-stage randomized SVD built on top of it.
//

#include <vector>

#include "error.hpp"
#include "householder.hpp"
#include "matrix.hpp"
#include "random.hpp"
#include "svd.hpp"

namespace randutv {

struct RangeBasis {
    /// n×b with orthonormal columns approximately spanning the dominant right singular subspace.
    Matrix q;
    std::size_t power_steps = 0;
    std::size_t block_size = 0;
};

/// Orthonormal basis of col(Y): the first min(rows, cols) columns of the Householder Q of Y.
inline Matrix orthonormal_basis(ConstMatrixView y)
{
    const QrResult qr = qr_unpivoted(y);
    return form_q(qr.q, std::min(y.rows(), y.cols()));
}

//
// Y = (AᵀA)^q·Aᵀ·G. With reorthonormalize set, the running sample is replaced
// by an orthonormal basis of itself before each (A, Aᵀ) application pair;
// the span of the result is unchanged in exact arithmetic.
//
inline Matrix sample_row_space(ConstMatrixView a, ConstMatrixView g, std::size_t power_steps,
                               bool reorthonormalize)
{
    if (g.rows() != a.rows())
        throw DimensionError("sample_row_space: G has " + std::to_string(g.rows()) + " rows, A has " +
                             std::to_string(a.rows()));
    Matrix y = multiply(a, g, Op::Trans, Op::None);
    for (std::size_t step = 0; step < power_steps; ++step) {
        if (reorthonormalize)
            y = orthonormal_basis(y);
        const Matrix ay = multiply(a, y);
        y = multiply(a, ay, Op::Trans, Op::None);
    }
    return y;
}

inline RangeBasis range_finder(ConstMatrixView a, std::size_t b, std::size_t power_steps, RandomStream& stream,
                               bool reorthonormalize = true)
{
    if (b < 1 || b >= std::min(a.rows(), a.cols()))
        throw InputError("range_finder: need 1 <= b < min(m,n), got b = " + std::to_string(b) + " for " +
                         detail::shape_str(a.rows(), a.cols()));
    const Matrix g = gaussian_matrix(stream, a.rows(), b);
    const Matrix y = sample_row_space(a, g, power_steps, reorthonormalize);
    return {orthonormal_basis(y), power_steps, b};
}

struct RsvdResult {
    /// Rank-b factors: U m×b, σ (b), V n×b.
    SvdResult svd;
    /// ‖A − U·D·Vᵀ‖₂.
    double error_norm = 0.0;
    /// ‖A − A·Q·Qᵀ‖₂ of the range finder alone.
    double range_error_norm = 0.0;
};

/// Residual A − A·Q·Qᵀ.
inline Matrix projection_residual(ConstMatrixView a, ConstMatrixView q)
{
    const Matrix aq = multiply(a, q);
    Matrix r(a);
    gemm(-1.0, aq, Op::None, q, Op::Trans, 1.0, r);
    return r;
}

inline RsvdResult rsvd(ConstMatrixView a, std::size_t b, std::size_t power_steps, RandomStream& stream,
                       bool reorthonormalize = true)
{
    const RangeBasis basis = range_finder(a, b, power_steps, stream, reorthonormalize);
    const Matrix small = multiply(a, basis.q); // B = A·Q, m×b
    const TallSvd ts = tall_thin_svd(small);

    RsvdResult out;
    out.svd.u = ts.left_vectors(b);
    out.svd.sigma = ts.core.sigma;
    out.svd.v = multiply(basis.q, ts.core.v);

    Matrix resid(a);
    Matrix ud = out.svd.u;
    for (std::size_t j = 0; j < b; ++j)
        for (double& x : ud.col(j))
            x *= out.svd.sigma[j];
    gemm(-1.0, ud, Op::None, out.svd.v, Op::Trans, 1.0, resid);
    out.error_norm = spectral_norm(resid);
    out.range_error_norm = spectral_norm(projection_residual(a, basis.q));
    return out;
}

} // namespace randutv
