#pragma once

//
// Straightforward randUTV for m ≥ n: every step forms its orthogonal
// factors as explicit dense matrices and updates the whole trailing block
// with full matrix products. Much slower than rand_utv but consumes the
// random stream in the same order, so the two produce the same T.
//

#include "error.hpp"
#include "householder.hpp"
#include "matrix.hpp"
#include "random.hpp"
#include "svd.hpp"
#include "utv.hpp"

namespace randutv {

namespace detail {

struct DenseTriple {
    Matrix u, t, v;
};

inline Matrix explicit_q(ConstMatrixView b)
{
    const QrResult qr = qr_unpivoted(b);
    Matrix q = Matrix::identity(b.rows());
    apply_left_unblocked(qr.q, Op::None, q);
    return q;
}

// Full SVD A = U·[D; 0]·Vᵀ of an m×n block with m ≥ n, U m×m.
inline DenseTriple dense_full_svd(ConstMatrixView a)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    DenseTriple out;
    out.t = Matrix(m, n);
    if (m == n) {
        const SvdResult s = jacobi_svd(a);
        out.u = s.u;
        out.v = s.v;
        for (std::size_t j = 0; j < n; ++j)
            out.t(j, j) = s.sigma[j];
        return out;
    }
    const QrResult qr = qr_unpivoted(a);
    Matrix q = Matrix::identity(m);
    apply_left_unblocked(qr.q, Op::None, q);
    const SvdResult s = jacobi_svd(qr.r);
    Matrix inner = Matrix::identity(m);
    inner.block(0, 0, n, n).assign(s.u);
    out.u = multiply(q, inner);
    out.v = s.v;
    for (std::size_t j = 0; j < n; ++j)
        out.t(j, j) = s.sigma[j];
    return out;
}

inline DenseTriple dense_step(ConstMatrixView a, std::size_t b, std::size_t power_steps, RandomStream& stream,
                              bool reorthonormalize)
{
    const std::size_t n = a.cols();
    const Matrix g = gaussian_matrix(stream, a.rows(), b);
    Matrix y = multiply(a, g, Op::Trans, Op::None);
    for (std::size_t i = 0; i < power_steps; ++i) {
        if (reorthonormalize)
            y = Matrix(explicit_q(y).block(0, 0, y.rows(), y.cols()));
        y = multiply(a, multiply(a, y), Op::Trans, Op::None);
    }

    DenseTriple out;
    out.v = explicit_q(y);
    const Matrix av1 = multiply(a, out.v.block(0, 0, n, b));
    DenseTriple left = dense_full_svd(av1);
    out.u = std::move(left.u);

    out.t = Matrix(a.rows(), n);
    out.t.block(0, 0, a.rows(), b).assign(left.t);
    const Matrix av2 = multiply(a, out.v.block(0, b, n, n - b));
    out.t.block(0, b, a.rows(), n - b).assign(multiply(out.u, av2, Op::Trans, Op::None));

    const Matrix v1 = multiply(out.v.block(0, 0, n, b), left.v);
    out.v.block(0, 0, n, b).assign(v1);
    return out;
}

} // namespace detail

inline UtvFactorization rand_utv_reference(ConstMatrixView a, std::size_t b, std::size_t power_steps,
                                           RandomStream& stream, bool reorthonormalize = true)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m < n)
        throw UnsupportedShapeError("rand_utv_reference: needs m >= n, got " + detail::shape_str(m, n));
    if (n == 0 || b < 1)
        throw InputError("rand_utv_reference: empty input or b = 0");
    if (!all_finite(a))
        throw InputError("rand_utv_reference: non-finite input entries");

    UtvFactorization out;
    out.block_size = b;
    out.power_steps = power_steps;
    out.seed = stream.seed();
    out.t = Matrix(a);
    out.u = Matrix::identity(m);
    out.v = Matrix::identity(n);

    const std::size_t steps = (n + b - 1) / b;
    for (std::size_t i = 0; i < steps; ++i) {
        const std::size_t r0 = b * i;
        const Matrix x(out.t.block(r0, r0, m - r0, n - r0));
        const detail::DenseTriple s = n - r0 > b ? detail::dense_step(x, b, power_steps, stream, reorthonormalize)
                                                 : detail::dense_full_svd(x);
        out.u.block(0, r0, m, m - r0).assign(multiply(out.u.block(0, r0, m, m - r0), s.u));
        out.v.block(0, r0, n, n - r0).assign(multiply(out.v.block(0, r0, n, n - r0), s.v));
        out.t.block(r0, r0, m - r0, n - r0).assign(s.t);
        if (r0 > 0)
            out.t.block(0, r0, r0, n - r0).assign(multiply(out.t.block(0, r0, r0, n - r0), s.v));
        ++out.steps;
    }
    return out;
}

} // namespace randutv
