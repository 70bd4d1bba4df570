#pragma once

//
// Unpivoted Householder QR of tall-thin blocks and application of the
// resulting orthogonal factor in compact WY form, Q = I + W·Y.
//
// Sign convention: every reflector is chosen so the diagonal of R is
// non-negative. A column whose trailing part is already of the form
// (x₀ ≥ 0, 0, …, 0) gets τ = 0, i.e. the identity reflector.
//

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "error.hpp"
#include "matrix.hpp"

namespace randutv {

/// Product Q = H₀·H₁···H_{k−1} of Householder reflectors H_j = I − τ_j v_j v_jᵀ acting on ℝ^m.
struct HouseholderFactor {
    /// m×k; column j holds v_j with zeros above row j and v_j(j) = 1.
    Matrix vectors;
    std::vector<double> tau;
    /// Cached compact WY blocks (m×k and k×m), filled in by build_wy.
    std::optional<Matrix> w;
    std::optional<Matrix> y;

    std::size_t rows() const noexcept { return vectors.rows(); }
    std::size_t count() const noexcept { return tau.size(); }
    bool has_wy() const noexcept { return w.has_value() && y.has_value(); }
};

struct QrResult {
    HouseholderFactor q;
    /// min(m,b)×b upper triangular with non-negative diagonal.
    Matrix r;
};

namespace detail {

inline double norm2(std::span<const double> x)
{
    return frobenius_norm(ConstMatrixView(x.data(), x.size(), x.empty() ? 0 : 1, std::max<std::size_t>(x.size(), 1)));
}

//
// Overwrites x with the reflector vector v (v[0] = 1) such that
// (I − τ v vᵀ)·x_in = beta·e₀ with beta ≥ 0; returns τ.
//
inline double make_reflector(std::span<double> x, double& beta)
{
    const double alpha = x[0];
    const double xnorm = norm2(x.subspan(1));
    if (xnorm == 0.0) {
        x[0] = 1.0;
        if (alpha >= 0.0) {
            beta = alpha;
            return 0.0;
        }
        beta = -alpha;
        return 2.0;
    }
    const double norm = std::hypot(alpha, xnorm);
    // v₀ = alpha − norm, rewritten to avoid cancellation when alpha > 0
    const double v0 = alpha <= 0.0 ? alpha - norm : -(xnorm / (alpha + norm)) * xnorm;
    const double tau = 2.0 * v0 * v0 / (v0 * v0 + xnorm * xnorm);
    for (std::size_t i = 1; i < x.size(); ++i)
        x[i] /= v0;
    x[0] = 1.0;
    beta = norm;
    return tau;
}

// x <- (I − τ v vᵀ) x
inline void apply_reflector(std::span<const double> v, double tau, std::span<double> x)
{
    if (tau == 0.0)
        return;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += v[i] * x[i];
    s *= tau;
    for (std::size_t i = 0; i < v.size(); ++i)
        x[i] -= s * v[i];
}

} // namespace detail

/// B = Q·[R; 0]. Only min(m,b) reflectors are produced.
inline QrResult qr_unpivoted(ConstMatrixView b)
{
    if (b.rows() == 0 || b.cols() == 0)
        throw InputError("qr_unpivoted: empty input " + detail::shape_str(b.rows(), b.cols()));
    if (!all_finite(b))
        throw InputError("qr_unpivoted: non-finite input entries");

    const std::size_t m = b.rows();
    const std::size_t n = b.cols();
    const std::size_t k = std::min(m, n);

    Matrix work(b);
    QrResult out;
    out.q.vectors = Matrix(m, k);
    out.q.tau.resize(k);
    out.r = Matrix(k, n);

    for (std::size_t j = 0; j < k; ++j) {
        auto x = work.col(j).subspan(j);
        double beta = 0.0;
        const double tau = detail::make_reflector(x, beta);
        out.q.tau[j] = tau;
        for (std::size_t c = j + 1; c < n; ++c)
            detail::apply_reflector(x, tau, work.col(c).subspan(j));
        if (tau != 0.0)
            flop_counter() += 4ull * x.size() * (n - j - 1);
        std::copy(x.begin(), x.end(), out.q.vectors.col(j).begin() + static_cast<std::ptrdiff_t>(j));
        out.r(j, j) = beta;
        for (std::size_t c = j + 1; c < n; ++c)
            out.r(j, c) = work(j, c);
    }
    return out;
}

/// Fills in the compact WY blocks with the forward recurrence: Q = I − V·S·Vᵀ, W = −V·S, Y = Vᵀ.
inline HouseholderFactor build_wy(HouseholderFactor q)
{
    const std::size_t m = q.rows();
    const std::size_t k = q.count();
    Matrix s(k, k);
    std::vector<double> z(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double tau = q.tau[j];
        s(j, j) = tau;
        if (j == 0 || tau == 0.0)
            continue;
        const auto vj = q.vectors.col(j);
        for (std::size_t i = 0; i < j; ++i) {
            const auto vi = q.vectors.col(i);
            double acc = 0.0;
            for (std::size_t r = j; r < m; ++r)
                acc += vi[r] * vj[r];
            z[i] = acc;
        }
        for (std::size_t i = 0; i < j; ++i) {
            double acc = 0.0;
            for (std::size_t p = i; p < j; ++p)
                acc += s(i, p) * z[p];
            s(i, j) = -tau * acc;
        }
    }
    Matrix w(m, k);
    gemm(-1.0, q.vectors, Op::None, s, Op::None, 0.0, w);
    q.w = std::move(w);
    q.y = transpose(q.vectors);
    return q;
}

namespace detail {

inline const HouseholderFactor& with_wy(const HouseholderFactor& q, std::optional<HouseholderFactor>& scratch)
{
    if (q.has_wy())
        return q;
    scratch = build_wy(q);
    return *scratch;
}

} // namespace detail

/// C <- Q·C (op = None) or Qᵀ·C (op = Trans), in place.
inline void apply_left_inplace(const HouseholderFactor& q, Op op, MatrixView c)
{
    if (c.rows() != q.rows())
        throw DimensionError("apply_left: C has " + std::to_string(c.rows()) + " rows, Q acts on " +
                             std::to_string(q.rows()));
    if (q.count() == 0 || c.cols() == 0)
        return;
    std::optional<HouseholderFactor> scratch;
    const auto& f = detail::with_wy(q, scratch);
    Matrix tmp(q.count(), c.cols());
    if (op == Op::None) {
        gemm(1.0, *f.y, Op::None, c, Op::None, 0.0, tmp);
        gemm(1.0, *f.w, Op::None, tmp, Op::None, 1.0, c);
    } else {
        gemm(1.0, *f.w, Op::Trans, c, Op::None, 0.0, tmp);
        gemm(1.0, *f.y, Op::Trans, tmp, Op::None, 1.0, c);
    }
}

/// C <- C·Q (op = None) or C·Qᵀ (op = Trans), in place.
inline void apply_right_inplace(const HouseholderFactor& q, Op op, MatrixView c)
{
    if (c.cols() != q.rows())
        throw DimensionError("apply_right: C has " + std::to_string(c.cols()) + " columns, Q acts on " +
                             std::to_string(q.rows()));
    if (q.count() == 0 || c.rows() == 0)
        return;
    std::optional<HouseholderFactor> scratch;
    const auto& f = detail::with_wy(q, scratch);
    Matrix tmp(c.rows(), q.count());
    if (op == Op::None) {
        gemm(1.0, c, Op::None, *f.w, Op::None, 0.0, tmp);
        gemm(1.0, tmp, Op::None, *f.y, Op::None, 1.0, c);
    } else {
        gemm(1.0, c, Op::None, *f.y, Op::Trans, 0.0, tmp);
        gemm(1.0, tmp, Op::None, *f.w, Op::Trans, 1.0, c);
    }
}

inline Matrix apply_left(const HouseholderFactor& q, Op op, ConstMatrixView c)
{
    Matrix out(c);
    apply_left_inplace(q, op, out);
    return out;
}

inline Matrix apply_right(const HouseholderFactor& q, Op op, ConstMatrixView c)
{
    Matrix out(c);
    apply_right_inplace(q, op, out);
    return out;
}

/// First `cols` columns of Q as a dense m×cols matrix.
inline Matrix form_q(const HouseholderFactor& q, std::size_t cols)
{
    return apply_left(q, Op::None, Matrix::identity(q.rows(), cols));
}

inline Matrix form_q(const HouseholderFactor& q) { return form_q(q, q.rows()); }

//
// Reflector-by-reflector application without the WY blocks. O(m·n·k) with
// level-2 access; used where a dense non-blocked path is wanted.
//
inline void apply_left_unblocked(const HouseholderFactor& q, Op op, MatrixView c)
{
    if (c.rows() != q.rows())
        throw DimensionError("apply_left_unblocked: C has " + std::to_string(c.rows()) + " rows, Q acts on " +
                             std::to_string(q.rows()));
    const std::size_t k = q.count();
    for (std::size_t t = 0; t < k; ++t) {
        // Q·C applies H_{k−1} first; Qᵀ·C applies H₀ first.
        const std::size_t j = op == Op::None ? k - 1 - t : t;
        const auto v = q.vectors.col(j).subspan(j);
        for (std::size_t col = 0; col < c.cols(); ++col)
            detail::apply_reflector(v, q.tau[j], c.col(col).subspan(j));
    }
}

} // namespace randutv
