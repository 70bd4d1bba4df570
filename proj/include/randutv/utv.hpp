#pragma once

//
// Blocked randomized UTV factorization A = U·T·Vᵀ.
//
// Step i works on the trailing block X = T(r₀:, r₀:), r₀ = b·i:
//
//   1. Y = (XᵀX)^q·Xᵀ·G with G Gaussian, (m − r₀)×(b + p).
//      With p > 0, Y is replaced by its b dominant left singular vectors.
//   2. 𝕍 from unpivoted QR of Y; T(:, r₀:) ← T(:, r₀:)·𝕍, V(:, r₀:) ← V(:, r₀:)·𝕍.
//   3. 𝕌, R from unpivoted QR of the panel T(r₀:, r₀:r₀+b);
//      T(r₀:, r₀+b:) ← 𝕌ᵀ·T(r₀:, r₀+b:), U(:, r₀:) ← U(:, r₀:)·𝕌, panel ← [R; 0].
//   4. R = U_s·D·V_sᵀ; the diagonal block becomes D and U_s, V_s are folded into
//      the neighbouring blocks of T and into U, V.
//
// Once the trailing block has no rows or no columns beyond the current
// block, it is diagonalized by a full SVD (economical when non-square).
//

#include <cmath>
#include <cstdint>
#include <optional>

#include "error.hpp"
#include "householder.hpp"
#include "matrix.hpp"
#include "random.hpp"
#include "range_finder.hpp"
#include "svd.hpp"

namespace randutv {

struct UtvOptions {
    std::size_t block_size = 32;
    std::size_t power_steps = 2;
    std::size_t oversampling = 0;
    /// Accumulate U and V. When false only T is produced.
    bool build_orthonormal = true;
    /// Orthonormalize the running sample between power-iteration pairs.
    bool reorthonormalize = true;
    /// Halt after a step once its last diagonal entry is ≤ stop_tolerance·T(0,0). 0 disables.
    double stop_tolerance = 0.0;
};

struct UtvFactorization {
    Matrix u; // m×m (empty if not built)
    Matrix t; // m×n upper triangular
    Matrix v; // n×n (empty if not built)
    std::size_t block_size = 0;
    std::size_t power_steps = 0;
    std::size_t oversampling = 0;
    std::uint64_t seed = 0;
    std::size_t steps = 0;
    bool stopped_early = false;
};

/// One step of the construction applied to a whole matrix.
struct StepResult {
    Matrix u;
    Matrix t;
    Matrix v;
    std::size_t block_size = 0;

    ConstMatrixView t11() const { return t.block(0, 0, block_size, block_size); }
    ConstMatrixView t12() const { return t.block(0, block_size, block_size, t.cols() - block_size); }
    ConstMatrixView t21() const { return t.block(block_size, 0, t.rows() - block_size, block_size); }
    ConstMatrixView t22() const
    {
        return t.block(block_size, block_size, t.rows() - block_size, t.cols() - block_size);
    }
};

namespace detail {

// C <- C·S for a small dense S.
inline void right_multiply_inplace(MatrixView c, ConstMatrixView s)
{
    if (c.empty())
        return;
    const Matrix copy(c);
    gemm(1.0, copy, Op::None, s, Op::None, 0.0, c);
}

// C <- Sᵀ·C for a small dense S.
inline void left_multiply_transposed_inplace(ConstMatrixView s, MatrixView c)
{
    if (c.empty())
        return;
    const Matrix copy(c);
    gemm(1.0, s, Op::Trans, copy, Op::None, 0.0, c);
}

/// First `cols` left singular vectors of Y (any shape).
inline Matrix dominant_left_singular_vectors(ConstMatrixView y, std::size_t cols)
{
    if (y.rows() >= y.cols())
        return tall_thin_svd(y).left_vectors(cols);
    const SvdResult s = jacobi_svd(y);
    return Matrix(s.u.block(0, 0, s.u.rows(), cols));
}

inline void utv_step(Matrix& t, Matrix* u, Matrix* v, std::size_t r0, std::size_t b, const UtvOptions& opt,
                     RandomStream& stream)
{
    const std::size_t m = t.rows();
    const std::size_t n = t.cols();
    const std::size_t mr = m - r0;
    const std::size_t nr = n - r0;

    Matrix y;
    {
        const Matrix g = gaussian_matrix(stream, mr, b + opt.oversampling);
        y = sample_row_space(t.block(r0, r0, mr, nr), g, opt.power_steps, opt.reorthonormalize);
        if (opt.oversampling > 0)
            y = dominant_left_singular_vectors(y, b);
    }

    const HouseholderFactor qv = build_wy(qr_unpivoted(y).q);
    apply_right_inplace(qv, Op::None, t.block(0, r0, m, nr));
    if (v)
        apply_right_inplace(qv, Op::None, v->block(0, r0, n, nr));

    QrResult panel = qr_unpivoted(t.block(r0, r0, mr, b));
    const HouseholderFactor qu = build_wy(std::move(panel.q));
    if (u)
        apply_right_inplace(qu, Op::None, u->block(0, r0, m, mr));
    apply_left_inplace(qu, Op::Trans, t.block(r0, r0 + b, mr, nr - b));
    t.block(r0, r0, mr, b).fill(0.0);

    const SvdResult small = jacobi_svd(panel.r);
    for (std::size_t j = 0; j < b; ++j)
        t(r0 + j, r0 + j) = small.sigma[j];
    left_multiply_transposed_inplace(small.u, t.block(r0, r0 + b, b, nr - b));
    if (u)
        right_multiply_inplace(u->block(0, r0, m, b), small.u);
    right_multiply_inplace(t.block(0, r0, r0, b), small.v);
    if (v)
        right_multiply_inplace(v->block(0, r0, n, b), small.v);
}

inline void utv_final(Matrix& t, Matrix* u, Matrix* v, std::size_t r0)
{
    const std::size_t m = t.rows();
    const std::size_t n = t.cols();
    const std::size_t mr = m - r0;
    const std::size_t nr = n - r0;
    const MatrixView x = t.block(r0, r0, mr, nr);

    if (mr == nr) {
        const SvdResult s = jacobi_svd(x);
        if (u)
            right_multiply_inplace(u->block(0, r0, m, mr), s.u);
        if (v)
            right_multiply_inplace(v->block(0, r0, n, nr), s.v);
        right_multiply_inplace(t.block(0, r0, r0, nr), s.v);
        x.fill(0.0);
        for (std::size_t j = 0; j < nr; ++j)
            x(j, j) = s.sigma[j];
    } else if (mr > nr) {
        const TallSvd s = tall_thin_svd(x);
        if (u) {
            apply_right_inplace(s.q, Op::None, u->block(0, r0, m, mr));
            right_multiply_inplace(u->block(0, r0, m, nr), s.core.u);
        }
        if (v)
            right_multiply_inplace(v->block(0, r0, n, nr), s.core.v);
        right_multiply_inplace(t.block(0, r0, r0, nr), s.core.v);
        x.fill(0.0);
        for (std::size_t j = 0; j < nr; ++j)
            x(j, j) = s.core.sigma[j];
    } else {
        // fat: QR of the rows, X = [Rᵀ 0]·Qᵀ, then SVD of the square Rᵀ
        const TallSvd s = tall_thin_svd(transpose(x));
        // Xᵀ = Q·[U_c D V_cᵀ; 0]  =>  X = V_c·D·[U_cᵀ 0]·Qᵀ
        if (u)
            right_multiply_inplace(u->block(0, r0, m, mr), s.core.v);
        if (v) {
            apply_right_inplace(s.q, Op::None, v->block(0, r0, n, nr));
            right_multiply_inplace(v->block(0, r0, n, mr), s.core.u);
        }
        apply_right_inplace(s.q, Op::None, t.block(0, r0, r0, nr));
        right_multiply_inplace(t.block(0, r0, r0, mr), s.core.u);
        x.fill(0.0);
        for (std::size_t j = 0; j < mr; ++j)
            x(j, j) = s.core.sigma[j];
    }
}

inline void check_step_args(ConstMatrixView a, std::size_t b, const char* who)
{
    if (b < 1 || b >= std::min(a.rows(), a.cols()))
        throw InputError(std::string(who) + ": need 1 <= b < min(m,n), got b = " + std::to_string(b) + " for " +
                         shape_str(a.rows(), a.cols()));
    if (!all_finite(a))
        throw InputError(std::string(who) + ": non-finite input entries");
}

} // namespace detail

inline StepResult step_utv_oversampled(ConstMatrixView a, std::size_t b, std::size_t power_steps,
                                       std::size_t oversampling, RandomStream& stream,
                                       bool reorthonormalize = true)
{
    detail::check_step_args(a, b, "step_utv");
    UtvOptions opt;
    opt.block_size = b;
    opt.power_steps = power_steps;
    opt.oversampling = oversampling;
    opt.reorthonormalize = reorthonormalize;

    StepResult out;
    out.t = Matrix(a);
    out.u = Matrix::identity(a.rows());
    out.v = Matrix::identity(a.cols());
    out.block_size = b;
    detail::utv_step(out.t, &out.u, &out.v, 0, b, opt, stream);
    return out;
}

inline StepResult step_utv(ConstMatrixView a, std::size_t b, std::size_t power_steps, RandomStream& stream,
                           bool reorthonormalize = true)
{
    return step_utv_oversampled(a, b, power_steps, 0, stream, reorthonormalize);
}

inline UtvFactorization rand_utv(ConstMatrixView a, const UtvOptions& opt, RandomStream& stream)
{
    if (a.rows() == 0 || a.cols() == 0)
        throw InputError("rand_utv: empty input " + detail::shape_str(a.rows(), a.cols()));
    if (opt.block_size < 1)
        throw InputError("rand_utv: block size must be >= 1");
    if (!all_finite(a))
        throw InputError("rand_utv: non-finite input entries");

    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const std::size_t b = opt.block_size;

    UtvFactorization out;
    out.block_size = b;
    out.power_steps = opt.power_steps;
    out.oversampling = opt.oversampling;
    out.seed = stream.seed();
    out.t = Matrix(a);
    if (opt.build_orthonormal) {
        out.u = Matrix::identity(m);
        out.v = Matrix::identity(n);
    }
    Matrix* u = opt.build_orthonormal ? &out.u : nullptr;
    Matrix* v = opt.build_orthonormal ? &out.v : nullptr;

    const std::size_t steps = std::min((m + b - 1) / b, (n + b - 1) / b);
    for (std::size_t i = 0; i < steps; ++i) {
        const std::size_t r0 = b * i;
        ++out.steps;
        if (r0 + b < m && r0 + b < n) {
            detail::utv_step(out.t, u, v, r0, b, opt, stream);
            const std::size_t last = r0 + b - 1;
            if (opt.stop_tolerance > 0.0 && out.t(last, last) <= opt.stop_tolerance * out.t(0, 0)) {
                out.stopped_early = true;
                break;
            }
        } else {
            detail::utv_final(out.t, u, v, r0);
        }
    }
    return out;
}

/// Spectral norms of both sides of the two rank-b error identities for one shared Gaussian draw.
struct TheoremCheck {
    double lhs_a = 0.0; // ‖A − A·Q·Qᵀ‖, Q basis of Y = (AᵀA)^q·Aᵀ·G
    double rhs_a = 0.0; // ‖[T₁₂; T₂₂]‖
    double lhs_b = 0.0; // ‖A − W·Wᵀ·A‖, W basis of Z = A·Y
    double rhs_b = 0.0; // ‖T₂₂‖
    double sigma1 = 0.0;
};

inline TheoremCheck verify_theorem(ConstMatrixView a, std::size_t b, std::size_t power_steps, RandomStream& stream,
                                   bool reorthonormalize = true)
{
    RandomStream shared = stream;
    const StepResult step = step_utv(a, b, power_steps, stream, reorthonormalize);

    const Matrix g = gaussian_matrix(shared, a.rows(), b);
    const Matrix y = sample_row_space(a, g, power_steps, reorthonormalize);
    const Matrix q = orthonormal_basis(y);
    const Matrix w = orthonormal_basis(multiply(a, y));

    TheoremCheck out;
    out.lhs_a = spectral_norm(projection_residual(a, q));
    const Matrix wta = multiply(w, a, Op::Trans, Op::None);
    Matrix resid_b(a);
    gemm(-1.0, w, Op::None, wta, Op::None, 1.0, resid_b);
    out.lhs_b = spectral_norm(resid_b);
    out.rhs_a = spectral_norm(step.t.block(0, b, a.rows(), a.cols() - b));
    out.rhs_b = spectral_norm(step.t22());
    out.sigma1 = spectral_norm(a);
    return out;
}

} // namespace randutv
