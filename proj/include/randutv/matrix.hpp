#pragma once

//
// Column-major dense matrix, non-owning views and the handful of kernels
// (gemm, norms, copies) that every factorization in the library builds on.
//
// Indices are 0-based: element (i,j) of an r×c matrix lives at data[j*r + i].
//

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace randutv {

enum class Op { None, Trans };

namespace detail {

inline std::string shape_str(std::size_t r, std::size_t c)
{
    return std::to_string(r) + "x" + std::to_string(c);
}

} // namespace detail

//
// Floating-point operation counter. Every gemm call adds 2·m·n·k to the
// counter of the calling thread; tests use it to check cost contracts.
//
inline std::uint64_t& flop_counter() noexcept
{
    thread_local std::uint64_t count = 0;
    return count;
}

class ConstMatrixView {
public:
    ConstMatrixView() = default;
    ConstMatrixView(const double* data, std::size_t rows, std::size_t cols, std::size_t ld)
        : data_(data), rows_(rows), cols_(cols), ld_(ld)
    {
        assert(ld_ >= rows_ || cols_ == 0);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t ld() const noexcept { return ld_; }
    const double* data() const noexcept { return data_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double operator()(std::size_t i, std::size_t j) const noexcept
    {
        assert(i < rows_ && j < cols_);
        return data_[j * ld_ + i];
    }

    std::span<const double> col(std::size_t j) const noexcept
    {
        assert(j < cols_);
        return {data_ + j * ld_, rows_};
    }

    /// Sub-block starting at (r0,c0) with nr rows and nc columns.
    ConstMatrixView block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
    {
        if (r0 + nr > rows_ || c0 + nc > cols_)
            throw DimensionError("block [" + std::to_string(r0) + "+" + std::to_string(nr) + ", " +
                                 std::to_string(c0) + "+" + std::to_string(nc) + "] outside " +
                                 detail::shape_str(rows_, cols_));
        return {data_ + (nr && nc ? c0 * ld_ + r0 : 0), nr, nc, std::max<std::size_t>(ld_, 1)};
    }

    ConstMatrixView cols_range(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }
    ConstMatrixView rows_range(std::size_t r0, std::size_t nr) const { return block(r0, 0, nr, cols_); }

private:
    const double* data_ = nullptr;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t ld_ = 1;
};

class MatrixView {
public:
    MatrixView() = default;
    MatrixView(double* data, std::size_t rows, std::size_t cols, std::size_t ld)
        : data_(data), rows_(rows), cols_(cols), ld_(ld)
    {
        assert(ld_ >= rows_ || cols_ == 0);
    }

    operator ConstMatrixView() const noexcept { return {data_, rows_, cols_, ld_}; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t ld() const noexcept { return ld_; }
    double* data() const noexcept { return data_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double& operator()(std::size_t i, std::size_t j) const noexcept
    {
        assert(i < rows_ && j < cols_);
        return data_[j * ld_ + i];
    }

    std::span<double> col(std::size_t j) const noexcept
    {
        assert(j < cols_);
        return {data_ + j * ld_, rows_};
    }

    MatrixView block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
    {
        if (r0 + nr > rows_ || c0 + nc > cols_)
            throw DimensionError("block [" + std::to_string(r0) + "+" + std::to_string(nr) + ", " +
                                 std::to_string(c0) + "+" + std::to_string(nc) + "] outside " +
                                 detail::shape_str(rows_, cols_));
        return {data_ + (nr && nc ? c0 * ld_ + r0 : 0), nr, nc, std::max<std::size_t>(ld_, 1)};
    }

    MatrixView cols_range(std::size_t c0, std::size_t nc) const { return block(0, c0, rows_, nc); }
    MatrixView rows_range(std::size_t r0, std::size_t nr) const { return block(r0, 0, nr, cols_); }

    void fill(double value) const
    {
        for (std::size_t j = 0; j < cols_; ++j)
            std::fill_n(data_ + j * ld_, rows_, value);
    }

    /// Copies src into this view; shapes must agree.
    void assign(ConstMatrixView src) const
    {
        if (src.rows() != rows_ || src.cols() != cols_)
            throw DimensionError("assign: source " + detail::shape_str(src.rows(), src.cols()) +
                                 " into view " + detail::shape_str(rows_, cols_));
        for (std::size_t j = 0; j < cols_; ++j)
            std::copy_n(src.data() + j * src.ld(), rows_, data_ + j * ld_);
    }

private:
    double* data_ = nullptr;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t ld_ = 1;
};

/// Owning column-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value)
    {}

    explicit Matrix(ConstMatrixView src) : Matrix(src.rows(), src.cols())
    {
        view().assign(src);
    }

    /// Row-wise literal, e.g. Matrix::from_rows({{1, 2}, {3, 4}}).
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows)
    {
        const std::size_t r = rows.size();
        const std::size_t c = r ? rows.begin()->size() : 0;
        Matrix m(r, c);
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != c)
                throw DimensionError("from_rows: ragged row " + std::to_string(i));
            std::size_t j = 0;
            for (double v : row)
                m(i, j++) = v;
            ++i;
        }
        return m;
    }

    static Matrix identity(std::size_t n) { return identity(n, n); }

    static Matrix identity(std::size_t rows, std::size_t cols)
    {
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < std::min(rows, cols); ++i)
            m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(std::span<const double> d)
    {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept
    {
        assert(i < rows_ && j < cols_);
        return data_[j * rows_ + i];
    }
    double operator()(std::size_t i, std::size_t j) const noexcept
    {
        assert(i < rows_ && j < cols_);
        return data_[j * rows_ + i];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
    std::span<const double> col(std::size_t j) const noexcept { return {data_.data() + j * rows_, rows_}; }

    MatrixView view() noexcept { return {data_.data(), rows_, cols_, std::max<std::size_t>(rows_, 1)}; }
    ConstMatrixView view() const noexcept { return {data_.data(), rows_, cols_, std::max<std::size_t>(rows_, 1)}; }

    operator MatrixView() noexcept { return view(); }
    operator ConstMatrixView() const noexcept { return view(); }

    MatrixView block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc)
    {
        return view().block(r0, c0, nr, nc);
    }
    ConstMatrixView block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
    {
        return view().block(r0, c0, nr, nc);
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix transpose(ConstMatrixView a)
{
    Matrix t(a.cols(), a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            t(j, i) = a(i, j);
    return t;
}

inline bool all_finite(ConstMatrixView a)
{
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (double v : a.col(j))
            if (!std::isfinite(v))
                return false;
    return true;
}

inline double frobenius_norm(ConstMatrixView a)
{
    // scaled sum of squares, immune to overflow for large entries
    double scale = 0.0;
    double ssq = 1.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (double v : a.col(j)) {
            if (v == 0.0)
                continue;
            const double av = std::abs(v);
            if (scale < av) {
                ssq = 1.0 + ssq * (scale / av) * (scale / av);
                scale = av;
            } else {
                ssq += (av / scale) * (av / scale);
            }
        }
    }
    return scale * std::sqrt(ssq);
}

inline double max_abs(ConstMatrixView a)
{
    double m = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (double v : a.col(j))
            m = std::max(m, std::abs(v));
    return m;
}

namespace detail {

constexpr std::size_t gemm_tile = 64;

// C += alpha * A * B with A (m×k), B (k×n) both non-transposed, C (m×n).
inline void gemm_nn(double alpha, ConstMatrixView a, ConstMatrixView b, MatrixView c)
{
    const std::size_t m = c.rows();
    const std::size_t n = c.cols();
    const std::size_t k = a.cols();
    for (std::size_t p0 = 0; p0 < k; p0 += gemm_tile) {
        const std::size_t p1 = std::min(k, p0 + gemm_tile);
        for (std::size_t i0 = 0; i0 < m; i0 += gemm_tile) {
            const std::size_t i1 = std::min(m, i0 + gemm_tile);
            for (std::size_t j = 0; j < n; ++j) {
                double* cj = c.data() + j * c.ld();
                for (std::size_t p = p0; p < p1; ++p) {
                    const double s = alpha * b(p, j);
                    if (s == 0.0)
                        continue;
                    const double* ap = a.data() + p * a.ld();
                    for (std::size_t i = i0; i < i1; ++i)
                        cj[i] += s * ap[i];
                }
            }
        }
    }
}

} // namespace detail

//
// C <- alpha·op(A)·op(B) + beta·C
//
// C must not alias A or B. beta == 0 overwrites C without reading it.
//
inline void gemm(double alpha, ConstMatrixView a, Op op_a, ConstMatrixView b, Op op_b, double beta,
                 MatrixView c)
{
    const std::size_t am = op_a == Op::None ? a.rows() : a.cols();
    const std::size_t ak = op_a == Op::None ? a.cols() : a.rows();
    const std::size_t bk = op_b == Op::None ? b.rows() : b.cols();
    const std::size_t bn = op_b == Op::None ? b.cols() : b.rows();
    if (ak != bk || c.rows() != am || c.cols() != bn)
        throw DimensionError("gemm: op(A) is " + detail::shape_str(am, ak) + ", op(B) is " +
                             detail::shape_str(bk, bn) + ", C is " + detail::shape_str(c.rows(), c.cols()));

    if (beta == 0.0)
        c.fill(0.0);
    else if (beta != 1.0)
        for (std::size_t j = 0; j < c.cols(); ++j)
            for (double& v : c.col(j))
                v *= beta;

    if (alpha == 0.0 || am == 0 || bn == 0 || ak == 0)
        return;
    flop_counter() += 2ull * am * bn * ak;

    // Transposed operands are packed once (O(mk + kn)) so a single kernel
    // serves all four cases.
    if (op_a == Op::Trans && op_b == Op::Trans) {
        const Matrix at = transpose(a);
        const Matrix bt = transpose(b);
        detail::gemm_nn(alpha, at, bt, c);
    } else if (op_a == Op::Trans) {
        const Matrix at = transpose(a);
        detail::gemm_nn(alpha, at, b, c);
    } else if (op_b == Op::Trans) {
        const Matrix bt = transpose(b);
        detail::gemm_nn(alpha, a, bt, c);
    } else {
        detail::gemm_nn(alpha, a, b, c);
    }
}

/// Returns op(A)·op(B).
inline Matrix multiply(ConstMatrixView a, ConstMatrixView b, Op op_a = Op::None, Op op_b = Op::None)
{
    Matrix c(op_a == Op::None ? a.rows() : a.cols(), op_b == Op::None ? b.cols() : b.rows());
    gemm(1.0, a, op_a, b, op_b, 0.0, c);
    return c;
}

inline Matrix subtract(ConstMatrixView a, ConstMatrixView b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("subtract: " + detail::shape_str(a.rows(), a.cols()) + " vs " +
                             detail::shape_str(b.rows(), b.cols()));
    Matrix d(a.rows(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            d(i, j) = a(i, j) - b(i, j);
    return d;
}

/// ‖QᵀQ − I‖_F.
inline double orthogonality_error(ConstMatrixView q)
{
    Matrix g = multiply(q, q, Op::Trans, Op::None);
    for (std::size_t i = 0; i < g.rows(); ++i)
        g(i, i) -= 1.0;
    return frobenius_norm(g);
}

/// Copy of the diagonal of A.
inline std::vector<double> diagonal_of(ConstMatrixView a)
{
    std::vector<double> d(std::min(a.rows(), a.cols()));
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = a(i, i);
    return d;
}

} // namespace randutv
