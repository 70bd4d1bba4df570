#pragma once

//
// Pivoted QLP: A·P₁ = Q₁·R₁, then R₁ᵀ·P₂ = Q₂·R₂, giving A = U·L·Vᵀ with
// L = R₂ᵀ lower triangular, U = Q₁·P₂ and V = P₁·Q₂.
//

#include "cpqr.hpp"
#include "error.hpp"
#include "householder.hpp"
#include "matrix.hpp"

namespace randutv {

struct QlpFactorization {
    Matrix u; // m×m
    Matrix l; // m×n lower triangular
    Matrix v; // n×n
};

inline QlpFactorization qlp(ConstMatrixView a)
{
    if (a.empty())
        throw InputError("qlp: empty input " + detail::shape_str(a.rows(), a.cols()));
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();

    const CpqrFactorization first = cpqr(a);
    const CpqrFactorization second = cpqr(transpose(first.r));

    QlpFactorization out;
    out.l = transpose(second.r);

    const Matrix q1 = form_q(first.q);
    out.u = Matrix(m, m);
    for (std::size_t j = 0; j < m; ++j)
        out.u.view().cols_range(j, 1).assign(q1.block(0, second.perm[j], m, 1));

    const Matrix q2 = form_q(second.q);
    out.v = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.v(first.perm[i], j) = q2(i, j);
    return out;
}

} // namespace randutv
