#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the blocked kernels under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "randutv/matrix.hpp"

namespace oracle {

using randutv::ConstMatrixView;
using randutv::Matrix;

inline Matrix random_matrix(std::size_t m, std::size_t n, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    Matrix a(m, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
            a(i, j) = dist(gen);
    return a;
}

// Plain i-j-k product in long double.
inline Matrix naive_multiply(ConstMatrixView a, ConstMatrixView b)
{
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            long double s = 0;
            for (std::size_t k = 0; k < a.cols(); ++k)
                s += static_cast<long double>(a(i, k)) * b(k, j);
            c(i, j) = static_cast<double>(s);
        }
    return c;
}

inline Matrix naive_transpose(ConstMatrixView a)
{
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            t(j, i) = a(i, j);
    return t;
}

inline double fro(ConstMatrixView a)
{
    long double s = 0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            s += static_cast<long double>(a(i, j)) * a(i, j);
    return static_cast<double>(std::sqrt(s));
}

inline double max_diff(ConstMatrixView a, ConstMatrixView b)
{
    double d = 0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

inline double fro_diff(ConstMatrixView a, ConstMatrixView b)
{
    Matrix d(a.rows(), a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            d(i, j) = a(i, j) - b(i, j);
    return fro(d);
}

// ‖QᵀQ − I‖_F with the naive product.
inline double orth_error(ConstMatrixView q)
{
    Matrix g = naive_multiply(naive_transpose(q), q);
    for (std::size_t i = 0; i < g.rows(); ++i)
        g(i, i) -= 1.0;
    return fro(g);
}

// I − τ v vᵀ as a dense matrix, v given on the full length.
inline Matrix reflector(const std::vector<double>& v, double tau)
{
    const std::size_t m = v.size();
    Matrix h(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            h(i, j) = (i == j ? 1.0 : 0.0) - tau * v[i] * v[j];
    return h;
}

// Largest singular value by power iteration on AᵀA, run to convergence in
// long double. Only for small, well-separated test matrices.
inline double power_sigma1(ConstMatrixView a, int iters = 2000)
{
    std::vector<long double> x(a.cols(), 1.0L), y(a.rows());
    long double lambda = 0;
    for (int it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            y[i] = 0;
            for (std::size_t j = 0; j < a.cols(); ++j)
                y[i] += a(i, j) * x[j];
        }
        long double nrm = 0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            long double s = 0;
            for (std::size_t i = 0; i < a.rows(); ++i)
                s += a(i, j) * y[i];
            x[j] = s;
            nrm += s * s;
        }
        nrm = std::sqrt(nrm);
        if (nrm == 0)
            return 0.0;
        for (auto& v : x)
            v /= nrm;
        lambda = nrm;
    }
    return static_cast<double>(std::sqrt(lambda));
}

// Orthonormal columns by two passes of modified Gram–Schmidt in long double.
inline Matrix gram_schmidt(ConstMatrixView a)
{
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::vector<long double>> q(n, std::vector<long double>(m));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i)
            q[j][i] = a(i, j);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t c = 0; c < j; ++c) {
                long double d = 0;
                for (std::size_t i = 0; i < m; ++i)
                    d += q[c][i] * q[j][i];
                for (std::size_t i = 0; i < m; ++i)
                    q[j][i] -= d * q[c][i];
            }
        long double nrm = 0;
        for (std::size_t i = 0; i < m; ++i)
            nrm += q[j][i] * q[j][i];
        nrm = std::sqrt(nrm);
        for (std::size_t i = 0; i < m; ++i)
            q[j][i] /= nrm;
    }
    Matrix out(m, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
            out(i, j) = static_cast<double>(q[j][i]);
    return out;
}

// U·diag(d)·Vᵀ with Gram–Schmidt factors; d has min(m,n) entries.
inline Matrix with_singular_values(std::size_t m, std::size_t n, const std::vector<double>& d, unsigned seed)
{
    const std::size_t r = d.size();
    Matrix u = gram_schmidt(random_matrix(m, r, seed));
    const Matrix v = gram_schmidt(random_matrix(n, r, seed + 7919));
    for (std::size_t j = 0; j < r; ++j)
        for (std::size_t i = 0; i < m; ++i)
            u(i, j) *= d[j];
    return naive_multiply(u, naive_transpose(v));
}

// Plain one-sided Jacobi in long double, no preconditioning; sorted descending.
inline std::vector<double> singular_values(ConstMatrixView a)
{
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<std::vector<long double>> c(n, std::vector<long double>(m));
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
            c[j][i] = a(i, j);
    const long double tol = std::numeric_limits<long double>::epsilon() * std::sqrt((long double)m);
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                long double alpha = 0, beta = 0, gamma = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    alpha += c[p][i] * c[p][i];
                    beta += c[q][i] * c[q][i];
                    gamma += c[p][i] * c[q][i];
                }
                if (gamma == 0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta))
                    continue;
                rotated = true;
                const long double zeta = (beta - alpha) / (2 * gamma);
                const long double t = (zeta >= 0 ? 1 : -1) / (std::abs(zeta) + std::sqrt(1 + zeta * zeta));
                const long double cs = 1 / std::sqrt(1 + t * t), sn = cs * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const long double x = c[p][i], y = c[q][i];
                    c[p][i] = cs * x - sn * y;
                    c[q][i] = sn * x + cs * y;
                }
            }
        if (!rotated)
            break;
    }
    std::vector<double> s(n);
    for (std::size_t j = 0; j < n; ++j) {
        long double t = 0;
        for (long double x : c[j])
            t += x * x;
        s[j] = double(std::sqrt(t));
    }
    std::sort(s.begin(), s.end(), std::greater<>());
    if (s.size() > m)
        s.resize(m);
    return s;
}

} // namespace oracle
