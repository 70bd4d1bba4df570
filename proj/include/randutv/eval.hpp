#pragma once

//
// Accuracy studies: rank-k approximation errors of the factorizations,
// diagonal-versus-singular-value errors, the operation-count model, and a
// driver that runs a grid of (method, seed, k, norm) cells into flat records.
//

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "cpqr.hpp"
#include "error.hpp"
#include "matrix.hpp"
#include "qlp.hpp"
#include "random.hpp"
#include "svd.hpp"
#include "testmat.hpp"
#include "utv.hpp"

namespace randutv {

enum class NormKind { Spectral, Frobenius };

inline std::string norm_name(NormKind k) { return k == NormKind::Spectral ? "spectral" : "frobenius"; }

inline NormKind parse_norm(std::string_view s)
{
    if (s == "spectral" || s == "2")
        return NormKind::Spectral;
    if (s == "frobenius" || s == "fro")
        return NormKind::Frobenius;
    throw InputError("unknown norm '" + std::string(s) + "' (expected spectral or frobenius)");
}

inline double matrix_norm(ConstMatrixView a, NormKind kind)
{
    return kind == NormKind::Spectral ? spectral_norm(a) : frobenius_norm(a);
}

/// ‖A − A_k^optimal‖ from a non-increasing spectrum: σ_{k+1} or the Frobenius tail.
inline double optimal_error(std::span<const double> sigma, std::size_t k, NormKind kind)
{
    if (k >= sigma.size())
        return 0.0;
    if (kind == NormKind::Spectral)
        return sigma[k];
    double s = 0.0;
    for (std::size_t j = sigma.size(); j-- > k;)
        s += sigma[j] * sigma[j];
    return std::sqrt(s);
}

struct ErrorCurve {
    std::string method;
    NormKind norm = NormKind::Spectral;
    std::vector<std::size_t> ks;
    std::vector<double> abs_err;
    /// Empty where the optimal error is zero (k = min(m,n)).
    std::vector<std::optional<double>> rel_err_pct;
};

namespace detail {

inline void check_ks(const std::vector<std::size_t>& ks, std::size_t kmax)
{
    for (std::size_t k : ks)
        if (k < 1 || k > kmax)
            throw InputError("k = " + std::to_string(k) + " outside [1, " + std::to_string(kmax) + "]");
}

inline void check_reference(std::span<const double> sigma)
{
    if (sigma.empty())
        throw ConfigError("no singular-value reference available for relative errors");
}

inline void push_point(ErrorCurve& c, std::size_t k, double e, std::span<const double> sigma)
{
    c.ks.push_back(k);
    c.abs_err.push_back(e);
    const double opt = optimal_error(sigma, k, c.norm);
    c.rel_err_pct.push_back(opt > 0.0 ? std::optional<double>(100.0 * e / opt) : std::nullopt);
}

} // namespace detail

//
// e_k = ‖M(k:, k:)‖ for a triangular middle factor M (T of a UTV, R of a
// CPQR, L of a QLP). With M triangular this is exactly the error of the
// rank-k truncation that keeps the leading k rows (or columns for L).
//
inline ErrorCurve error_curve(const std::string& method, ConstMatrixView middle, std::span<const double> sigma,
                              const std::vector<std::size_t>& ks, NormKind norm)
{
    detail::check_reference(sigma);
    const std::size_t kmax = std::min(middle.rows(), middle.cols());
    detail::check_ks(ks, kmax);
    ErrorCurve c;
    c.method = method;
    c.norm = norm;
    for (std::size_t k : ks) {
        const ConstMatrixView tail = middle.block(k, k, middle.rows() - k, middle.cols() - k);
        detail::push_point(c, k, matrix_norm(tail, norm), sigma);
    }
    return c;
}

/// Truncated-SVD curve from a computed spectrum.
inline ErrorCurve error_curve_svd(std::span<const double> computed, std::span<const double> sigma,
                                  const std::vector<std::size_t>& ks, NormKind norm)
{
    detail::check_reference(sigma);
    detail::check_ks(ks, computed.size());
    ErrorCurve c;
    c.method = "svd";
    c.norm = norm;
    for (std::size_t k : ks)
        detail::push_point(c, k, optimal_error(computed, k, norm), sigma);
    return c;
}

/// U(:, 0:k)·T(0:k, :)·Vᵀ
inline Matrix utv_rank_k(const Matrix& u, const Matrix& t, const Matrix& v, std::size_t k)
{
    const Matrix ut = multiply(u.block(0, 0, u.rows(), k), t.block(0, 0, k, t.cols()));
    return multiply(ut, v, Op::None, Op::Trans);
}

/// U·L(:, 0:k)·V(:, 0:k)ᵀ
inline Matrix qlp_rank_k(const QlpFactorization& f, std::size_t k)
{
    const Matrix ul = multiply(f.u, f.l.block(0, 0, f.l.rows(), k));
    return multiply(ul, f.v.block(0, 0, f.v.rows(), k), Op::None, Op::Trans);
}

inline double explicit_error(ConstMatrixView a, ConstMatrixView approximant, NormKind norm)
{
    return matrix_norm(subtract(a, approximant), norm);
}

/// Known spectrum if the generator has one, otherwise the Jacobi oracle.
inline std::vector<double> reference_spectrum(const GeneratedMatrix& g)
{
    if (g.known_sigma)
        return *g.known_sigma;
    return singular_values(g.a);
}

inline double median(std::vector<double> x)
{
    if (x.empty())
        throw InputError("median of an empty sample");
    std::sort(x.begin(), x.end());
    const std::size_t h = x.size() / 2;
    return x.size() % 2 ? x[h] : 0.5 * (x[h - 1] + x[h]);
}

/// 100·| |d_i| − σ_i | / σ_i over the leading entries with σ_i > 0.
inline std::vector<double> relative_diagonal_errors(std::span<const double> diag, std::span<const double> sigma)
{
    detail::check_reference(sigma);
    std::vector<double> out;
    const std::size_t r = std::min(diag.size(), sigma.size());
    for (std::size_t i = 0; i < r; ++i)
        if (sigma[i] > 0.0)
            out.push_back(100.0 * std::abs(std::abs(diag[i]) - sigma[i]) / sigma[i]);
    return out;
}

struct DiagStudyEntry {
    std::string method;
    std::vector<double> diagonal;
    std::vector<double> rel_err_pct;
    double median_rel_err_pct = 0.0;
};

//
// Diagonals of T (randUTV for each q), R (CPQR) and L (QLP) against the
// reference spectrum. randUTV streams are seeded from `seed`.
//
inline std::vector<DiagStudyEntry> diag_study(const GeneratedMatrix& g, std::span<const double> sigma, std::size_t b,
                                              const std::vector<std::size_t>& qs, std::uint64_t seed,
                                              bool with_cpqr = true, bool with_qlp = true)
{
    detail::check_reference(sigma);
    std::vector<DiagStudyEntry> out;
    auto add = [&](std::string name, std::vector<double> d) {
        DiagStudyEntry e;
        e.method = std::move(name);
        e.rel_err_pct = relative_diagonal_errors(d, sigma);
        e.median_rel_err_pct = median(e.rel_err_pct);
        e.diagonal = std::move(d);
        out.push_back(std::move(e));
    };
    for (std::size_t q : qs) {
        RandomStream stream(seed);
        UtvOptions opt;
        opt.block_size = b;
        opt.power_steps = q;
        opt.build_orthonormal = false;
        add("randutv_q" + std::to_string(q), diagonal_of(rand_utv(g.a, opt, stream).t));
    }
    if (with_cpqr)
        add("cpqr", diagonal_of(cpqr(g.a).r));
    if (with_qlp)
        add("qlp", diagonal_of(qlp(g.a).l));
    return out;
}

// Operation counts for m ≥ n without forming the orthonormal factors.
inline double flops_randutv(double m, double n, double q) { return (5 + 2 * q) * m * n * n - (3 + 2 * q) * n * n * n / 3; }
inline double flops_cpqr(double m, double n) { return 2 * m * n * n - 2 * n * n * n / 3; }
inline double flops_bidiag(double m, double n) { return 4 * m * n * n - 4 * n * n * n / 3; }
inline double flops_bidiag_tall(double m, double n) { return 2 * m * n * n + 2 * n * n * n; }

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool operator==(const Fraction&) const = default;
};

/// flops_randutv(m,n,q) / flops_cpqr(m,n) as a reduced fraction, using 3× both counts to stay integral.
inline Fraction flop_ratio_exact(std::int64_t m, std::int64_t n, std::int64_t q)
{
    if (m < n || n < 1 || q < 0 || m > 100000)
        throw InputError("flop_ratio_exact: need 1 <= n <= m <= 1e5 and q >= 0");
    const std::int64_t mn2 = m * n * n;
    const std::int64_t n3 = n * n * n;
    const std::int64_t num = 3 * (5 + 2 * q) * mn2 - (3 + 2 * q) * n3;
    const std::int64_t den = 6 * mn2 - 2 * n3;
    const std::int64_t g = std::gcd(num, den);
    return {num / g, den / g};
}

//
// Experiment driver.
//

struct ExperimentSpec {
    TestMatrixSpec matrix;            // family and parameters; n and seed are overridden per cell
    std::size_t n = 400;
    std::size_t b = 50;
    std::vector<std::size_t> qs{0, 1, 2};
    std::size_t p = 0;
    std::vector<std::uint64_t> seeds{0};
    std::vector<NormKind> norms{NormKind::Spectral};
    std::vector<std::string> methods{"svd", "cpqr", "qlp", "randutv"};
    /// Empty: multiples of b below n.
    std::vector<std::size_t> ks;
};

struct ExperimentRow {
    std::string family;
    std::size_t n = 0;
    std::size_t b = 0;
    std::optional<std::size_t> q;
    std::optional<std::size_t> p;
    std::uint64_t seed = 0;
    std::string method;
    std::size_t k = 0;
    double abs_err = 0.0;
    std::optional<double> rel_err_pct;
    NormKind norm = NormKind::Spectral;
};

struct SummaryRow {
    std::string family;
    std::string method;
    std::size_t k = 0;
    NormKind norm = NormKind::Spectral;
    std::size_t samples = 0;
    double median_abs_err = 0.0;
    std::optional<double> median_rel_err_pct;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;
    std::vector<SummaryRow> summary;
};

inline std::vector<std::size_t> default_ks(std::size_t n, std::size_t b)
{
    std::vector<std::size_t> ks;
    for (std::size_t k = b; k < n; k += b)
        ks.push_back(k);
    return ks;
}

/// Seed of the algorithm's stream for a cell, decorrelated from the matrix seed.
inline std::uint64_t algorithm_seed(std::uint64_t seed)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline void validate(const ExperimentSpec& spec)
{
    std::vector<std::string> problems;
    if (spec.methods.empty())
        problems.push_back("methods: empty");
    for (const auto& m : spec.methods)
        if (m != "svd" && m != "cpqr" && m != "qlp" && m != "randutv")
            problems.push_back("methods: unknown method '" + m + "'");
    if (std::find(spec.methods.begin(), spec.methods.end(), "randutv") != spec.methods.end() && spec.qs.empty())
        problems.push_back("qs: empty while randutv is requested");
    if (spec.seeds.empty())
        problems.push_back("seeds: empty");
    if (spec.norms.empty())
        problems.push_back("norms: empty");
    if (spec.n < 1)
        problems.push_back("n: must be >= 1");
    if (spec.b < 1)
        problems.push_back("b: must be >= 1");
    for (std::size_t k : spec.ks)
        if (k < 1 || k > spec.n)
            problems.push_back("ks: " + std::to_string(k) + " outside [1, " + std::to_string(spec.n) + "]");
    if (spec.ks.empty() && spec.b >= spec.n)
        problems.push_back("ks: default grid (multiples of b below n) is empty");
    if (!problems.empty()) {
        std::string msg = "invalid experiment spec:";
        for (const auto& p : problems)
            msg += "\n  " + p;
        throw ConfigError(msg);
    }
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec)
{
    validate(spec);
    const std::vector<std::size_t> ks = spec.ks.empty() ? default_ks(spec.n, spec.b) : spec.ks;
    const std::string family = family_name(spec.matrix.family);
    auto has = [&](const char* m) { return std::find(spec.methods.begin(), spec.methods.end(), m) != spec.methods.end(); };

    ExperimentResult res;
    std::optional<std::vector<double>> bie_sigma; // the BIE matrix does not depend on the seed
    for (std::uint64_t seed : spec.seeds) {
        TestMatrixSpec ms = spec.matrix;
        ms.n = spec.n;
        ms.seed = seed;
        const GeneratedMatrix g = generate(ms);
        std::vector<double> sigma;
        if (g.known_sigma) {
            sigma = *g.known_sigma;
        } else {
            if (!bie_sigma)
                bie_sigma = singular_values(g.a);
            sigma = *bie_sigma;
        }

        auto emit = [&](const ErrorCurve& c, std::optional<std::size_t> q, std::optional<std::size_t> p) {
            for (std::size_t i = 0; i < c.ks.size(); ++i)
                res.rows.push_back({family, spec.n, spec.b, q, p, seed, c.method, c.ks[i], c.abs_err[i],
                                    c.rel_err_pct[i], c.norm});
        };

        for (NormKind norm : spec.norms) {
            if (has("svd"))
                emit(error_curve_svd(singular_values(g.a), sigma, ks, norm), std::nullopt, std::nullopt);
        }
        if (has("cpqr")) {
            const CpqrFactorization f = cpqr(g.a);
            for (NormKind norm : spec.norms)
                emit(error_curve("cpqr", f.r, sigma, ks, norm), std::nullopt, std::nullopt);
        }
        if (has("qlp")) {
            const QlpFactorization f = qlp(g.a);
            for (NormKind norm : spec.norms)
                emit(error_curve("qlp", f.l, sigma, ks, norm), std::nullopt, std::nullopt);
        }
        if (has("randutv")) {
            for (std::size_t q : spec.qs) {
                RandomStream stream(algorithm_seed(seed));
                UtvOptions opt;
                opt.block_size = spec.b;
                opt.power_steps = q;
                opt.oversampling = spec.p;
                opt.build_orthonormal = false;
                const UtvFactorization f = rand_utv(g.a, opt, stream);
                const std::string label = "randutv_q" + std::to_string(q);
                for (NormKind norm : spec.norms)
                    emit(error_curve(label, f.t, sigma, ks, norm), q, spec.p);
            }
        }
    }

    auto key = [](const ExperimentRow& r) { return std::tuple(norm_name(r.norm), r.method, r.k, r.seed); };
    std::stable_sort(res.rows.begin(), res.rows.end(),
                     [&](const ExperimentRow& x, const ExperimentRow& y) { return key(x) < key(y); });

    for (std::size_t i = 0; i < res.rows.size();) {
        std::size_t j = i;
        std::vector<double> abs, rel;
        bool rel_complete = true;
        while (j < res.rows.size() && res.rows[j].norm == res.rows[i].norm && res.rows[j].method == res.rows[i].method &&
               res.rows[j].k == res.rows[i].k) {
            abs.push_back(res.rows[j].abs_err);
            if (res.rows[j].rel_err_pct)
                rel.push_back(*res.rows[j].rel_err_pct);
            else
                rel_complete = false;
            ++j;
        }
        SummaryRow s;
        s.family = family;
        s.method = res.rows[i].method;
        s.k = res.rows[i].k;
        s.norm = res.rows[i].norm;
        s.samples = j - i;
        s.median_abs_err = median(abs);
        if (rel_complete)
            s.median_rel_err_pct = median(rel);
        res.summary.push_back(s);
        i = j;
    }
    return res;
}

inline std::string csv_header() { return "family,n,b,q,p,seed,method,k,abs_err,rel_err_pct,norm"; }

inline std::string to_csv_line(const ExperimentRow& r)
{
    auto num = [](double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    std::string s = r.family + "," + std::to_string(r.n) + "," + std::to_string(r.b) + ",";
    s += (r.q ? std::to_string(*r.q) : "") + "," + (r.p ? std::to_string(*r.p) : "") + ",";
    s += std::to_string(r.seed) + "," + r.method + "," + std::to_string(r.k) + "," + num(r.abs_err) + ",";
    s += (r.rel_err_pct ? num(*r.rel_err_pct) : "") + "," + norm_name(r.norm);
    return s;
}

inline std::string to_csv(const std::vector<ExperimentRow>& rows)
{
    std::string out = csv_header() + "\n";
    for (const auto& r : rows)
        out += to_csv_line(r) + "\n";
    return out;
}

} // namespace randutv
