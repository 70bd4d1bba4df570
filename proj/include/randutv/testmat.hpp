#pragma once

//
// Square test matrices with controlled spectra. The three synthetic
// families are A = U·diag(d)·Vᵀ with U, V the orthogonal factors of
// unpivoted QR of seeded Gaussian matrices, so d is the exact spectrum.
// The fourth is a Nyström discretization of the 2-D Laplace single-layer
// kernel on an ellipse.
//

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "householder.hpp"
#include "matrix.hpp"
#include "random.hpp"

namespace randutv {

enum class Family { FastDecay, SShaped, Gap, Bie };

inline std::string family_name(Family f)
{
    switch (f) {
    case Family::FastDecay: return "fast-decay";
    case Family::SShaped: return "s-shaped";
    case Family::Gap: return "gap";
    case Family::Bie: return "bie";
    }
    return "?";
}

inline Family parse_family(std::string_view name)
{
    if (name == "fast-decay" || name == "fast")
        return Family::FastDecay;
    if (name == "s-shaped" || name == "s")
        return Family::SShaped;
    if (name == "gap")
        return Family::Gap;
    if (name == "bie")
        return Family::Bie;
    throw InputError("unknown matrix family '" + std::string(name) + "' (expected fast-decay, s-shaped, gap, bie)");
}

struct TestMatrixSpec {
    Family family = Family::FastDecay;
    std::size_t n = 400;
    std::uint64_t seed = 0;
    double beta = 1e-5;            // fast-decay: d_n
    std::size_t gap_index = 150;   // gap: last index before the drop
    double gap_factor = 0.1;       // gap: scale after the drop
    double plateau = 1e-2;         // s-shaped: tail level
    double semi_major = 1.0;       // bie
    double semi_minor = 0.7;       // bie
};

struct GeneratedMatrix {
    Matrix a;
    std::optional<std::vector<double>> known_sigma;
    TestMatrixSpec spec;
};

namespace detail {

inline Matrix random_orthogonal(RandomStream& stream, std::size_t n)
{
    const Matrix g = gaussian_matrix(stream, n, n);
    return form_q(qr_unpivoted(g).q);
}

inline GeneratedMatrix with_spectrum(const TestMatrixSpec& spec, std::vector<double> d)
{
    const std::size_t n = spec.n;
    RandomStream stream(spec.seed);
    Matrix u = random_orthogonal(stream, n);
    const Matrix v = random_orthogonal(stream, n);
    for (std::size_t j = 0; j < n; ++j)
        for (double& x : u.col(j))
            x *= d[j];
    GeneratedMatrix out;
    out.a = multiply(u, v, Op::None, Op::Trans);
    out.known_sigma = std::move(d);
    out.spec = spec;
    return out;
}

} // namespace detail

/// d_j = β^((j−1)/(n−1)), 1-based j.
inline std::vector<double> fast_decay_spectrum(std::size_t n, double beta = 1e-5)
{
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j)
        d[j] = j == 0 ? 1.0 : j + 1 == n ? beta : std::pow(beta, static_cast<double>(j) / static_cast<double>(n - 1));
    return d;
}

/// 1 up to ⌊n/8⌋, geometric down to the plateau at ⌊n/2⌋, flat afterwards.
inline std::vector<double> s_shaped_spectrum(std::size_t n, double plateau = 1e-2)
{
    const std::size_t j1 = n / 8;
    const std::size_t j2 = n / 2;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + 1;
        if (j <= j1)
            d[i] = 1.0;
        else if (j < j2)
            d[i] = std::pow(plateau, static_cast<double>(j - j1) / static_cast<double>(j2 - j1));
        else
            d[i] = plateau;
    }
    return d;
}

/// 1/j for j ≤ gap_index, factor/j beyond.
inline std::vector<double> gap_spectrum(std::size_t n, std::size_t gap_index = 150, double factor = 0.1)
{
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double j = static_cast<double>(i + 1);
        d[i] = (i + 1 <= gap_index ? 1.0 : factor) / j;
    }
    return d;
}

inline GeneratedMatrix gen_fast_decay(std::size_t n, std::uint64_t seed, double beta = 1e-5)
{
    if (n < 2)
        throw InputError("fast-decay: need n >= 2, got " + std::to_string(n));
    TestMatrixSpec spec;
    spec.family = Family::FastDecay;
    spec.n = n;
    spec.seed = seed;
    spec.beta = beta;
    return detail::with_spectrum(spec, fast_decay_spectrum(n, beta));
}

inline GeneratedMatrix gen_s_shaped(std::size_t n, std::uint64_t seed, double plateau = 1e-2)
{
    if (n < 20)
        throw InputError("s-shaped: need n >= 20, got " + std::to_string(n));
    TestMatrixSpec spec;
    spec.family = Family::SShaped;
    spec.n = n;
    spec.seed = seed;
    spec.plateau = plateau;
    return detail::with_spectrum(spec, s_shaped_spectrum(n, plateau));
}

inline GeneratedMatrix gen_gap(std::size_t n, std::uint64_t seed, std::size_t gap_index = 150, double factor = 0.1)
{
    if (gap_index < 1 || n <= gap_index)
        throw InputError("gap: need n > gap_index >= 1, got n = " + std::to_string(n) +
                         ", gap_index = " + std::to_string(gap_index));
    TestMatrixSpec spec;
    spec.family = Family::Gap;
    spec.n = n;
    spec.seed = seed;
    spec.gap_index = gap_index;
    spec.gap_factor = factor;
    return detail::with_spectrum(spec, gap_spectrum(n, gap_index, factor));
}

//
// Nodes x_i = (a cos t_i, c sin t_i), t_i = 2πi/n, weights w_i = h·|x'(t_i)|,
// h = 2π/n. Entries are √w_i·K(x_i, x_j)·√w_j with K = −log|x − y|/2π, which
// keeps the matrix symmetric; the diagonal uses −w_i·log(w_i/2)/2π.
//
inline GeneratedMatrix gen_bie(std::size_t n, double semi_major = 1.0, double semi_minor = 0.7)
{
    if (n < 32 || n % 2 != 0)
        throw InputError("bie: need even n >= 32, got " + std::to_string(n));
    const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
    const double c = -1.0 / (2.0 * std::numbers::pi);
    std::vector<double> x(n), y(n), w(n), sw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = h * static_cast<double>(i);
        x[i] = semi_major * std::cos(t);
        y[i] = semi_minor * std::sin(t);
        w[i] = h * std::hypot(semi_major * std::sin(t), semi_minor * std::cos(t));
        sw[i] = std::sqrt(w[i]);
    }
    GeneratedMatrix out;
    out.a = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            out.a(i, j) = i == j ? c * std::log(w[i] / 2.0) * w[i]
                                 : c * std::log(std::hypot(x[i] - x[j], y[i] - y[j])) * (sw[i] * sw[j]);
    out.spec.family = Family::Bie;
    out.spec.n = n;
    out.spec.semi_major = semi_major;
    out.spec.semi_minor = semi_minor;
    return out;
}

inline GeneratedMatrix generate(const TestMatrixSpec& spec)
{
    switch (spec.family) {
    case Family::FastDecay: return gen_fast_decay(spec.n, spec.seed, spec.beta);
    case Family::SShaped: return gen_s_shaped(spec.n, spec.seed, spec.plateau);
    case Family::Gap: return gen_gap(spec.n, spec.seed, spec.gap_index, spec.gap_factor);
    case Family::Bie: {
        GeneratedMatrix g = gen_bie(spec.n, spec.semi_major, spec.semi_minor);
        g.spec.seed = spec.seed;
        return g;
    }
    }
    throw InputError("unknown family");
}

namespace detail {

inline double parse_real(std::string_view key, std::string_view text)
{
    try {
        std::size_t used = 0;
        const std::string s(text);
        const double v = std::stod(s, &used);
        if (used == s.size() && std::isfinite(v))
            return v;
    } catch (const std::exception&) {
    }
    throw InputError("invalid value '" + std::string(text) + "' for " + std::string(key));
}

inline std::size_t parse_count(std::string_view key, std::string_view text)
{
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw InputError("invalid value '" + std::string(text) + "' for " + std::string(key));
    return v;
}

} // namespace detail

/// Parses "family[:key=value,...]", e.g. "fast-decay:n=400,seed=7" or "gap:n=400,gap_index=150".
inline TestMatrixSpec parse_matrix_spec(std::string_view text)
{
    TestMatrixSpec spec;
    const std::size_t colon = text.find(':');
    spec.family = parse_family(text.substr(0, colon));
    if (colon == std::string_view::npos)
        return spec;
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
        const std::size_t comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            throw InputError("matrix spec item '" + std::string(item) + "' is not key=value");
        const std::string_view key = item.substr(0, eq);
        const std::string_view value = item.substr(eq + 1);
        if (key == "n")
            spec.n = detail::parse_count(key, value);
        else if (key == "seed")
            spec.seed = parse_seed(value);
        else if (key == "beta")
            spec.beta = detail::parse_real(key, value);
        else if (key == "gap_index" || key == "gap")
            spec.gap_index = detail::parse_count(key, value);
        else if (key == "gap_factor")
            spec.gap_factor = detail::parse_real(key, value);
        else if (key == "plateau")
            spec.plateau = detail::parse_real(key, value);
        else if (key == "a")
            spec.semi_major = detail::parse_real(key, value);
        else if (key == "c")
            spec.semi_minor = detail::parse_real(key, value);
        else
            throw InputError("unknown matrix spec key '" + std::string(key) +
                             "' (expected n, seed, beta, gap_index, gap_factor, plateau, a, c)");
    }
    return spec;
}

} // namespace randutv
