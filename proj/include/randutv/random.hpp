#pragma once

//
// Seeded Gaussian stream. Uniforms come from std::mt19937_64, whose output
// sequence is fixed by the standard; 53-bit doubles are taken from the top
// bits. Gaussian variates are produced in pairs by the Box–Muller transform
// and both members of every pair are used:
//
//     u₁ = (x₁ >> 11 + 1)·2⁻⁵³ ∈ (0,1],  u₂ = (x₂ >> 11)·2⁻⁵³ ∈ [0,1)
//     z₁ = √(−2 ln u₁)·cos(2πu₂),  z₂ = √(−2 ln u₁)·sin(2πu₂)
//

#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

#include "error.hpp"
#include "matrix.hpp"

namespace randutv {

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }
    /// Number of Gaussian variates handed out so far.
    std::uint64_t draws() const noexcept { return draws_; }

    double gaussian()
    {
        ++draws_;
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        constexpr double scale = 0x1.0p-53;
        const double u1 = static_cast<double>((engine_() >> 11) + 1) * scale;
        const double u2 = static_cast<double>(engine_() >> 11) * scale;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    void skip(std::uint64_t count)
    {
        for (std::uint64_t i = 0; i < count; ++i)
            gaussian();
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_ = 0;
    std::uint64_t draws_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// m×n matrix of standard normal entries, drawn in column-major order.
inline Matrix gaussian_matrix(RandomStream& stream, std::size_t m, std::size_t n)
{
    Matrix g(m, n);
    for (double& x : g.data())
        x = stream.gaussian();
    return g;
}

/// Accepts decimal ("42") or hexadecimal ("0x2a") seeds.
inline std::uint64_t parse_seed(std::string_view text)
{
    int base = 10;
    if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
        text.remove_prefix(2);
        base = 16;
    }
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw InputError("invalid seed '" + std::string(text) + "'");
    return value;
}

} // namespace randutv
