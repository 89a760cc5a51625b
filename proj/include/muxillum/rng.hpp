#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace muxillum {

using Seed = std::uint64_t;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Order-sensitive seed derivation: derive_seed(s, {a, b}) names the stream
/// (s, a, b). Used everywhere a worker needs its own stream so results never
/// depend on scheduling.
inline constexpr Seed derive_seed(Seed base, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = splitmix64(base ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x3c6ef372fe94f82bULL));
    return h;
}

/// Uniform in (0, 1), counter-based.
inline double uniform_at(Seed stream, std::uint64_t counter) noexcept {
    const std::uint64_t bits = splitmix64(stream ^ splitmix64(counter));
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Inverse standard-normal CDF (Acklam's rational approximation, relative
/// error below 1.2e-9); logarithms only in the tails.
inline double inverse_normal_cdf(double p) noexcept {
    constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                            1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                            6.680131188771972e+01,  -1.328068155288572e+01};
    constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                            -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                            3.754408661907416e+00};
    constexpr double low = 0.02425;
    if (p < low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

/// Standard normal deviate for (stream, counter).
inline double normal_at(Seed stream, std::uint64_t counter) noexcept {
    return inverse_normal_cdf(uniform_at(stream, counter));
}

/// Seed domains keep training-time and evaluation-time streams disjoint.
enum class SeedDomain : std::uint64_t {
    Training = 0x7472616eULL,
    Evaluation = 0x6576616cULL,
    Deployment = 0x6465706cULL,
};

}  // namespace muxillum
