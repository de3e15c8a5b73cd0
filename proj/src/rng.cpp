#include "ssgl_gam/rng.hpp"

#include <cmath>
#include <numbers>

#include "ssgl_gam/errors.hpp"

namespace ssgl_gam {

double Rng::normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) throw ArgumentError("gamma variate needs positive shape and scale");
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0, 1.0);
        return scale * g * std::pow(uniform_pos(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

std::uint64_t Rng::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw ArgumentError("poisson variate needs a finite non-negative mean");
    constexpr double kChunk = 30.0;
    std::uint64_t total = 0;
    double left = mean;
    while (left > 0.0) {
        const double m = left > kChunk ? kChunk : left;
        left -= m;
        const double limit = std::exp(-m);
        double prod = uniform_pos();
        while (prod > limit) {
            ++total;
            prod *= uniform_pos();
        }
    }
    return total;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw ArgumentError("below(0) is empty");
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) return r % n;
    }
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace ssgl_gam
