#pragma once

#include <cstdint>
#include <random>

namespace ssgl_gam {

/**
 * Seeded generator with fully specified streams.
 *
 * The engine is std::mt19937_64, whose output sequence the C++ standard
 * fixes. Every variate is derived here from raw 64-bit draws rather than
 * through <random> distributions (whose algorithms are implementation
 * defined), so a given seed yields the same data on any platform:
 *
 *   uniform     (next() >> 11) * 2^-53                  in [0,1)
 *   normal      Box-Muller, cosine branch only
 *   gamma       Marsaglia-Tsang; shape < 1 via U^(1/shape) boosting
 *   poisson     multiplicative inversion on chunks of mean <= 30
 *   below(n)    rejection sampling on the 64-bit draw
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform on (0,1].
    double uniform_pos() { return 1.0 - uniform(); }
    double normal();
    double gamma(double shape, double scale);
    std::uint64_t poisson(double mean);
    bool bernoulli(double prob) { return uniform() < prob; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 eng_;
};

/// splitmix64 mix of (base, stream): independent seeds for derived streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace ssgl_gam
