#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>

namespace vibrofdd {

// SplitMix64: 64-bit state, one finalizer step per draw. Sub-streams are
// derived by mixing a stream index into the seed, so generation keyed by
// (seed, stream) is reproducible no matter which order streams are consumed
// in. This is what makes parallel per-window synthesis bit-identical to
// sequential synthesis.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one spare value cached between calls.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t integer(std::uint64_t n) {
        // Modulo bias is negligible for the small n used here.
        return (*this)() % n;
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix_seed(seed, stream));
}

// Named sub-streams hanging off the one user-facing seed. Every random
// decision in the pipeline draws from one of these; nothing shares a stream.
namespace streams {
inline constexpr std::uint64_t kSynthesis = 1;
inline constexpr std::uint64_t kTrainTestSplit = 2;
inline constexpr std::uint64_t kCrossValidation = 3;
inline constexpr std::uint64_t kBayesOpt = 4;
inline constexpr std::uint64_t kMlpInit = 5;
}  // namespace streams

}  // namespace vibrofdd
