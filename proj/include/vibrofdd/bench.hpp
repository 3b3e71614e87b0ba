#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "vibrofdd/types.hpp"

namespace vibrofdd::bench {

// Seeded synthetic vibration source producing the three fault signatures:
//   misalignment         dominant 2x shaft harmonic plus a weaker 1x
//   structural looseness decaying 1x..6x harmonic series plus a 0.5x sub
//   bearing problem      impulse train at 3.57x shaft exciting a decaying
//                        resonance ring
// Axis gains (1.0, 0.8, 0.6) scale the deterministic part; white Gaussian
// noise is added independently per axis.
struct SynthSpec {
    FaultClass fault = FaultClass::Misalignment;
    double shaft_hz = 29.17;  // 1750 RPM
    double rate_hz = kDefaultRateHz;
    double duration_s = 0.64;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

inline constexpr double kBearingImpulseRatio = 3.57;   // impulses per shaft turn
inline constexpr double kBearingRingHz = 400.0;        // resonance ring
inline constexpr double kBearingRingDecayPerS = 200.0;
inline constexpr std::array<double, 3> kAxisGains = {1.0, 0.8, 0.6};

// Windows are generated independently from sub-stream (seed, window index),
// so parallel generation is bit-identical to sequential.
std::vector<VibrationWindow> synthesize(const SynthSpec& spec, std::size_t window_len = kDefaultWindowLen);

// Labeled dataset with per-window shaft jitter of +/-2% and fresh noise.
// Default counts (42, 118, 80) keep the class imbalance of the reference
// configuration.
std::vector<VibrationWindow> make_dataset(const std::array<std::size_t, 3>& per_class_counts,
                                          const SynthSpec& base_spec, std::uint64_t seed,
                                          std::size_t window_len = kDefaultWindowLen);

inline constexpr std::array<std::size_t, 3> kDefaultClassCounts = {42, 118, 80};

// Re-expresses a window as a record batch so synthetic data can flow
// through the real CSV ingestion path.
RecordBatch window_to_batch(const VibrationWindow& window);

}  // namespace vibrofdd::bench
