#include "vibrofdd/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vibrofdd/errors.hpp"
#include "vibrofdd/rng.hpp"

namespace vibrofdd::bench {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_spec(const SynthSpec& spec, std::size_t window_len) {
    if (!(spec.shaft_hz > 0.0) || !(spec.rate_hz > 4.0 * spec.shaft_hz)) {
        throw BadSpec("rate_hz must exceed 4x shaft_hz");
    }
    if (!(spec.duration_s > 0.0) || spec.duration_s * spec.rate_hz < 1024.0) {
        throw BadSpec("duration_s * rate_hz must be at least 1024");
    }
    if (spec.noise_sigma < 0.0) throw BadSpec("noise_sigma must be non-negative");
    if (!is_power_of_two(window_len) || window_len < 64) {
        throw BadSpec("window length must be a power of two >= 64");
    }
}

// Deterministic signature for one window. Phase draws come first on the
// stream so the noise draws that follow never shift between classes.
std::vector<double> signature(const SynthSpec& spec, std::size_t window_len, SplitMix64& rng) {
    const double dt = 1.0 / spec.rate_hz;
    std::vector<double> s(window_len, 0.0);

    switch (spec.fault) {
        case FaultClass::Misalignment: {
            const double p2 = rng.uniform(0.0, kTwoPi);
            const double p1 = rng.uniform(0.0, kTwoPi);
            for (std::size_t k = 0; k < window_len; ++k) {
                const double t = static_cast<double>(k) * dt;
                s[k] = 1.0 * std::sin(kTwoPi * 2.0 * spec.shaft_hz * t + p2) +
                       0.4 * std::sin(kTwoPi * spec.shaft_hz * t + p1);
            }
            break;
        }
        case FaultClass::StructuralLooseness: {
            double phases[7];
            for (double& p : phases) p = rng.uniform(0.0, kTwoPi);
            for (std::size_t k = 0; k < window_len; ++k) {
                const double t = static_cast<double>(k) * dt;
                double v = 0.0;
                for (int h = 1; h <= 6; ++h) {
                    const double amp = 0.8 * std::pow(0.7, h - 1);
                    v += amp * std::sin(kTwoPi * h * spec.shaft_hz * t + phases[h - 1]);
                }
                v += 0.3 * std::sin(kTwoPi * 0.5 * spec.shaft_hz * t + phases[6]);
                s[k] = v;
            }
            break;
        }
        case FaultClass::BearingProblem: {
            const double impulse_rate = kBearingImpulseRatio * spec.shaft_hz;
            const double offset = rng.uniform();  // impulse train alignment
            const double duration = static_cast<double>(window_len) * dt;
            // A ring decays below 1e-4 of its peak after ~9 time constants.
            const double reach = 9.0 / kBearingRingDecayPerS;
            for (std::size_t k = 0; k < window_len; ++k) {
                const double t = static_cast<double>(k) * dt;
                const long first = static_cast<long>(std::ceil((t - reach) * impulse_rate - offset));
                double v = 0.0;
                for (long i = std::max(0L, first);; ++i) {
                    const double ti = (static_cast<double>(i) + offset) / impulse_rate;
                    if (ti > t || ti > duration) break;
                    const double age = t - ti;
                    v += std::exp(-kBearingRingDecayPerS * age) * std::sin(kTwoPi * kBearingRingHz * age);
                }
                s[k] = v;
            }
            break;
        }
    }
    return s;
}

}  // namespace

std::vector<VibrationWindow> synthesize(const SynthSpec& spec, std::size_t window_len) {
    check_spec(spec, window_len);
    const auto total = static_cast<std::size_t>(spec.duration_s * spec.rate_hz);
    const std::size_t n_windows = total / window_len;
    if (n_windows == 0) throw BadSpec("duration too short for one window");

    std::vector<VibrationWindow> windows(n_windows);
    for (std::size_t w = 0; w < n_windows; ++w) {
        SplitMix64 rng = substream(spec.seed, w);
        const std::vector<double> s = signature(spec, window_len, rng);

        VibrationWindow win;
        win.rate_hz = spec.rate_hz;
        win.label = spec.fault;
        std::vector<double>* axes[3] = {&win.x, &win.y, &win.z};
        for (std::size_t a = 0; a < 3; ++a) {
            axes[a]->resize(window_len);
            for (std::size_t k = 0; k < window_len; ++k) {
                double v = kAxisGains[a] * s[k];
                if (spec.noise_sigma > 0.0) v += spec.noise_sigma * rng.gaussian();
                (*axes[a])[k] = v;
            }
        }
        windows[w] = std::move(win);
    }
    return windows;
}

std::vector<VibrationWindow> make_dataset(const std::array<std::size_t, 3>& per_class_counts,
                                          const SynthSpec& base_spec, std::uint64_t seed,
                                          std::size_t window_len) {
    for (const std::size_t c : per_class_counts) {
        if (c < 1) throw BadSpec("per-class counts must be >= 1");
    }
    std::vector<VibrationWindow> out;
    out.reserve(per_class_counts[0] + per_class_counts[1] + per_class_counts[2]);
    for (int c = 0; c < kNumClasses; ++c) {
        const std::uint64_t class_seed = mix_seed(mix_seed(seed, streams::kSynthesis), static_cast<std::uint64_t>(c));
        for (std::size_t i = 0; i < per_class_counts[static_cast<std::size_t>(c)]; ++i) {
            SplitMix64 jitter_rng = substream(class_seed, i);
            SynthSpec spec = base_spec;
            spec.fault = static_cast<FaultClass>(c);
            spec.shaft_hz = base_spec.shaft_hz * (1.0 + 0.02 * jitter_rng.uniform(-1.0, 1.0));
            spec.duration_s = static_cast<double>(std::max<std::size_t>(window_len, 1024)) / spec.rate_hz;
            spec.seed = jitter_rng();
            std::vector<VibrationWindow> windows = synthesize(spec, window_len);
            out.push_back(std::move(windows.front()));
        }
    }
    return out;
}

RecordBatch window_to_batch(const VibrationWindow& window) {
    RecordBatch batch;
    batch.nominal_rate_hz = window.rate_hz;
    batch.records.resize(window.size());
    for (std::size_t k = 0; k < window.size(); ++k) {
        VibrationRecord& r = batch.records[k];
        r.t = static_cast<double>(k) / window.rate_hz;
        r.ax = window.x[k];
        r.ay = window.y[k];
        r.az = window.z[k];
    }
    return batch;
}

}  // namespace vibrofdd::bench
