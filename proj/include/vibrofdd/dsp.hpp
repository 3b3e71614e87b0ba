#pragma once

#include <cstddef>
#include <vector>

#include "vibrofdd/matrix.hpp"
#include "vibrofdd/types.hpp"

namespace vibrofdd::dsp {

// Uniformly spaced spectrum over normalized frequency [0, 0.5].
// values holds magnitudes (or dB for the Welch estimate); bin i sits at
// frequency i * bin_spacing.
struct Spectrum {
    std::vector<double> values;
    double bin_spacing = 0.0;

    std::size_t size() const { return values.size(); }
    double frequency(std::size_t i) const { return static_cast<double>(i) * bin_spacing; }
};

enum class WaveletFamily { Haar, Daubechies4 };
enum class ThresholdRule { Universal };
enum class Shrinkage { Soft, Hard };

struct WaveletConfig {
    WaveletFamily family = WaveletFamily::Daubechies4;
    int levels = 3;
    ThresholdRule threshold_rule = ThresholdRule::Universal;
    Shrinkage shrinkage = Shrinkage::Soft;
};

enum class Provenance { RawDifferential, Denoised, PcaReduced };

struct FeatureVector {
    std::vector<double> values;
    Provenance provenance = Provenance::RawDifferential;
};

// details[0] is the finest band, details[levels-1] the coarsest;
// approx is the deepest-level approximation.
struct WaveletPyramid {
    std::vector<double> approx;
    std::vector<std::vector<double>> details;
};

// Magnitude spectrum |DFT|/N over the N/2+1 non-negative frequency bins.
// N must be a power of two.
Spectrum fft_magnitude(const std::vector<double>& signal);

// Per-bin arithmetic mean of the three per-axis magnitude spectra.
Spectrum axis_mean_spectrum(const VibrationWindow& window);

// d(magnitude)/d(normalized frequency): central differences inside,
// one-sided at the two ends.
FeatureVector spectral_gradient(const Spectrum& spec);

// Orthonormal DWT with periodic boundary extension. Length must be
// divisible by 2^levels and leave at least 2 samples at the deepest level.
WaveletPyramid dwt(const std::vector<double>& signal, const WaveletConfig& cfg);
std::vector<double> idwt(const WaveletPyramid& pyramid, const WaveletConfig& cfg);

double soft_shrink(double c, double tau);
double hard_shrink(double c, double tau);

// Universal threshold sigma_hat * sqrt(2 ln N) with sigma_hat estimated as
// median(|finest details|) / 0.6745. N is the (padded) signal length.
double universal_threshold(const WaveletPyramid& pyramid, std::size_t signal_len);

// dwt -> shrink detail coefficients -> idwt. The approximation band is left
// untouched. Inputs whose length is not a power of two are zero-padded to
// the next power of two and truncated after reconstruction.
std::vector<double> wavelet_denoise(const std::vector<double>& values, const WaveletConfig& cfg);

struct FeatureConfig {
    WaveletConfig wavelet;
    // When set, each axis is denoised before the spectrum is taken instead
    // of denoising the differential features afterwards.
    bool denoise_raw_axes = false;
};

// axis_mean_spectrum -> spectral_gradient -> wavelet_denoise.
FeatureVector extract_features(const VibrationWindow& window, const FeatureConfig& cfg);

// Parallel map of extract_features over the windows; each window writes its
// own row, so the result is bit-identical for any thread count.
Matrix extract_feature_matrix(const std::vector<VibrationWindow>& windows, const FeatureConfig& cfg);

// Hann-windowed averaged periodogram, linear power scale. Relative scaling
// only (periodograms are normalized by the window energy).
Spectrum welch_psd(const std::vector<double>& signal, std::size_t segment_len, double overlap_fraction);

// 10*log10(power), floored at -300 dB.
Spectrum welch_psd_db(const std::vector<double>& signal, std::size_t segment_len, double overlap_fraction);

inline constexpr double kPsdFloorDb = -300.0;

}  // namespace vibrofdd::dsp
