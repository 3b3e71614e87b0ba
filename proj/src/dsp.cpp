#include "vibrofdd/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "vibrofdd/errors.hpp"
#include "vibrofdd/parallel.hpp"

namespace vibrofdd::dsp {

namespace {

// Iterative radix-2 Cooley-Tukey, decimation in time.
void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> step(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= step;
            }
        }
    }
}

struct FilterPair {
    std::vector<double> lo;
    std::vector<double> hi;
};

FilterPair wavelet_filters(WaveletFamily family) {
    static const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    if (family == WaveletFamily::Haar) {
        return {{inv_sqrt2, inv_sqrt2}, {inv_sqrt2, -inv_sqrt2}};
    }
    // Daubechies 4-tap scaling filter; the wavelet filter is the usual
    // alternating-sign reversal g_k = (-1)^k h_{3-k}.
    const double s3 = std::sqrt(3.0);
    const double d = 4.0 * std::numbers::sqrt2;
    const std::vector<double> h = {(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d};
    return {h, {h[3], -h[2], h[1], -h[0]}};
}

void analysis_step(const std::vector<double>& input, const FilterPair& f,
                   std::vector<double>& approx, std::vector<double>& detail) {
    const std::size_t n = input.size();
    const std::size_t half = n / 2;
    const std::size_t taps = f.lo.size();
    approx.assign(half, 0.0);
    detail.assign(half, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t m = 0; m < taps; ++m) {
            const double x = input[(2 * k + m) % n];
            a += f.lo[m] * x;
            d += f.hi[m] * x;
        }
        approx[k] = a;
        detail[k] = d;
    }
}

std::vector<double> synthesis_step(const std::vector<double>& approx,
                                   const std::vector<double>& detail,
                                   const FilterPair& f) {
    const std::size_t half = approx.size();
    const std::size_t n = 2 * half;
    const std::size_t taps = f.lo.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        for (std::size_t m = 0; m < taps; ++m) {
            out[(2 * k + m) % n] += f.lo[m] * approx[k] + f.hi[m] * detail[k];
        }
    }
    return out;
}

void check_wavelet_length(std::size_t n, int levels) {
    if (levels < 1) throw BadLength("wavelet levels must be >= 1");
    const std::size_t div = std::size_t{1} << levels;
    if (n == 0 || n % div != 0) {
        throw BadLength("signal length " + std::to_string(n) + " not divisible by 2^" + std::to_string(levels));
    }
    if (n / div < 2) {
        throw BadLength("signal length " + std::to_string(n) + " too short for " + std::to_string(levels) + " levels");
    }
}

}  // namespace

Spectrum fft_magnitude(const std::vector<double>& signal) {
    const std::size_t n = signal.size();
    if (!is_power_of_two(n) || n < 4) {
        throw BadLength("fft needs a power-of-two length >= 4, got " + std::to_string(n));
    }
    std::vector<std::complex<double>> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = {signal[i], 0.0};
    fft_radix2(a);

    Spectrum spec;
    spec.bin_spacing = 1.0 / static_cast<double>(n);
    spec.values.resize(n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        spec.values[k] = std::abs(a[k]) / static_cast<double>(n);
    }
    return spec;
}

Spectrum axis_mean_spectrum(const VibrationWindow& window) {
    if (window.x.size() != window.y.size() || window.x.size() != window.z.size()) {
        throw ShapeMismatch("window axes have unequal lengths");
    }
    Spectrum sx = fft_magnitude(window.x);
    const Spectrum sy = fft_magnitude(window.y);
    const Spectrum sz = fft_magnitude(window.z);
    for (std::size_t i = 0; i < sx.size(); ++i) {
        sx.values[i] = (sx.values[i] + sy.values[i] + sz.values[i]) / 3.0;
    }
    return sx;
}

FeatureVector spectral_gradient(const Spectrum& spec) {
    const std::size_t n = spec.size();
    if (n < 3) throw TooFewBins("spectral gradient needs at least 3 bins, got " + std::to_string(n));
    const double h = spec.bin_spacing;
    FeatureVector out;
    out.provenance = Provenance::RawDifferential;
    out.values.resize(n);
    const auto& v = spec.values;
    out.values[0] = (v[1] - v[0]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        out.values[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    out.values[n - 1] = (v[n - 1] - v[n - 2]) / h;
    return out;
}

WaveletPyramid dwt(const std::vector<double>& signal, const WaveletConfig& cfg) {
    check_wavelet_length(signal.size(), cfg.levels);
    const FilterPair f = wavelet_filters(cfg.family);

    WaveletPyramid pyr;
    pyr.details.resize(static_cast<std::size_t>(cfg.levels));
    std::vector<double> current = signal;
    for (int level = 0; level < cfg.levels; ++level) {
        std::vector<double> approx;
        std::vector<double> detail;
        analysis_step(current, f, approx, detail);
        pyr.details[static_cast<std::size_t>(level)] = std::move(detail);
        current = std::move(approx);
    }
    pyr.approx = std::move(current);
    return pyr;
}

std::vector<double> idwt(const WaveletPyramid& pyramid, const WaveletConfig& cfg) {
    if (pyramid.details.size() != static_cast<std::size_t>(cfg.levels)) {
        throw ShapeMismatch("pyramid has " + std::to_string(pyramid.details.size()) + " detail bands, config expects " +
                            std::to_string(cfg.levels));
    }
    const FilterPair f = wavelet_filters(cfg.family);
    std::vector<double> current = pyramid.approx;
    for (int level = cfg.levels - 1; level >= 0; --level) {
        const auto& detail = pyramid.details[static_cast<std::size_t>(level)];
        if (detail.size() != current.size()) {
            throw ShapeMismatch("detail band at level " + std::to_string(level) + " has length " +
                                std::to_string(detail.size()) + ", expected " + std::to_string(current.size()));
        }
        current = synthesis_step(current, detail, f);
    }
    return current;
}

double soft_shrink(double c, double tau) {
    const double mag = std::abs(c) - tau;
    return mag > 0.0 ? (c > 0.0 ? mag : -mag) : 0.0;
}

double hard_shrink(double c, double tau) {
    return std::abs(c) > tau ? c : 0.0;
}

double universal_threshold(const WaveletPyramid& pyramid, std::size_t signal_len) {
    const auto& finest = pyramid.details.front();
    std::vector<double> mags(finest.size());
    for (std::size_t i = 0; i < finest.size(); ++i) mags[i] = std::abs(finest[i]);
    std::sort(mags.begin(), mags.end());
    const std::size_t m = mags.size();
    const double median = m % 2 == 1 ? mags[m / 2] : 0.5 * (mags[m / 2 - 1] + mags[m / 2]);
    const double sigma_hat = median / 0.6745;
    return sigma_hat * std::sqrt(2.0 * std::log(static_cast<double>(signal_len)));
}

std::vector<double> wavelet_denoise(const std::vector<double>& values, const WaveletConfig& cfg) {
    if (values.empty()) throw BadLength("cannot denoise an empty sequence");
    const std::size_t min_len = std::size_t{1} << (cfg.levels + 1);
    std::size_t padded_len = next_power_of_two(std::max(values.size(), min_len));
    std::vector<double> padded = values;
    padded.resize(padded_len, 0.0);

    WaveletPyramid pyr = dwt(padded, cfg);
    const double tau = universal_threshold(pyr, padded_len);
    for (auto& band : pyr.details) {
        for (double& c : band) {
            c = cfg.shrinkage == Shrinkage::Soft ? soft_shrink(c, tau) : hard_shrink(c, tau);
        }
    }
    std::vector<double> rec = idwt(pyr, cfg);
    rec.resize(values.size());
    return rec;
}

FeatureVector extract_features(const VibrationWindow& window, const FeatureConfig& cfg) {
    FeatureVector out;
    if (cfg.denoise_raw_axes) {
        VibrationWindow denoised = window;
        denoised.x = wavelet_denoise(window.x, cfg.wavelet);
        denoised.y = wavelet_denoise(window.y, cfg.wavelet);
        denoised.z = wavelet_denoise(window.z, cfg.wavelet);
        out = spectral_gradient(axis_mean_spectrum(denoised));
    } else {
        FeatureVector grad = spectral_gradient(axis_mean_spectrum(window));
        out.values = wavelet_denoise(grad.values, cfg.wavelet);
    }
    out.provenance = Provenance::Denoised;
    return out;
}

Matrix extract_feature_matrix(const std::vector<VibrationWindow>& windows, const FeatureConfig& cfg) {
    if (windows.empty()) return {};
    const std::size_t len = windows.front().size();
    for (const auto& w : windows) {
        if (w.size() != len) throw DimMismatch("inconsistent window lengths in dataset");
    }
    // First window runs up front; any configuration problem surfaces here
    // instead of inside a worker thread.
    const FeatureVector first = extract_features(windows.front(), cfg);
    const std::size_t d = first.values.size();
    Matrix out(windows.size(), d, 0.0);
    for (std::size_t j = 0; j < d; ++j) out(0, j) = first.values[j];
    parallel_for(windows.size() - 1, [&](std::size_t k) {
        const std::size_t i = k + 1;
        const FeatureVector f = extract_features(windows[i], cfg);
        for (std::size_t j = 0; j < d; ++j) out(i, j) = f.values[j];
    });
    return out;
}

Spectrum welch_psd(const std::vector<double>& signal, std::size_t segment_len, double overlap_fraction) {
    if (!is_power_of_two(segment_len) || segment_len < 4) {
        throw BadSegment("segment length must be a power of two >= 4");
    }
    if (segment_len > signal.size()) {
        throw BadSegment("segment length " + std::to_string(segment_len) + " exceeds signal length " +
                         std::to_string(signal.size()));
    }
    if (!(overlap_fraction >= 0.0 && overlap_fraction <= 0.9)) {
        throw BadSegment("overlap fraction must be in [0, 0.9]");
    }

    const std::size_t hop =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround((1.0 - overlap_fraction) * static_cast<double>(segment_len))));

    std::vector<double> window(segment_len);
    double window_energy = 0.0;
    for (std::size_t m = 0; m < segment_len; ++m) {
        window[m] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(segment_len));
        window_energy += window[m] * window[m];
    }

    Spectrum psd;
    psd.bin_spacing = 1.0 / static_cast<double>(segment_len);
    psd.values.assign(segment_len / 2 + 1, 0.0);

    std::size_t segments = 0;
    std::vector<double> buf(segment_len);
    for (std::size_t start = 0; start + segment_len <= signal.size(); start += hop) {
        for (std::size_t m = 0; m < segment_len; ++m) buf[m] = signal[start + m] * window[m];
        const Spectrum mag = fft_magnitude(buf);
        // |X_k|^2 / sum(w^2); fft_magnitude already divided by N once.
        const double n2 = static_cast<double>(segment_len) * static_cast<double>(segment_len);
        for (std::size_t k = 0; k < psd.values.size(); ++k) {
            psd.values[k] += mag.values[k] * mag.values[k] * n2 / window_energy;
        }
        ++segments;
    }
    for (double& v : psd.values) v /= static_cast<double>(segments);
    return psd;
}

Spectrum welch_psd_db(const std::vector<double>& signal, std::size_t segment_len, double overlap_fraction) {
    Spectrum psd = welch_psd(signal, segment_len, overlap_fraction);
    for (double& v : psd.values) {
        v = v > 1e-30 ? 10.0 * std::log10(v) : kPsdFloorDb;
    }
    return psd;
}

}  // namespace vibrofdd::dsp
