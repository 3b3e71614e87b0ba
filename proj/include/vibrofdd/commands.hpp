#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "vibrofdd/bench.hpp"
#include "vibrofdd/bundle.hpp"

namespace vibrofdd::cli {

// Command implementations shared by the binary and the test suites. Each
// throws DataError/NumericError on failure; the binary maps those to exit
// codes 2 and 3.

struct SynthOptions {
    std::filesystem::path out_dir;
    std::array<std::size_t, 3> counts = bench::kDefaultClassCounts;
    std::uint64_t seed = 7;
    double noise_sigma = 0.1;
    double shaft_hz = 29.17;
    double rate_hz = kDefaultRateHz;
    std::size_t window_len = kDefaultWindowLen;
};

void cmd_synth(const SynthOptions& opt);

struct IngestCheckOptions {
    std::filesystem::path data_dir;
    double tolerance_fraction = 0.05;
    double nominal_rate_hz = kDefaultRateHz;
};

// Returns the number of flagged files; per-file lines go to `out`.
std::size_t cmd_ingest_check(const IngestCheckOptions& opt, std::ostream& out);

struct FeaturesOptions {
    std::filesystem::path data_dir;
    std::filesystem::path out_file;
    std::size_t window_len = kDefaultWindowLen;
    std::size_t hop = kDefaultWindowLen;
    dsp::FeatureConfig features;
    double nominal_rate_hz = kDefaultRateHz;
};

void cmd_features(const FeaturesOptions& opt);

struct TrainOptions {
    std::filesystem::path data_dir;
    std::filesystem::path out_bundle;
    std::string model = "svm";  // "svm" or "nn"
    std::size_t tune_iters = 0;  // 0 = fixed hyperparameters
    std::size_t pca_components = 18;
    std::uint64_t seed = 7;
    std::size_t window_len = kDefaultWindowLen;
    std::size_t hop = kDefaultWindowLen;
    dsp::FeatureConfig features;
    bool standardize_before_pca = false;
    double svm_box_constraint = 300.0;
    double svm_kernel_scale = 23.12;
    bool svm_standardize = false;
    std::size_t nn_max_iter = 200;
    std::size_t k_folds = 5;
    double nominal_rate_hz = kDefaultRateHz;
};

void cmd_train(const TrainOptions& opt, std::ostream& log);

struct PredictOptions {
    std::filesystem::path bundle_path;
    std::filesystem::path data_dir;
    std::filesystem::path out_file;
    double nominal_rate_hz = kDefaultRateHz;
};

void cmd_predict(const PredictOptions& opt);

struct EvaluateOptions {
    std::vector<std::filesystem::path> bundle_paths;  // one, or two with compare
    std::filesystem::path data_dir;
    std::filesystem::path out_dir;
    std::size_t repeats = 5;
    double nominal_rate_hz = kDefaultRateHz;
};

void cmd_evaluate(const EvaluateOptions& opt, std::ostream& log);

struct PsdOptions {
    std::optional<std::filesystem::path> input_file;
    std::optional<std::filesystem::path> data_dir;
    std::filesystem::path out_file;
    std::size_t segment_len = kDefaultWindowLen;
    double overlap_fraction = 0.5;
    bool envelope = false;
    std::string axis = "x";  // x, y, z, or mean
    double nominal_rate_hz = kDefaultRateHz;
};

void cmd_psd(const PsdOptions& opt);

}  // namespace vibrofdd::cli
