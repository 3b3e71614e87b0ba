#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "vibrofdd/dsp.hpp"
#include "vibrofdd/mlp.hpp"
#include "vibrofdd/pca.hpp"
#include "vibrofdd/svm.hpp"

namespace vibrofdd::bundle {

inline constexpr int kFormatVersion = 1;

struct PipelineConfig {
    std::size_t window_len = kDefaultWindowLen;
    std::size_t hop = kDefaultWindowLen;
    dsp::FeatureConfig features;
    bool standardize_before_pca = false;
};

enum class ModelKind { Svm, Mlp };

struct Metadata {
    std::uint64_t seed = 0;
    // Unix time taken from SOURCE_DATE_EPOCH so identically seeded runs
    // stay byte-identical; 0 when the variable is unset.
    std::int64_t timestamp_unix = 0;
    std::string dataset_fingerprint;
    bool tuned = false;
    double cv_error = 0.0;
    double validation_accuracy = 0.0;
    double test20_accuracy = 0.0;
    std::size_t iterations = 0;
};

// Everything needed to classify a raw window: pipeline configuration, the
// fitted PCA, and the trained model(s).
struct ModelBundle {
    int format_version = kFormatVersion;
    PipelineConfig pipeline;
    std::optional<svm::Standardizer> feature_standardizer;  // before PCA
    pca::PcaModel pca_model;
    std::optional<svm::MulticlassSvm> svm_model;
    std::optional<mlp::MlpModel> mlp_model;
    Metadata metadata;

    ModelKind kind() const;
};

std::string to_json_text(const ModelBundle& bundle);
ModelBundle from_json_text(const std::string& text);

void save(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load(const std::filesystem::path& path);

// 64-bit FNV-1a over sorted "name:size" pairs, for provenance warnings.
std::string dataset_fingerprint(const std::filesystem::path& dir);

// Full pipeline on one raw window: features, optional standardization, PCA
// projection, then the bundled classifier.
struct WindowPrediction {
    FaultClass label = FaultClass::StructuralLooseness;
    std::vector<double> scores;  // per-class hinge losses (svm) or probabilities (mlp)
};

WindowPrediction predict_window(const ModelBundle& bundle, const VibrationWindow& window);

// Feature + PCA stage only (used when fitting models on whole datasets).
std::vector<double> reduced_features(const ModelBundle& bundle, const VibrationWindow& window);

}  // namespace vibrofdd::bundle
