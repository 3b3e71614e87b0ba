#include "vibrofdd/bundle.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

#include <json.hpp>

#include "vibrofdd/errors.hpp"
#include "vibrofdd/io.hpp"

namespace vibrofdd::bundle {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array()) throw DataError("bundle: expected an array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = rows > 0 ? j.at(0).size() : 0;
    Matrix m(rows, cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& row = j.at(r);
        if (row.size() != cols) throw DataError("bundle: ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
    }
    return m;
}

json standardizer_to_json(const svm::Standardizer& s) {
    return json{{"mean", s.mean}, {"std", s.std_dev}};
}

svm::Standardizer standardizer_from_json(const json& j) {
    svm::Standardizer s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.std_dev = j.at("std").get<std::vector<double>>();
    return s;
}

const char* family_name(dsp::WaveletFamily f) {
    return f == dsp::WaveletFamily::Haar ? "haar" : "daubechies4";
}

dsp::WaveletFamily family_from_name(const std::string& name) {
    if (name == "haar") return dsp::WaveletFamily::Haar;
    if (name == "daubechies4") return dsp::WaveletFamily::Daubechies4;
    throw DataError("bundle: unknown wavelet family '" + name + "'");
}

}  // namespace

ModelKind ModelBundle::kind() const {
    if (svm_model) return ModelKind::Svm;
    if (mlp_model) return ModelKind::Mlp;
    throw DataError("bundle holds no model");
}

std::string to_json_text(const ModelBundle& bundle) {
    json j;
    j["format_version"] = bundle.format_version;

    j["pipeline"] = {
        {"window_len", bundle.pipeline.window_len},
        {"hop", bundle.pipeline.hop},
        {"wavelet",
         {{"family", family_name(bundle.pipeline.features.wavelet.family)},
          {"levels", bundle.pipeline.features.wavelet.levels},
          {"threshold_rule", "universal"},
          {"shrinkage", bundle.pipeline.features.wavelet.shrinkage == dsp::Shrinkage::Soft ? "soft" : "hard"}}},
        {"denoise_raw_axes", bundle.pipeline.features.denoise_raw_axes},
        {"standardize_before_pca", bundle.pipeline.standardize_before_pca},
    };

    j["feature_standardizer"] =
        bundle.feature_standardizer ? standardizer_to_json(*bundle.feature_standardizer) : json(nullptr);

    j["pca"] = {
        {"mean", bundle.pca_model.mean},
        {"components", matrix_to_json(bundle.pca_model.components)},
        {"explained_variance", bundle.pca_model.explained_variance},
    };

    if (bundle.svm_model) {
        const auto& m = *bundle.svm_model;
        json learners = json::array();
        for (const auto& l : m.learners) {
            learners.push_back({
                {"bias", l.bias},
                {"dual_coefs", l.dual_coefs},
                {"support_vectors", matrix_to_json(l.support_vectors)},
                {"kernel", {{"kind", "gaussian"}, {"scale", l.kernel.scale}}},
                {"box_constraint", l.box_constraint},
                {"standardizer", l.standardizer ? standardizer_to_json(*l.standardizer) : json(nullptr)},
                {"converged", l.converged},
                {"kkt_violation", l.final_kkt_violation},
                {"dual_objective", l.dual_objective},
                {"iterations", l.iterations},
            });
        }
        json coding = json::array();
        for (const auto& row : m.coding) coding.push_back(row);
        json order = json::array();
        for (const FaultClass c : m.class_order) order.push_back(static_cast<int>(c));
        j["svm"] = {{"learners", std::move(learners)}, {"coding", std::move(coding)}, {"class_order", std::move(order)}};
    } else {
        j["svm"] = nullptr;
    }

    if (bundle.mlp_model) {
        const auto& m = *bundle.mlp_model;
        json weights = json::array();
        json biases = json::array();
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            weights.push_back(m.weights[l].data());  // row-major
            biases.push_back(m.biases[l]);
        }
        j["mlp"] = {{"layer_sizes", m.layer_sizes}, {"weights", std::move(weights)}, {"biases", std::move(biases)}};
    } else {
        j["mlp"] = nullptr;
    }

    j["metadata"] = {
        {"seed", bundle.metadata.seed},
        {"timestamp_unix", bundle.metadata.timestamp_unix},
        {"dataset_fingerprint", bundle.metadata.dataset_fingerprint},
        {"tuned", bundle.metadata.tuned},
        {"cv_error", bundle.metadata.cv_error},
        {"validation_accuracy", bundle.metadata.validation_accuracy},
        {"test20_accuracy", bundle.metadata.test20_accuracy},
        {"iterations", bundle.metadata.iterations},
    };

    return j.dump(2) + "\n";
}

ModelBundle from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("bundle parse error: ") + e.what());
    }
    try {
        const int version = j.at("format_version").get<int>();
        if (version != kFormatVersion) throw VersionMismatch(version, kFormatVersion);

        ModelBundle b;
        b.format_version = version;

        const auto& p = j.at("pipeline");
        b.pipeline.window_len = p.at("window_len").get<std::size_t>();
        b.pipeline.hop = p.at("hop").get<std::size_t>();
        const auto& w = p.at("wavelet");
        b.pipeline.features.wavelet.family = family_from_name(w.at("family").get<std::string>());
        b.pipeline.features.wavelet.levels = w.at("levels").get<int>();
        b.pipeline.features.wavelet.shrinkage =
            w.at("shrinkage").get<std::string>() == "hard" ? dsp::Shrinkage::Hard : dsp::Shrinkage::Soft;
        b.pipeline.features.denoise_raw_axes = p.at("denoise_raw_axes").get<bool>();
        b.pipeline.standardize_before_pca = p.at("standardize_before_pca").get<bool>();

        if (!j.at("feature_standardizer").is_null()) {
            b.feature_standardizer = standardizer_from_json(j.at("feature_standardizer"));
        }

        const auto& pcaj = j.at("pca");
        b.pca_model.mean = pcaj.at("mean").get<std::vector<double>>();
        b.pca_model.components = matrix_from_json(pcaj.at("components"));
        b.pca_model.explained_variance = pcaj.at("explained_variance").get<std::vector<double>>();

        if (!j.at("svm").is_null()) {
            const auto& s = j.at("svm");
            svm::MulticlassSvm m;
            for (const auto& lj : s.at("learners")) {
                svm::BinarySvm l;
                l.bias = lj.at("bias").get<double>();
                l.dual_coefs = lj.at("dual_coefs").get<std::vector<double>>();
                l.support_vectors = matrix_from_json(lj.at("support_vectors"));
                l.kernel.scale = lj.at("kernel").at("scale").get<double>();
                l.box_constraint = lj.at("box_constraint").get<double>();
                if (!lj.at("standardizer").is_null()) l.standardizer = standardizer_from_json(lj.at("standardizer"));
                l.converged = lj.at("converged").get<bool>();
                l.final_kkt_violation = lj.at("kkt_violation").get<double>();
                l.dual_objective = lj.at("dual_objective").get<double>();
                l.iterations = lj.at("iterations").get<std::size_t>();
                m.learners.push_back(std::move(l));
            }
            for (const auto& row : s.at("coding")) m.coding.push_back(row.get<std::vector<int>>());
            for (const auto& c : s.at("class_order")) m.class_order.push_back(fault_class_from_code(c.get<int>()));
            b.svm_model = std::move(m);
        }

        if (!j.at("mlp").is_null()) {
            const auto& mj = j.at("mlp");
            mlp::MlpModel m;
            m.layer_sizes = mj.at("layer_sizes").get<std::vector<std::size_t>>();
            const auto& weights = mj.at("weights");
            const auto& biases = mj.at("biases");
            for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
                Matrix wm(m.layer_sizes[l + 1], m.layer_sizes[l], 0.0);
                const auto flat = weights.at(l).get<std::vector<double>>();
                if (flat.size() != wm.rows() * wm.cols()) throw DataError("bundle: weight shape mismatch");
                wm.data() = flat;
                m.weights.push_back(std::move(wm));
                m.biases.push_back(biases.at(l).get<std::vector<double>>());
            }
            b.mlp_model = std::move(m);
        }

        const auto& meta = j.at("metadata");
        b.metadata.seed = meta.at("seed").get<std::uint64_t>();
        b.metadata.timestamp_unix = meta.at("timestamp_unix").get<std::int64_t>();
        b.metadata.dataset_fingerprint = meta.at("dataset_fingerprint").get<std::string>();
        b.metadata.tuned = meta.at("tuned").get<bool>();
        b.metadata.cv_error = meta.at("cv_error").get<double>();
        b.metadata.validation_accuracy = meta.at("validation_accuracy").get<double>();
        b.metadata.test20_accuracy = meta.at("test20_accuracy").get<double>();
        b.metadata.iterations = meta.at("iterations").get<std::size_t>();
        return b;
    } catch (const json::exception& e) {
        throw DataError(std::string("bundle field error: ") + e.what());
    }
}

void save(const ModelBundle& bundle, const std::filesystem::path& path) {
    atomic_write_file(path, to_json_text(bundle));
}

ModelBundle load(const std::filesystem::path& path) {
    return from_json_text(read_text_file(path));
}

std::string dataset_fingerprint(const std::filesystem::path& dir) {
    std::vector<std::pair<std::string, std::uintmax_t>> entries;
    if (std::filesystem::is_directory(dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.is_regular_file()) {
                entries.emplace_back(entry.path().filename().string(), entry.file_size());
            }
        }
    }
    std::sort(entries.begin(), entries.end());
    std::uint64_t hash = 0xCBF29CE484222325ULL;  // FNV-1a
    auto mix = [&hash](const std::string& s) {
        for (const char ch : s) {
            hash ^= static_cast<unsigned char>(ch);
            hash *= 0x100000001B3ULL;
        }
    };
    for (const auto& [name, size] : entries) {
        mix(name);
        mix(":" + std::to_string(size) + ";");
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::vector<double> reduced_features(const ModelBundle& bundle, const VibrationWindow& window) {
    dsp::FeatureVector features = dsp::extract_features(window, bundle.pipeline.features);
    std::vector<double> values = std::move(features.values);
    if (bundle.feature_standardizer) values = bundle.feature_standardizer->apply(values);
    return pca::transform_row(bundle.pca_model, values);
}

WindowPrediction predict_window(const ModelBundle& bundle, const VibrationWindow& window) {
    const std::vector<double> z = reduced_features(bundle, window);
    WindowPrediction out;
    if (bundle.svm_model) {
        svm::Prediction pred = svm::ova_predict(*bundle.svm_model, z);
        out.label = pred.label;
        out.scores = std::move(pred.losses);
    } else if (bundle.mlp_model) {
        const std::vector<double> probs = mlp::forward(*bundle.mlp_model, z);
        out.scores = probs;
        out.label = mlp::predict(*bundle.mlp_model, z);
    } else {
        throw DataError("bundle holds no model");
    }
    return out;
}

}  // namespace vibrofdd::bundle
