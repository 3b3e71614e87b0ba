#include "vibrofdd/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <set>

#include "vibrofdd/errors.hpp"
#include "vibrofdd/eval.hpp"
#include "vibrofdd/hpo.hpp"
#include "vibrofdd/ingest.hpp"
#include "vibrofdd/io.hpp"
#include "vibrofdd/rng.hpp"

namespace vibrofdd::cli {

namespace {

std::int64_t timestamp_from_env() {
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        try {
            return std::stoll(env);
        } catch (...) {
        }
    }
    return 0;
}

struct LoadedDataset {
    std::vector<VibrationWindow> windows;
    std::vector<FaultClass> labels;  // parallel to windows, when labeled
};

LoadedDataset load_labeled_windows(const std::filesystem::path& dir, std::size_t window_len, std::size_t hop,
                                   double nominal_rate_hz) {
    const auto files = ingest::load_dataset_dir(dir, nominal_rate_hz, /*require_labels=*/true);
    LoadedDataset out;
    out.windows = ingest::window_dataset(files, window_len, hop);
    out.labels.reserve(out.windows.size());
    for (const auto& w : out.windows) {
        if (!w.label) throw DatasetError("unlabeled window in labeled dataset from " + dir.string());
        out.labels.push_back(*w.label);
    }
    if (out.windows.empty()) throw DatasetError("no windows in dataset " + dir.string());
    return out;
}

std::vector<double> axis_signal(const RecordBatch& batch, const std::string& axis) {
    std::vector<double> signal(batch.records.size());
    for (std::size_t i = 0; i < batch.records.size(); ++i) {
        const auto& r = batch.records[i];
        if (axis == "x") signal[i] = r.ax;
        else if (axis == "y") signal[i] = r.ay;
        else if (axis == "z") signal[i] = r.az;
        else if (axis == "mean") signal[i] = (r.ax + r.ay + r.az) / 3.0;
        else throw DataError("unknown axis '" + axis + "'");
    }
    return signal;
}

// Rectified signal with its mean removed; the standard Hilbert-free
// envelope for impulse-rate analysis.
std::vector<double> envelope_signal(std::vector<double> signal) {
    double mean = 0.0;
    for (double& v : signal) {
        v = std::abs(v);
        mean += v;
    }
    mean /= static_cast<double>(signal.size());
    for (double& v : signal) v -= mean;
    return signal;
}

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

// Stratified 80/20 split, seeded; classes with fewer than 2 samples stay in
// the training side.
SplitIndices stratified_split(const std::vector<FaultClass>& labels, std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> per_class(kNumClasses);
    for (std::size_t i = 0; i < labels.size(); ++i) per_class[static_cast<std::size_t>(labels[i])].push_back(i);
    SplitIndices split;
    for (int c = 0; c < kNumClasses; ++c) {
        auto& idx = per_class[static_cast<std::size_t>(c)];
        SplitMix64 rng = substream(mix_seed(seed, streams::kTrainTestSplit), static_cast<std::uint64_t>(c));
        for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.integer(i)]);
        const std::size_t n_test = idx.size() >= 2 ? std::max<std::size_t>(1, idx.size() / 5) : 0;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            (i < n_test ? split.test : split.train).push_back(idx[i]);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

Matrix take_rows(const Matrix& x, const std::vector<std::size_t>& idx) {
    Matrix out(idx.size(), x.cols(), 0.0);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(idx[r], c);
    }
    return out;
}

std::vector<FaultClass> take_labels(const std::vector<FaultClass>& labels, const std::vector<std::size_t>& idx) {
    std::vector<FaultClass> out(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) out[r] = labels[idx[r]];
    return out;
}

FaultClass classify_reduced(const bundle::ModelBundle& b, std::span<const double> z) {
    if (b.svm_model) return svm::ova_predict(*b.svm_model, z).label;
    return mlp::predict(*b.mlp_model, z);
}

std::filesystem::path timing_sidecar(const std::filesystem::path& bundle_path) {
    return bundle_path.string() + ".timing.csv";
}

}  // namespace

void cmd_synth(const SynthOptions& opt) {
    bench::SynthSpec base;
    base.shaft_hz = opt.shaft_hz;
    base.rate_hz = opt.rate_hz;
    base.noise_sigma = opt.noise_sigma;

    const std::vector<VibrationWindow> windows = bench::make_dataset(opt.counts, base, opt.seed, opt.window_len);

    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec || !std::filesystem::is_directory(opt.out_dir)) {
        throw IoError("cannot create output directory: " + opt.out_dir.string());
    }

    std::vector<std::pair<std::string, FaultClass>> manifest;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "win_%04zu.csv", i);
        atomic_write_file(opt.out_dir / name, ingest::to_csv(bench::window_to_batch(windows[i])));
        manifest.emplace_back(name, *windows[i].label);
    }
    atomic_write_file(opt.out_dir / "manifest.csv", ingest::manifest_to_csv(manifest));
}

std::size_t cmd_ingest_check(const IngestCheckOptions& opt, std::ostream& out) {
    const auto files = ingest::load_dataset_dir(opt.data_dir, opt.nominal_rate_hz, /*require_labels=*/false);
    if (files.empty()) throw DatasetError("no CSV files in " + opt.data_dir.string());
    std::size_t flagged = 0;
    for (const auto& f : files) {
        const ingest::RateReport report = ingest::validate_rate(f.batch, opt.tolerance_fraction);
        out << f.name << ": records=" << f.batch.records.size() << " median_dt=" << format_double(report.median_interval_s)
            << "s implied_rate=" << format_double(report.implied_rate_hz) << "Hz nominal="
            << format_double(report.nominal_rate_hz) << "Hz deviation=" << format_double(report.deviation_fraction)
            << (report.flagged ? " FLAGGED" : " ok") << "\n";
        if (report.flagged) ++flagged;
    }
    out << files.size() << " files checked, " << flagged << " flagged\n";
    return flagged;
}

void cmd_features(const FeaturesOptions& opt) {
    const auto files = ingest::load_dataset_dir(opt.data_dir, opt.nominal_rate_hz, /*require_labels=*/false);
    const auto windows = ingest::window_dataset(files, opt.window_len, opt.hop);
    if (windows.empty()) throw DatasetError("no windows in dataset " + opt.data_dir.string());
    const Matrix features = dsp::extract_feature_matrix(windows, opt.features);

    std::string csv;
    for (std::size_t j = 0; j < features.cols(); ++j) {
        csv += "f" + std::to_string(j) + ",";
    }
    csv += "label\n";
    for (std::size_t i = 0; i < features.rows(); ++i) {
        for (std::size_t j = 0; j < features.cols(); ++j) {
            csv += format_double(features(i, j));
            csv += ',';
        }
        csv += windows[i].label ? std::to_string(static_cast<int>(*windows[i].label)) : std::string("-1");
        csv += '\n';
    }
    atomic_write_file(opt.out_file, csv);
}

void cmd_train(const TrainOptions& opt, std::ostream& log) {
    if (opt.model != "svm" && opt.model != "nn") throw DataError("--model must be 'svm' or 'nn'");

    LoadedDataset data = load_labeled_windows(opt.data_dir, opt.window_len, opt.hop, opt.nominal_rate_hz);
    if (std::set<FaultClass>(data.labels.begin(), data.labels.end()).size() < 2) {
        throw DatasetError("training needs at least 2 classes");
    }

    const Matrix all_features = dsp::extract_feature_matrix(data.windows, opt.features);
    const SplitIndices split = stratified_split(data.labels, opt.seed);

    Matrix train_features = take_rows(all_features, split.train);
    Matrix test_features = take_rows(all_features, split.test);
    const std::vector<FaultClass> train_labels = take_labels(data.labels, split.train);
    const std::vector<FaultClass> test_labels = take_labels(data.labels, split.test);

    bundle::ModelBundle b;
    b.pipeline.window_len = opt.window_len;
    b.pipeline.hop = opt.hop;
    b.pipeline.features = opt.features;
    b.pipeline.standardize_before_pca = opt.standardize_before_pca;

    if (opt.standardize_before_pca) {
        b.feature_standardizer = svm::fit_standardizer(train_features);
        for (Matrix* m : {&train_features, &test_features}) {
            for (std::size_t i = 0; i < m->rows(); ++i) {
                const auto z = b.feature_standardizer->apply(m->row(i));
                for (std::size_t j = 0; j < m->cols(); ++j) (*m)(i, j) = z[j];
            }
        }
    }

    const pca::ClampedFit fit = pca::fit_clamped(train_features, opt.pca_components);
    if (fit.clamped) {
        log << "warning: pca components clamped from " << fit.requested_k << " to " << fit.model.output_dim()
            << " (available rank)\n";
    }
    b.pca_model = fit.model;
    const Matrix z_train = pca::transform(b.pca_model, train_features);
    const Matrix z_test = pca::transform(b.pca_model, test_features);

    b.metadata.seed = opt.seed;
    b.metadata.timestamp_unix = timestamp_from_env();
    b.metadata.dataset_fingerprint = bundle::dataset_fingerprint(opt.data_dir);

    double training_seconds = 0.0;
    const auto t0 = std::chrono::steady_clock::now();
    if (opt.model == "svm") {
        if (opt.tune_iters > 0) {
            hpo::TuneResult tuned = hpo::tune_svm(z_train, train_labels, opt.tune_iters, opt.seed, opt.k_folds);
            b.svm_model = std::move(tuned.model);
            b.metadata.tuned = true;
            b.metadata.cv_error = tuned.best_cv_error;
            b.metadata.validation_accuracy = 1.0 - tuned.best_cv_error;
            b.metadata.iterations = opt.tune_iters;
            atomic_write_file(std::filesystem::path(opt.out_bundle.string() + ".trace.csv"),
                              hpo::trace_to_csv(tuned.space, tuned.trace));
        } else {
            hpo::SvmHyperparams params;
            params.box_constraint = opt.svm_box_constraint;
            params.kernel_scale = opt.svm_kernel_scale;
            params.standardize = opt.svm_standardize;
            double cv = -1.0;
            try {
                cv = hpo::cv_error(z_train, train_labels, params, opt.k_folds, opt.seed);
            } catch (const ClassTooSmall&) {
                log << "warning: dataset too small for " << opt.k_folds << "-fold cross-validation\n";
            }
            svm::OvaConfig cfg;
            cfg.box_constraint = params.box_constraint;
            cfg.kernel.scale = params.kernel_scale;
            cfg.standardize = params.standardize;
            b.svm_model = svm::ova_train(z_train, train_labels, cfg);
            b.metadata.tuned = false;
            b.metadata.cv_error = cv;
            if (cv >= 0.0) {
                b.metadata.validation_accuracy = 1.0 - cv;
            } else {
                std::size_t correct = 0;
                for (std::size_t i = 0; i < z_train.rows(); ++i) {
                    if (svm::ova_predict(*b.svm_model, z_train.row(i)).label == train_labels[i]) ++correct;
                }
                b.metadata.validation_accuracy = static_cast<double>(correct) / static_cast<double>(z_train.rows());
            }
            b.metadata.iterations = 0;
        }
    } else {
        mlp::TrainResult trained = mlp::lbfgs_train(z_train, train_labels, opt.nn_max_iter, opt.seed);
        if (trained.line_search_failed) log << "warning: L-BFGS line search failed; using best model so far\n";
        b.metadata.iterations = trained.iterations;
        b.metadata.tuned = false;
        std::size_t correct = 0;
        for (std::size_t i = 0; i < z_train.rows(); ++i) {
            if (mlp::predict(trained.model, z_train.row(i)) == train_labels[i]) ++correct;
        }
        b.metadata.validation_accuracy = static_cast<double>(correct) / static_cast<double>(z_train.rows());
        b.metadata.cv_error = 1.0 - b.metadata.validation_accuracy;
        b.mlp_model = std::move(trained.model);
    }
    training_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!split.test.empty()) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < z_test.rows(); ++i) {
            if (classify_reduced(b, z_test.row(i)) == test_labels[i]) ++correct;
        }
        b.metadata.test20_accuracy = static_cast<double>(correct) / static_cast<double>(z_test.rows());
    } else {
        b.metadata.test20_accuracy = -1.0;
    }

    bundle::save(b, opt.out_bundle);
    // Wall-clock timing lives outside the bundle so identically seeded runs
    // produce byte-identical bundles.
    atomic_write_file(timing_sidecar(opt.out_bundle),
                      "model,training_seconds\n" + opt.model + "," + format_double(training_seconds) + "\n");
    log << "trained " << opt.model << ": validation_accuracy=" << format_double(b.metadata.validation_accuracy)
        << " test20_accuracy=" << format_double(b.metadata.test20_accuracy) << " training_seconds="
        << format_double(training_seconds) << "\n";
}

void cmd_predict(const PredictOptions& opt) {
    const bundle::ModelBundle b = bundle::load(opt.bundle_path);
    const auto files = ingest::load_dataset_dir(opt.data_dir, opt.nominal_rate_hz, /*require_labels=*/false);

    std::string csv = "file,window,predicted";
    for (int c = 0; c < kNumClasses; ++c) {
        csv += ",score_" + fault_class_name(static_cast<FaultClass>(c));
    }
    csv += '\n';
    for (const auto& f : files) {
        const auto windows = ingest::segment(f.batch, b.pipeline.window_len, b.pipeline.hop);
        for (std::size_t w = 0; w < windows.size(); ++w) {
            const bundle::WindowPrediction pred = bundle::predict_window(b, windows[w]);
            csv += f.name + "," + std::to_string(w) + "," + fault_class_name(pred.label);
            for (const double s : pred.scores) {
                csv += ',';
                csv += format_double(s);
            }
            csv += '\n';
        }
    }
    atomic_write_file(opt.out_file, csv);
}

void cmd_evaluate(const EvaluateOptions& opt, std::ostream& log) {
    if (opt.bundle_paths.empty() || opt.bundle_paths.size() > 2) {
        throw DataError("evaluate needs one bundle, or two with --compare");
    }
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec || !std::filesystem::is_directory(opt.out_dir)) {
        throw IoError("cannot create output directory: " + opt.out_dir.string());
    }

    std::vector<eval::ComparisonRow> rows;
    std::map<std::string, int> name_counts;
    for (const auto& path : opt.bundle_paths) {
        const bundle::ModelBundle b = bundle::load(path);
        const LoadedDataset data =
            load_labeled_windows(opt.data_dir, b.pipeline.window_len, b.pipeline.hop, opt.nominal_rate_hz);

        // Reduce once; throughput timing then measures pure classification.
        Matrix features = dsp::extract_feature_matrix(data.windows, b.pipeline.features);
        if (b.feature_standardizer) {
            for (std::size_t i = 0; i < features.rows(); ++i) {
                const auto z = b.feature_standardizer->apply(features.row(i));
                for (std::size_t j = 0; j < features.cols(); ++j) features(i, j) = z[j];
            }
        }
        const Matrix z = pca::transform(b.pca_model, features);

        std::vector<FaultClass> predicted(z.rows());
        for (std::size_t i = 0; i < z.rows(); ++i) predicted[i] = classify_reduced(b, z.row(i));
        const eval::ConfusionMatrix cm = eval::confusion(data.labels, predicted);

        std::string name = b.kind() == bundle::ModelKind::Svm ? "svm" : "nn";
        const int n = ++name_counts[name];
        if (n > 1) name += std::to_string(n);

        atomic_write_file(opt.out_dir / ("confusion_" + name + ".csv"), eval::confusion_to_csv(cm));
        atomic_write_file(opt.out_dir / ("rates_" + name + ".csv"), eval::rates_to_csv(eval::class_rates(cm)));

        eval::ComparisonRow row;
        row.model = name;
        row.validation_accuracy = b.metadata.validation_accuracy;
        row.test20_accuracy = b.metadata.test20_accuracy;
        row.random_test_accuracy = eval::accuracy(cm);
        row.iterations = b.metadata.iterations;
        row.principal_components = b.pca_model.output_dim();
        row.prediction_speed_obs_per_s = eval::prediction_throughput(
            [&](std::span<const double> x) { (void)classify_reduced(b, x); }, z, opt.repeats);
        row.training_seconds = 0.0;
        const auto sidecar = timing_sidecar(path);
        if (std::filesystem::exists(sidecar)) {
            const std::string text = read_text_file(sidecar);
            const auto comma = text.rfind(',');
            if (comma != std::string::npos) row.training_seconds = std::atof(text.c_str() + comma + 1);
        }
        rows.push_back(std::move(row));
        log << "evaluated " << name << ": accuracy=" << format_double(row.random_test_accuracy) << "\n";
    }

    atomic_write_file(opt.out_dir / "summary.csv", eval::comparison_to_csv(rows));
    atomic_write_file(opt.out_dir / "summary.txt", eval::comparison_to_text(rows));
}

void cmd_psd(const PsdOptions& opt) {
    if (opt.input_file.has_value() == opt.data_dir.has_value()) {
        throw DataError("psd needs exactly one of --input or --data");
    }

    if (opt.input_file) {
        const RecordBatch batch = ingest::parse_csv_file(*opt.input_file, opt.nominal_rate_hz);
        std::vector<double> signal = axis_signal(batch, opt.axis);
        if (opt.envelope) signal = envelope_signal(std::move(signal));
        const dsp::Spectrum spec = dsp::welch_psd_db(signal, opt.segment_len, opt.overlap_fraction);
        std::string csv = "normalized_frequency,db\n";
        for (std::size_t i = 0; i < spec.size(); ++i) {
            csv += format_double(spec.frequency(i)) + "," + format_double(spec.values[i]) + "\n";
        }
        atomic_write_file(opt.out_file, csv);
        return;
    }

    // Per-class mode: average the power spectra of each class's files.
    const auto files = ingest::load_dataset_dir(*opt.data_dir, opt.nominal_rate_hz, /*require_labels=*/true);
    if (files.empty()) throw DatasetError("no CSV files in " + opt.data_dir->string());
    std::array<std::vector<double>, 3> sums;
    std::array<std::size_t, 3> counts = {0, 0, 0};
    for (const auto& f : files) {
        if (!f.label) continue;
        std::vector<double> signal = axis_signal(f.batch, opt.axis);
        if (opt.envelope) signal = envelope_signal(std::move(signal));
        const dsp::Spectrum spec = dsp::welch_psd(signal, opt.segment_len, opt.overlap_fraction);
        auto& sum = sums[static_cast<std::size_t>(*f.label)];
        if (sum.empty()) sum.assign(spec.size(), 0.0);
        if (sum.size() != spec.size()) throw DataError("inconsistent PSD sizes across files");
        for (std::size_t i = 0; i < spec.size(); ++i) sum[i] += spec.values[i];
        ++counts[static_cast<std::size_t>(*f.label)];
    }

    std::string csv = "normalized_frequency";
    for (int c = 0; c < kNumClasses; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) csv += "," + fault_class_name(static_cast<FaultClass>(c)) + "_db";
    }
    csv += '\n';
    const std::size_t bins = opt.segment_len / 2 + 1;
    for (std::size_t i = 0; i < bins; ++i) {
        csv += format_double(static_cast<double>(i) / static_cast<double>(opt.segment_len));
        for (int c = 0; c < kNumClasses; ++c) {
            const auto cc = static_cast<std::size_t>(c);
            if (counts[cc] == 0) continue;
            const double power = sums[cc][i] / static_cast<double>(counts[cc]);
            const double db = power > 1e-30 ? 10.0 * std::log10(power) : dsp::kPsdFloorDb;
            csv += ',';
            csv += format_double(db);
        }
        csv += '\n';
    }
    atomic_write_file(opt.out_file, csv);
}

}  // namespace vibrofdd::cli
