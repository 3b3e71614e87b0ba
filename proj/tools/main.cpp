#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "vibrofdd/commands.hpp"
#include "vibrofdd/errors.hpp"

namespace {

using namespace vibrofdd;

std::array<std::size_t, 3> parse_counts(const std::string& text) {
    std::array<std::size_t, 3> counts{};
    std::size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        std::size_t next = text.find(',', pos);
        const std::string tok = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        try {
            counts[static_cast<std::size_t>(i)] = std::stoull(tok);
        } catch (...) {
            throw CLI::ValidationError("--counts expects three comma-separated integers");
        }
        if (i < 2) {
            if (next == std::string::npos) throw CLI::ValidationError("--counts expects three comma-separated integers");
            pos = next + 1;
        }
    }
    return counts;
}

dsp::WaveletFamily parse_family(const std::string& name) {
    if (name == "haar") return dsp::WaveletFamily::Haar;
    if (name == "db4" || name == "daubechies4") return dsp::WaveletFamily::Daubechies4;
    throw CLI::ValidationError("--wavelet expects 'haar' or 'db4'");
}

void add_feature_flags(CLI::App* cmd, std::string& wavelet, int& levels, bool& hard, bool& denoise_raw) {
    cmd->add_option("--wavelet", wavelet, "Wavelet family: haar or db4")->capture_default_str();
    cmd->add_option("--levels", levels, "Wavelet decomposition levels")->capture_default_str();
    cmd->add_flag("--hard-shrinkage", hard, "Hard instead of soft shrinkage");
    cmd->add_flag("--denoise-raw", denoise_raw, "Denoise raw axes before the spectrum instead of the gradient");
}

dsp::FeatureConfig make_feature_config(const std::string& wavelet, int levels, bool hard, bool denoise_raw) {
    dsp::FeatureConfig cfg;
    cfg.wavelet.family = parse_family(wavelet);
    cfg.wavelet.levels = levels;
    cfg.wavelet.shrinkage = hard ? dsp::Shrinkage::Hard : dsp::Shrinkage::Soft;
    cfg.denoise_raw_axes = denoise_raw;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vibration fault detection toolkit: synthesize, featurize, train, and evaluate"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
    cli::SynthOptions synth_opt;
    std::string counts_text = "42,118,80";
    synth->add_option("--out", synth_opt.out_dir, "Output directory")->required();
    synth->add_option("--counts", counts_text, "Windows per class, e.g. 42,118,80")->capture_default_str();
    synth->add_option("--seed", synth_opt.seed, "Random seed")->capture_default_str();
    synth->add_option("--noise", synth_opt.noise_sigma, "Gaussian noise sigma")->capture_default_str();
    synth->add_option("--shaft-hz", synth_opt.shaft_hz, "Shaft frequency in Hz")->capture_default_str();
    synth->add_option("--rate-hz", synth_opt.rate_hz, "Sample rate in Hz")->capture_default_str();
    synth->add_option("--window-len", synth_opt.window_len, "Samples per window")->capture_default_str();
    synth->callback([&] {
        synth_opt.counts = parse_counts(counts_text);
        cli::cmd_synth(synth_opt);
    });

    // ingest-check
    auto* check = app.add_subcommand("ingest-check", "Validate CSV files and their sample rate");
    cli::IngestCheckOptions check_opt;
    check->add_option("--data", check_opt.data_dir, "Dataset directory")->required();
    check->add_option("--tolerance", check_opt.tolerance_fraction, "Allowed rate deviation fraction")
        ->capture_default_str();
    check->add_option("--rate-hz", check_opt.nominal_rate_hz, "Nominal sample rate")->capture_default_str();
    check->callback([&] { cli::cmd_ingest_check(check_opt, std::cout); });

    // features
    auto* features = app.add_subcommand("features", "Extract the feature matrix to CSV");
    cli::FeaturesOptions feat_opt;
    std::string feat_wavelet = "db4";
    int feat_levels = 3;
    bool feat_hard = false;
    bool feat_raw = false;
    features->add_option("--data", feat_opt.data_dir, "Dataset directory")->required();
    features->add_option("--out", feat_opt.out_file, "Output CSV")->required();
    features->add_option("--window-len", feat_opt.window_len, "Samples per window")->capture_default_str();
    features->add_option("--hop", feat_opt.hop, "Hop between windows (default window length)");
    add_feature_flags(features, feat_wavelet, feat_levels, feat_hard, feat_raw);
    features->callback([&] {
        if (!features->count("--hop")) feat_opt.hop = feat_opt.window_len;
        feat_opt.features = make_feature_config(feat_wavelet, feat_levels, feat_hard, feat_raw);
        cli::cmd_features(feat_opt);
    });

    // train
    auto* train = app.add_subcommand("train", "Train a classifier and write a model bundle");
    cli::TrainOptions train_opt;
    std::string train_wavelet = "db4";
    int train_levels = 3;
    bool train_hard = false;
    bool train_raw = false;
    train->add_option("--data", train_opt.data_dir, "Labeled dataset directory")->required();
    train->add_option("--out", train_opt.out_bundle, "Output bundle path")->required();
    train->add_option("--model", train_opt.model, "Model kind: svm or nn")->capture_default_str();
    train->add_option("--tune", train_opt.tune_iters, "Bayesian optimization iterations (0 = fixed parameters)")
        ->capture_default_str();
    train->add_option("--pca", train_opt.pca_components, "Principal components")->capture_default_str();
    train->add_option("--seed", train_opt.seed, "Random seed")->capture_default_str();
    train->add_option("--window-len", train_opt.window_len, "Samples per window")->capture_default_str();
    train->add_option("--hop", train_opt.hop, "Hop between windows (default window length)");
    train->add_option("--box", train_opt.svm_box_constraint, "SVM box constraint")->capture_default_str();
    train->add_option("--scale", train_opt.svm_kernel_scale, "SVM kernel scale")->capture_default_str();
    train->add_flag("--standardize", train_opt.svm_standardize, "Z-score features inside the SVM");
    train->add_flag("--standardize-before-pca", train_opt.standardize_before_pca, "Z-score features before PCA");
    train->add_option("--nn-iters", train_opt.nn_max_iter, "L-BFGS iteration cap")->capture_default_str();
    train->add_option("--folds", train_opt.k_folds, "Cross-validation folds")->capture_default_str();
    add_feature_flags(train, train_wavelet, train_levels, train_hard, train_raw);
    train->callback([&] {
        if (!train->count("--hop")) train_opt.hop = train_opt.window_len;
        train_opt.features = make_feature_config(train_wavelet, train_levels, train_hard, train_raw);
        cli::cmd_train(train_opt, std::cout);
    });

    // predict
    auto* predict = app.add_subcommand("predict", "Classify windows with a trained bundle");
    cli::PredictOptions pred_opt;
    predict->add_option("--bundle", pred_opt.bundle_path, "Model bundle")->required();
    predict->add_option("--data", pred_opt.data_dir, "Input dataset directory")->required();
    predict->add_option("--out", pred_opt.out_file, "Output predictions CSV")->required();
    predict->callback([&] { cli::cmd_predict(pred_opt); });

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate bundle(s) on a labeled dataset");
    cli::EvaluateOptions eval_opt;
    std::filesystem::path eval_bundle;
    std::filesystem::path compare_bundle;
    evaluate->add_option("--bundle", eval_bundle, "Model bundle")->required();
    evaluate->add_option("--compare", compare_bundle, "Second bundle for a side-by-side report");
    evaluate->add_option("--data", eval_opt.data_dir, "Labeled dataset directory")->required();
    evaluate->add_option("--out", eval_opt.out_dir, "Report output directory")->required();
    evaluate->add_option("--repeats", eval_opt.repeats, "Throughput timing repeats")->capture_default_str();
    evaluate->callback([&] {
        eval_opt.bundle_paths = {eval_bundle};
        if (evaluate->count("--compare")) eval_opt.bundle_paths.push_back(compare_bundle);
        cli::cmd_evaluate(eval_opt, std::cout);
    });

    // psd
    auto* psd = app.add_subcommand("psd", "Welch power spectral density to CSV");
    cli::PsdOptions psd_opt;
    std::filesystem::path psd_input;
    std::filesystem::path psd_data;
    psd->add_option("--input", psd_input, "Single input CSV");
    psd->add_option("--data", psd_data, "Labeled dataset directory (per-class columns)");
    psd->add_option("--out", psd_opt.out_file, "Output CSV")->required();
    psd->add_option("--segment", psd_opt.segment_len, "Welch segment length")->capture_default_str();
    psd->add_option("--overlap", psd_opt.overlap_fraction, "Segment overlap fraction")->capture_default_str();
    psd->add_flag("--envelope", psd_opt.envelope, "Rectified-signal envelope spectrum");
    psd->add_option("--axis", psd_opt.axis, "Axis: x, y, z, or mean")->capture_default_str();
    psd->callback([&] {
        if (psd->count("--input")) psd_opt.input_file = psd_input;
        if (psd->count("--data")) psd_opt.data_dir = psd_data;
        cli::cmd_psd(psd_opt);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // stable usage-error code
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
