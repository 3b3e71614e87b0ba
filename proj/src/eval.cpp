#include "vibrofdd/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "vibrofdd/errors.hpp"
#include "vibrofdd/io.hpp"

namespace vibrofdd::eval {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t t = 0;
    for (const auto& row : counts) {
        for (const std::int64_t v : row) t += v;
    }
    return t;
}

ConfusionMatrix confusion(const std::vector<FaultClass>& truth, const std::vector<FaultClass>& predicted) {
    if (truth.size() != predicted.size()) {
        throw LengthMismatch("truth has " + std::to_string(truth.size()) + " labels, predictions have " +
                             std::to_string(predicted.size()));
    }
    if (truth.empty()) throw LengthMismatch("need at least one (truth, prediction) pair");
    ConfusionMatrix cm;
    cm.counts.assign(kNumClasses, std::vector<std::int64_t>(kNumClasses, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        cm.counts[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])] += 1;
    }
    return cm;
}

ConfusionMatrix confusion_from_counts(std::vector<std::vector<std::int64_t>> counts) {
    ConfusionMatrix cm;
    cm.counts = std::move(counts);
    for (const auto& row : cm.counts) {
        if (row.size() != cm.counts.size()) throw ShapeMismatch("confusion matrix must be square");
        for (const std::int64_t v : row) {
            if (v < 0) throw DataError("confusion counts must be non-negative");
        }
    }
    return cm;
}

ClassRates class_rates(const ConfusionMatrix& cm) {
    ClassRates rates;
    const std::size_t c = cm.num_classes();
    rates.tpr.assign(c, std::nullopt);
    rates.fnr.assign(c, std::nullopt);
    for (std::size_t i = 0; i < c; ++i) {
        std::int64_t row_sum = 0;
        for (const std::int64_t v : cm.counts[i]) row_sum += v;
        if (row_sum == 0) continue;
        const double tpr = static_cast<double>(cm.counts[i][i]) / static_cast<double>(row_sum);
        rates.tpr[i] = tpr;
        rates.fnr[i] = 1.0 - tpr;
    }
    return rates;
}

double accuracy(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total == 0) throw EmptyInput("confusion matrix has no samples");
    std::int64_t diag = 0;
    for (std::size_t i = 0; i < cm.num_classes(); ++i) diag += cm.counts[i][i];
    return static_cast<double>(diag) / static_cast<double>(total);
}

std::string confusion_to_csv(const ConfusionMatrix& cm) {
    std::string out = "true\\predicted";
    for (std::size_t c = 0; c < cm.num_classes(); ++c) {
        out += ',';
        out += fault_class_name(static_cast<FaultClass>(c));
    }
    out += '\n';
    for (std::size_t r = 0; r < cm.num_classes(); ++r) {
        out += fault_class_name(static_cast<FaultClass>(r));
        for (std::size_t c = 0; c < cm.num_classes(); ++c) {
            out += ',';
            out += std::to_string(cm.counts[r][c]);
        }
        out += '\n';
    }
    return out;
}

namespace {

std::string round3(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(3) << v;
    return ss.str();
}

}  // namespace

std::string rates_to_csv(const ClassRates& rates) {
    std::string out = "class,tpr,fnr\n";
    for (std::size_t c = 0; c < rates.tpr.size(); ++c) {
        out += fault_class_name(static_cast<FaultClass>(c));
        out += ',';
        out += rates.tpr[c] ? round3(*rates.tpr[c]) : "";
        out += ',';
        out += rates.fnr[c] ? round3(*rates.fnr[c]) : "";
        out += '\n';
    }
    return out;
}

double prediction_throughput(const std::function<void(std::span<const double>)>& predict_one, const Matrix& x,
                             std::size_t repeats) {
    if (x.rows() == 0) throw DataError("throughput needs a non-empty dataset");
    if (repeats == 0) repeats = 1;
    std::vector<double> measurements;
    measurements.reserve(repeats);
    for (std::size_t r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        for (std::size_t i = 0; i < x.rows(); ++i) predict_one(x.row(i));
        const auto stop = std::chrono::steady_clock::now();
        const double seconds = std::max(1e-9, std::chrono::duration<double>(stop - start).count());
        measurements.push_back(static_cast<double>(x.rows()) / seconds);
    }
    std::sort(measurements.begin(), measurements.end());
    const std::size_t m = measurements.size();
    return m % 2 == 1 ? measurements[m / 2] : 0.5 * (measurements[m / 2 - 1] + measurements[m / 2]);
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
    std::string out =
        "model,accuracy_validation,accuracy_test20,accuracy_test_random,"
        "training_seconds,iterations,prediction_speed_obs_per_s,principal_components\n";
    for (const auto& r : rows) {
        out += r.model;
        out += ',';
        out += round3(r.validation_accuracy);
        out += ',';
        out += round3(r.test20_accuracy);
        out += ',';
        out += round3(r.random_test_accuracy);
        out += ',';
        out += format_double(r.training_seconds);
        out += ',';
        out += std::to_string(r.iterations);
        out += ',';
        out += format_double(r.prediction_speed_obs_per_s);
        out += ',';
        out += std::to_string(r.principal_components);
        out += '\n';
    }
    return out;
}

std::string comparison_to_text(const std::vector<ComparisonRow>& rows) {
    std::ostringstream ss;
    ss << std::left << std::setw(10) << "model" << std::right << std::setw(15) << "acc_valid" << std::setw(12)
       << "acc_test20" << std::setw(12) << "acc_random" << std::setw(12) << "train_s" << std::setw(12) << "iters"
       << std::setw(14) << "pred_obs_s" << std::setw(6) << "pcs" << '\n';
    for (const auto& r : rows) {
        ss << std::left << std::setw(10) << r.model << std::right << std::setw(15) << round3(r.validation_accuracy)
           << std::setw(12) << round3(r.test20_accuracy) << std::setw(12) << round3(r.random_test_accuracy)
           << std::setw(12) << std::fixed << std::setprecision(2) << r.training_seconds << std::setw(12)
           << r.iterations << std::setw(14) << std::setprecision(1) << r.prediction_speed_obs_per_s << std::setw(6)
           << r.principal_components << '\n';
    }
    return ss.str();
}

}  // namespace vibrofdd::eval
