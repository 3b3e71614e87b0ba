#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vibrofdd/matrix.hpp"
#include "vibrofdd/types.hpp"

namespace vibrofdd::eval {

// Rows are true classes, columns are predictions.
struct ConfusionMatrix {
    std::vector<std::vector<std::int64_t>> counts;

    std::size_t num_classes() const { return counts.size(); }
    std::int64_t total() const;
};

ConfusionMatrix confusion(const std::vector<FaultClass>& truth, const std::vector<FaultClass>& predicted);
ConfusionMatrix confusion_from_counts(std::vector<std::vector<std::int64_t>> counts);

struct ClassRates {
    // Absent when the class has no samples.
    std::vector<std::optional<double>> tpr;
    std::vector<std::optional<double>> fnr;
};

ClassRates class_rates(const ConfusionMatrix& cm);

double accuracy(const ConfusionMatrix& cm);

std::string confusion_to_csv(const ConfusionMatrix& cm);
std::string rates_to_csv(const ClassRates& rates);

// Median observations/second over `repeats` single-threaded timing runs of
// predicting every row.
double prediction_throughput(const std::function<void(std::span<const double>)>& predict_one, const Matrix& x,
                             std::size_t repeats);

// One side of the model comparison; mirrors the columns of the comparison
// report.
struct ComparisonRow {
    std::string model;
    double validation_accuracy = 0.0;
    double test20_accuracy = 0.0;
    double random_test_accuracy = 0.0;
    double training_seconds = 0.0;
    std::size_t iterations = 0;
    double prediction_speed_obs_per_s = 0.0;
    std::size_t principal_components = 0;
};

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);
std::string comparison_to_text(const std::vector<ComparisonRow>& rows);

}  // namespace vibrofdd::eval
