#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vibrofdd/matrix.hpp"
#include "vibrofdd/svm.hpp"

namespace vibrofdd::hpo {

struct ContinuousDim {
    std::string name;
    double lo = 0.0;
    double hi = 1.0;
    bool log_scale = false;
};

struct CategoricalDim {
    std::string name;
    std::vector<std::string> values;
};

using Dim = std::variant<ContinuousDim, CategoricalDim>;

struct Space {
    std::vector<Dim> dims;
};

// One evaluated point: continuous dims hold the value in original scale,
// categorical dims hold the choice index.
using Point = std::vector<double>;

bool point_in_bounds(const Space& space, const Point& p);

struct TraceStep {
    Point point;
    double observed_error = 0.0;
    double running_best_error = 0.0;
    bool objective_failed = false;
    // Surrogate diagnostics; absent for the quasi-random initial points.
    std::optional<double> expected_improvement;
    std::optional<double> posterior_mean;
    std::optional<double> posterior_sd;
};

struct TuneTrace {
    std::vector<TraceStep> steps;
};

std::string trace_to_csv(const Space& space, const TuneTrace& trace);

// Exact-solve Gaussian process with a squared-exponential kernel in the
// normalized search coordinates. Exposed so the surrogate can be tested on
// its own.
class GpSurrogate {
public:
    GpSurrogate(double length_scale, double noise_std)
        : length_scale_(length_scale), noise_variance_(noise_std * noise_std) {}

    void fit(const Matrix& x, const std::vector<double>& y);

    struct MeanVar {
        double mean = 0.0;
        double variance = 0.0;
    };
    MeanVar predict(std::span<const double> x) const;

private:
    double length_scale_;
    double noise_variance_;
    Matrix train_x_;
    Matrix chol_;  // lower-triangular factor of K + noise*I
    std::vector<double> alpha_;
    double y_mean_ = 0.0;
};

inline constexpr double kGpLengthScale = 0.2;
inline constexpr double kGpNoiseStd = 1e-4;
inline constexpr std::size_t kInitialPoints = 4;
inline constexpr std::size_t kCandidatePoints = 512;

double expected_improvement(double mean, double sd, double best);

using Objective = std::function<double(const Point&)>;

struct BayesResult {
    Point best_point;
    double best_error = 0.0;
    TuneTrace trace;
};

// Minimizes the objective over the space: 4 seeded quasi-random initial
// points, then expected-improvement steps with the next point chosen among
// 512 seeded uniform candidates. Objective exceptions are recorded as
// error 1.0 and flagged. Deterministic given (space, n_iter, seed).
BayesResult bayes_opt(const Objective& objective, const Space& space, std::size_t n_iter, std::uint64_t seed);

struct SvmHyperparams {
    double box_constraint = 300.0;
    double kernel_scale = 23.12;
    bool standardize = false;
};

// box_constraint and kernel_scale log-uniform in [1e-3, 1e3], standardize
// in {false,true}. The coding dim carries only one-vs-all; one-vs-one stays
// an enum hook without a trainer behind it.
Space svm_search_space();

SvmHyperparams params_from_point(const Space& space, const Point& p);

// Stratified k-fold mean misclassification fraction, seeded and
// deterministic.
double cv_error(const Matrix& x, const std::vector<FaultClass>& labels, const SvmHyperparams& params,
                std::size_t k_folds, std::uint64_t seed);

struct TuneResult {
    svm::MulticlassSvm model;  // refit on the full data with the best params
    SvmHyperparams best_params;
    double best_cv_error = 0.0;
    TuneTrace trace;
    Space space;
};

TuneResult tune_svm(const Matrix& x, const std::vector<FaultClass>& labels, std::size_t n_iter, std::uint64_t seed,
                    std::size_t k_folds = 5);

}  // namespace vibrofdd::hpo
