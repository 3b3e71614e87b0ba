#pragma once

#include <cstdint>
#include <vector>

#include "vibrofdd/matrix.hpp"
#include "vibrofdd/types.hpp"

namespace vibrofdd::mlp {

// Fixed architecture [D, 25, 25, 3]: two ReLU hidden layers, softmax output.
struct MlpModel {
    std::vector<std::size_t> layer_sizes;
    std::vector<Matrix> weights;             // weights[l] is (out x in)
    std::vector<std::vector<double>> biases;

    std::size_t input_dim() const { return layer_sizes.front(); }
};

inline constexpr std::size_t kHiddenWidth = 25;

// Glorot-uniform weights, zero biases, seeded.
MlpModel init_model(std::size_t input_dim, std::uint64_t seed);

// Class probabilities; strictly positive and summing to 1.
std::vector<double> forward(const MlpModel& model, std::span<const double> x);

struct Gradient {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

// Mean cross-entropy over the batch plus its exact backpropagation
// gradient.
std::pair<double, Gradient> loss_and_grad(const MlpModel& model, const Matrix& x,
                                          const std::vector<FaultClass>& labels);

std::vector<double> flatten(const MlpModel& model);
void unflatten(std::span<const double> params, MlpModel& model);
std::vector<double> flatten_grad(const Gradient& grad);

struct TrainResult {
    MlpModel model;
    std::size_t iterations = 0;
    std::vector<double> loss_history;  // loss after each accepted step
    bool line_search_failed = false;
};

// L-BFGS (two-loop recursion, history 10) with backtracking Armijo line
// search. Stops at gradient inf-norm < 1e-5, loss change < 1e-9, or
// max_iter. On a line search failure the best model so far is returned,
// flagged.
TrainResult lbfgs_train(const Matrix& x, const std::vector<FaultClass>& labels, std::size_t max_iter,
                        std::uint64_t seed);

FaultClass predict(const MlpModel& model, std::span<const double> x);

}  // namespace vibrofdd::mlp
