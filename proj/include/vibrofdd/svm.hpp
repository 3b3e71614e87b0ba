#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vibrofdd/matrix.hpp"
#include "vibrofdd/types.hpp"

namespace vibrofdd::svm {

enum class KernelKind { Gaussian };

struct KernelSpec {
    KernelKind kind = KernelKind::Gaussian;
    double scale = 23.12;  // s in exp(-||u-v||^2 / s^2)
};

double gaussian_kernel(std::span<const double> u, std::span<const double> v, double scale);
double kernel_value(const KernelSpec& kernel, std::span<const double> u, std::span<const double> v);

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std_dev;  // zero-variance columns stored as 1

    std::vector<double> apply(std::span<const double> row) const;
};

Standardizer fit_standardizer(const Matrix& x);

struct BinarySvm {
    Matrix support_vectors;          // m x D (standardized space when standardizer set)
    std::vector<double> dual_coefs;  // alpha_i * y_i
    double bias = 0.0;
    KernelSpec kernel;
    double box_constraint = 1.0;
    std::optional<Standardizer> standardizer;
    bool converged = true;
    double final_kkt_violation = 0.0;
    double dual_objective = 0.0;    // training diagnostic
    std::size_t iterations = 0;     // pair updates taken
};

struct SmoConfig {
    double box_constraint = 300.0;
    KernelSpec kernel;
    double tol = 1e-3;
    // Cap on pairwise updates, expressed in sweeps of n points each;
    // 0 means the default of 10 sweeps per point (10*n updates).
    std::size_t max_passes = 0;
};

// Soft-margin dual solved by two-variable analytic updates with
// maximal-violating-pair selection. Labels must be -1/+1 with both present.
// When the update budget runs out the model is returned with
// converged=false and the residual violation recorded.
BinarySvm smo_train(const Matrix& x, const std::vector<int>& y, const SmoConfig& cfg);

// f(x) = sum_i dual_coefs[i] * K(sv_i, x) + bias
double decision(const BinarySvm& model, std::span<const double> x);

struct MulticlassSvm {
    std::vector<BinarySvm> learners;  // one per class, +1 = that class
    std::vector<std::vector<int>> coding;  // classes x learners, entries -1/+1
    std::vector<FaultClass> class_order;
};

struct OvaConfig {
    double box_constraint = 300.0;
    KernelSpec kernel;
    bool standardize = false;
    double tol = 1e-3;
    std::size_t max_passes = 0;
};

MulticlassSvm ova_train(const Matrix& x, const std::vector<FaultClass>& labels, const OvaConfig& cfg);

struct Decoded {
    std::size_t best_class = 0;
    std::vector<double> losses;  // mean hinge binary loss per class
};

// Mean hinge decoding over the coding matrix; ties break to the lowest
// class code.
Decoded hinge_decode(const std::vector<std::vector<int>>& coding, const std::vector<double>& scores);

struct Prediction {
    FaultClass label = FaultClass::StructuralLooseness;
    std::vector<double> losses;
    std::vector<double> scores;  // raw decision values per learner
};

Prediction ova_predict(const MulticlassSvm& model, std::span<const double> x);

}  // namespace vibrofdd::svm
