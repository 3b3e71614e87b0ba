#pragma once

#include <cstddef>

#include "vibrofdd/matrix.hpp"

namespace vibrofdd::pca {

struct PcaModel {
    std::vector<double> mean;          // length D
    Matrix components;                 // K x D, rows orthonormal
    std::vector<double> explained_variance;  // length K, non-increasing

    std::size_t input_dim() const { return mean.size(); }
    std::size_t output_dim() const { return components.rows(); }
};

// Top-k eigenpairs of the sample covariance (divisor n-1), computed by
// cyclic Jacobi rotations. Throws RankTooLow when fewer than k eigenvalues
// exceed 1e-12. Component signs are fixed so the largest-magnitude entry of
// each component is positive.
PcaModel fit(const Matrix& x, std::size_t k);

struct ClampedFit {
    PcaModel model;
    std::size_t requested_k = 0;
    bool clamped = false;
};

// Like fit, but reduces k to the available rank instead of throwing.
ClampedFit fit_clamped(const Matrix& x, std::size_t k);

// (X - mean) * components^T
Matrix transform(const PcaModel& model, const Matrix& x);
std::vector<double> transform_row(const PcaModel& model, std::span<const double> row);

// Z * components + mean
Matrix inverse_transform(const PcaModel& model, const Matrix& z);

}  // namespace vibrofdd::pca
