#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vibrofdd/types.hpp"

namespace vibrofdd {

// Dense row-major matrix of doubles. Small and unclever on purpose; every
// consumer in this toolkit works at desk scale.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Feature matrix plus one label per row.
struct LabeledData {
    Matrix x;
    std::vector<FaultClass> labels;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

struct SymmetricEigen {
    std::vector<double> values;  // descending
    Matrix vectors;              // row i is the eigenvector of values[i]
};

// Cyclic Jacobi rotations on a symmetric matrix. The input is scaled to unit
// Frobenius norm so the off-diagonal termination threshold (1e-12) is
// reachable in double precision regardless of the data's magnitude.
SymmetricEigen symmetric_eigen(Matrix a, double off_diagonal_tol = 1e-12);

}  // namespace vibrofdd
