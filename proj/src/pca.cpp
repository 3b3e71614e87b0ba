#include "vibrofdd/pca.hpp"

#include <algorithm>
#include <cmath>

#include "vibrofdd/errors.hpp"

namespace vibrofdd::pca {

namespace {

constexpr double kRankEigenvalueFloor = 1e-12;

struct FullDecomposition {
    std::vector<double> mean;
    SymmetricEigen eigen;
    std::size_t rank = 0;
};

FullDecomposition decompose(const Matrix& x) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n < 2) throw DataError("PCA needs at least 2 samples, got " + std::to_string(n));
    if (d == 0) throw DataError("PCA needs at least 1 feature column");

    FullDecomposition out;
    out.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) out.mean[j] += x(i, j);
    }
    for (double& m : out.mean) m /= static_cast<double>(n);

    Matrix cov(d, d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < d; ++a) {
            const double va = x(i, a) - out.mean[a];
            for (std::size_t b = a; b < d; ++b) {
                cov(a, b) += va * (x(i, b) - out.mean[b]);
            }
        }
    }
    const double divisor = static_cast<double>(n - 1);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            cov(a, b) /= divisor;
            cov(b, a) = cov(a, b);
        }
    }

    out.eigen = symmetric_eigen(std::move(cov));
    for (double v : out.eigen.values) {
        if (v > kRankEigenvalueFloor) ++out.rank;
    }
    return out;
}

PcaModel select_components(FullDecomposition&& dec, std::size_t k) {
    const std::size_t d = dec.mean.size();
    PcaModel model;
    model.mean = std::move(dec.mean);
    model.components = Matrix(k, d, 0.0);
    model.explained_variance.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        model.explained_variance[i] = std::max(0.0, dec.eigen.values[i]);
        // Deterministic sign: largest-magnitude entry positive.
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double mag = std::abs(dec.eigen.vectors(i, j));
            if (mag > best) {
                best = mag;
                arg = j;
            }
        }
        const double sign = dec.eigen.vectors(i, arg) < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < d; ++j) model.components(i, j) = sign * dec.eigen.vectors(i, j);
    }
    return model;
}

}  // namespace

PcaModel fit(const Matrix& x, std::size_t k) {
    if (k < 1) throw RankTooLow("k must be >= 1");
    if (k > std::min(x.cols(), x.rows())) {
        throw RankTooLow("k=" + std::to_string(k) + " exceeds min(D, n)=" +
                         std::to_string(std::min(x.cols(), x.rows())));
    }
    FullDecomposition dec = decompose(x);
    if (k > dec.rank) {
        throw RankTooLow("k=" + std::to_string(k) + " exceeds available rank " + std::to_string(dec.rank));
    }
    return select_components(std::move(dec), k);
}

ClampedFit fit_clamped(const Matrix& x, std::size_t k) {
    FullDecomposition dec = decompose(x);
    ClampedFit out;
    out.requested_k = k;
    const std::size_t k_eff = std::max<std::size_t>(1, std::min(k, dec.rank));
    out.clamped = k_eff != k;
    out.model = select_components(std::move(dec), k_eff);
    return out;
}

Matrix transform(const PcaModel& model, const Matrix& x) {
    if (x.cols() != model.input_dim()) {
        throw DimMismatch("transform: input has " + std::to_string(x.cols()) + " columns, model expects " +
                          std::to_string(model.input_dim()));
    }
    const std::size_t k = model.output_dim();
    Matrix z(x.rows(), k, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t c = 0; c < k; ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.cols(); ++j) {
                s += (x(i, j) - model.mean[j]) * model.components(c, j);
            }
            z(i, c) = s;
        }
    }
    return z;
}

std::vector<double> transform_row(const PcaModel& model, std::span<const double> row) {
    if (row.size() != model.input_dim()) {
        throw DimMismatch("transform_row: input has " + std::to_string(row.size()) + " values, model expects " +
                          std::to_string(model.input_dim()));
    }
    std::vector<double> z(model.output_dim(), 0.0);
    for (std::size_t c = 0; c < z.size(); ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            s += (row[j] - model.mean[j]) * model.components(c, j);
        }
        z[c] = s;
    }
    return z;
}

Matrix inverse_transform(const PcaModel& model, const Matrix& z) {
    if (z.cols() != model.output_dim()) {
        throw DimMismatch("inverse_transform: input has " + std::to_string(z.cols()) + " columns, model expects " +
                          std::to_string(model.output_dim()));
    }
    const std::size_t d = model.input_dim();
    Matrix x(z.rows(), d, 0.0);
    for (std::size_t i = 0; i < z.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double s = model.mean[j];
            for (std::size_t c = 0; c < z.cols(); ++c) {
                s += z(i, c) * model.components(c, j);
            }
            x(i, j) = s;
        }
    }
    return x;
}

}  // namespace vibrofdd::pca
