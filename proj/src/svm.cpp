#include "vibrofdd/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "vibrofdd/errors.hpp"

namespace vibrofdd::svm {

double gaussian_kernel(std::span<const double> u, std::span<const double> v, double scale) {
    if (u.size() != v.size()) {
        throw DimMismatch("kernel inputs have dimensions " + std::to_string(u.size()) + " and " +
                          std::to_string(v.size()));
    }
    if (!(scale > 0.0)) throw DataError("kernel scale must be positive");
    return std::exp(-squared_distance(u, v) / (scale * scale));
}

double kernel_value(const KernelSpec& kernel, std::span<const double> u, std::span<const double> v) {
    return gaussian_kernel(u, v, kernel.scale);
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
    if (row.size() != mean.size()) {
        throw DimMismatch("standardizer expects dimension " + std::to_string(mean.size()) + ", got " +
                          std::to_string(row.size()));
    }
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / std_dev[j];
    return out;
}

Standardizer fit_standardizer(const Matrix& x) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.std_dev.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += x(i, j);
    }
    for (double& m : s.mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dlt = x(i, j) - s.mean[j];
            s.std_dev[j] += dlt * dlt;
        }
    }
    for (double& v : s.std_dev) {
        v = std::sqrt(v / static_cast<double>(n));
        if (v == 0.0) v = 1.0;
    }
    return s;
}

BinarySvm smo_train(const Matrix& x, const std::vector<int>& y, const SmoConfig& cfg) {
    const std::size_t n = x.rows();
    if (n == 0 || y.size() != n) throw LengthMismatch("labels must match the number of rows");
    if (!(cfg.box_constraint > 0.0)) throw DataError("box constraint must be positive");
    bool has_pos = false;
    bool has_neg = false;
    for (int label : y) {
        if (label == 1) has_pos = true;
        else if (label == -1) has_neg = true;
        else throw DataError("binary labels must be -1 or +1");
    }
    if (!has_pos || !has_neg) throw SingleClass("training set contains a single class");

    const double c_box = cfg.box_constraint;
    const double tol = cfg.tol;
    const std::size_t max_updates = (cfg.max_passes == 0 ? 10 * n : cfg.max_passes);

    // Dense Gram cache; everything in this toolkit is desk scale.
    Matrix gram(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        gram(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = kernel_value(cfg.kernel, x.row(i), x.row(j));
            gram(i, j) = k;
            gram(j, i) = k;
        }
    }

    std::vector<double> alpha(n, 0.0);
    // v_i = y_i - sum_j alpha_j y_j K_ij; the dual is optimal within tol when
    // max over I_up of v is within tol of min over I_low of v.
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(y[i]);

    const double snap = 1e-12 * c_box;
    auto in_up = [&](std::size_t t) {
        return (y[t] == 1 && alpha[t] < c_box) || (y[t] == -1 && alpha[t] > 0.0);
    };
    auto in_low = [&](std::size_t t) {
        return (y[t] == -1 && alpha[t] < c_box) || (y[t] == 1 && alpha[t] > 0.0);
    };

    auto select_pair = [&](std::size_t& i, std::size_t& j) {
        double m = -std::numeric_limits<double>::infinity();
        double big_m = std::numeric_limits<double>::infinity();
        i = n;
        j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (in_up(t) && v[t] > m) {
                m = v[t];
                i = t;
            }
            if (in_low(t) && v[t] < big_m) {
                big_m = v[t];
                j = t;
            }
        }
        return m - big_m;  // violation
    };

    bool converged = false;
    double violation = 0.0;
    std::size_t updates = 0;
    while (updates < max_updates) {
        std::size_t i = 0;
        std::size_t j = 0;
        violation = select_pair(i, j);
        if (violation <= tol) {
            converged = true;
            break;
        }
        double quad = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
        if (quad < 1e-12) quad = 1e-12;
        double step = violation / quad;
        const double cap_i = y[i] == 1 ? c_box - alpha[i] : alpha[i];
        const double cap_j = y[j] == 1 ? alpha[j] : c_box - alpha[j];
        step = std::min(step, std::min(cap_i, cap_j));

        alpha[i] += y[i] * step;
        alpha[j] -= y[j] * step;
        for (std::size_t t : {i, j}) {
            if (alpha[t] < snap) alpha[t] = 0.0;
            if (alpha[t] > c_box - snap) alpha[t] = c_box;
        }
        for (std::size_t t = 0; t < n; ++t) v[t] -= step * (gram(t, i) - gram(t, j));
        ++updates;
    }
    if (!converged) {
        std::size_t i = 0;
        std::size_t j = 0;
        violation = select_pair(i, j);
        converged = violation <= tol;
    }

    // Bias: average of v over unbounded support vectors; when every alpha is
    // at a bound, the midpoint of the remaining feasible interval.
    double bias = 0.0;
    std::size_t unbounded = 0;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0 && alpha[t] < c_box) {
            bias += v[t];
            ++unbounded;
        }
    }
    if (unbounded > 0) {
        bias /= static_cast<double>(unbounded);
    } else {
        double m = -std::numeric_limits<double>::infinity();
        double big_m = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            if (in_up(t)) m = std::max(m, v[t]);
            if (in_low(t)) big_m = std::min(big_m, v[t]);
        }
        bias = 0.5 * (m + big_m);
    }

    // Exact dual objective from the cached Gram.
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] == 0.0) continue;
        objective += alpha[i];
        double q = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (alpha[j] == 0.0) continue;
            q += alpha[j] * y[j] * gram(i, j);
        }
        objective -= 0.5 * alpha[i] * y[i] * q;
    }

    BinarySvm model;
    model.kernel = cfg.kernel;
    model.box_constraint = c_box;
    model.bias = bias;
    model.converged = converged;
    model.final_kkt_violation = std::max(0.0, violation);
    model.dual_objective = objective;
    model.iterations = updates;

    std::vector<std::size_t> sv_idx;
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 1e-8) sv_idx.push_back(t);
    }
    model.support_vectors = Matrix(sv_idx.size(), x.cols(), 0.0);
    model.dual_coefs.resize(sv_idx.size());
    for (std::size_t r = 0; r < sv_idx.size(); ++r) {
        const std::size_t t = sv_idx[r];
        for (std::size_t c = 0; c < x.cols(); ++c) model.support_vectors(r, c) = x(t, c);
        model.dual_coefs[r] = alpha[t] * y[t];
    }
    return model;
}

double decision(const BinarySvm& model, std::span<const double> x) {
    std::vector<double> standardized;
    std::span<const double> input = x;
    if (model.standardizer) {
        standardized = model.standardizer->apply(x);
        input = standardized;
    }
    if (model.support_vectors.rows() > 0 && input.size() != model.support_vectors.cols()) {
        throw DimMismatch("decision input has dimension " + std::to_string(input.size()) + ", model expects " +
                          std::to_string(model.support_vectors.cols()));
    }
    double f = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.rows(); ++i) {
        f += model.dual_coefs[i] * kernel_value(model.kernel, model.support_vectors.row(i), input);
    }
    return f;
}

MulticlassSvm ova_train(const Matrix& x, const std::vector<FaultClass>& labels, const OvaConfig& cfg) {
    if (labels.size() != x.rows()) throw LengthMismatch("labels must match the number of rows");
    std::set<FaultClass> present(labels.begin(), labels.end());
    if (present.size() < 2) throw SingleClass("one-vs-all training needs at least 2 classes");

    std::optional<Standardizer> standardizer;
    Matrix train = x;
    if (cfg.standardize) {
        standardizer = fit_standardizer(x);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto z = standardizer->apply(x.row(i));
            for (std::size_t j = 0; j < x.cols(); ++j) train(i, j) = z[j];
        }
    }

    MulticlassSvm model;
    model.class_order = {FaultClass::StructuralLooseness, FaultClass::Misalignment, FaultClass::BearingProblem};
    model.coding.assign(kNumClasses, std::vector<int>(kNumClasses, -1));
    for (int c = 0; c < kNumClasses; ++c) model.coding[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)] = 1;

    SmoConfig smo;
    smo.box_constraint = cfg.box_constraint;
    smo.kernel = cfg.kernel;
    smo.tol = cfg.tol;
    smo.max_passes = cfg.max_passes;
    for (int c = 0; c < kNumClasses; ++c) {
        std::vector<int> y(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            y[i] = static_cast<int>(labels[i]) == c ? 1 : -1;
        }
        BinarySvm learner = smo_train(train, y, smo);
        learner.standardizer = standardizer;
        model.learners.push_back(std::move(learner));
    }
    return model;
}

Decoded hinge_decode(const std::vector<std::vector<int>>& coding, const std::vector<double>& scores) {
    const std::size_t classes = coding.size();
    const std::size_t learners = scores.size();
    Decoded out;
    out.losses.assign(classes, 0.0);
    for (std::size_t c = 0; c < classes; ++c) {
        if (coding[c].size() != learners) throw ShapeMismatch("coding row length does not match learner count");
        double loss = 0.0;
        for (std::size_t l = 0; l < learners; ++l) {
            loss += std::max(0.0, 1.0 - static_cast<double>(coding[c][l]) * scores[l]);
        }
        out.losses[c] = loss / static_cast<double>(learners);
    }
    out.best_class = 0;
    for (std::size_t c = 1; c < classes; ++c) {
        if (out.losses[c] < out.losses[out.best_class]) out.best_class = c;
    }
    return out;
}

Prediction ova_predict(const MulticlassSvm& model, std::span<const double> x) {
    Prediction pred;
    pred.scores.reserve(model.learners.size());
    for (const auto& learner : model.learners) pred.scores.push_back(decision(learner, x));
    Decoded decoded = hinge_decode(model.coding, pred.scores);
    pred.losses = std::move(decoded.losses);
    pred.label = model.class_order.at(decoded.best_class);
    return pred;
}

}  // namespace vibrofdd::svm
