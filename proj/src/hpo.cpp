#include "vibrofdd/hpo.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numbers>

#include "vibrofdd/errors.hpp"
#include "vibrofdd/io.hpp"
#include "vibrofdd/rng.hpp"

namespace vibrofdd::hpo {

namespace {

constexpr std::size_t kHaltonPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

double halton(std::size_t index, std::size_t base) {
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

double to_unit(const ContinuousDim& dim, double value) {
    if (dim.log_scale) {
        return (std::log(value) - std::log(dim.lo)) / (std::log(dim.hi) - std::log(dim.lo));
    }
    return (value - dim.lo) / (dim.hi - dim.lo);
}

double from_unit(const ContinuousDim& dim, double u) {
    if (dim.log_scale) {
        return std::exp(std::log(dim.lo) + u * (std::log(dim.hi) - std::log(dim.lo)));
    }
    return dim.lo + u * (dim.hi - dim.lo);
}

std::size_t embedded_dim(const Space& space) {
    std::size_t d = 0;
    for (const auto& dim : space.dims) {
        if (std::holds_alternative<ContinuousDim>(dim)) {
            d += 1;
        } else {
            d += std::get<CategoricalDim>(dim).values.size();
        }
    }
    return d;
}

// Continuous dims map to [0,1] (log scale where declared); categorical dims
// become one-hot blocks so every category pair is equidistant.
std::vector<double> embed(const Space& space, const Point& p) {
    std::vector<double> out;
    out.reserve(embedded_dim(space));
    for (std::size_t i = 0; i < space.dims.size(); ++i) {
        if (const auto* c = std::get_if<ContinuousDim>(&space.dims[i])) {
            out.push_back(to_unit(*c, p[i]));
        } else {
            const auto& cat = std::get<CategoricalDim>(space.dims[i]);
            const auto choice = static_cast<std::size_t>(p[i]);
            for (std::size_t v = 0; v < cat.values.size(); ++v) {
                out.push_back(v == choice ? 1.0 : 0.0);
            }
        }
    }
    return out;
}

Point sample_point(const Space& space, SplitMix64& rng) {
    Point p(space.dims.size());
    for (std::size_t i = 0; i < space.dims.size(); ++i) {
        if (const auto* c = std::get_if<ContinuousDim>(&space.dims[i])) {
            p[i] = from_unit(*c, rng.uniform());
        } else {
            const auto& cat = std::get<CategoricalDim>(space.dims[i]);
            p[i] = static_cast<double>(rng.integer(cat.values.size()));
        }
    }
    return p;
}

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace

bool point_in_bounds(const Space& space, const Point& p) {
    if (p.size() != space.dims.size()) return false;
    for (std::size_t i = 0; i < space.dims.size(); ++i) {
        if (const auto* c = std::get_if<ContinuousDim>(&space.dims[i])) {
            if (!(p[i] >= c->lo && p[i] <= c->hi)) return false;
        } else {
            const auto& cat = std::get<CategoricalDim>(space.dims[i]);
            const double idx = p[i];
            if (idx != std::floor(idx) || idx < 0.0 || idx >= static_cast<double>(cat.values.size())) return false;
        }
    }
    return true;
}

void GpSurrogate::fit(const Matrix& x, const std::vector<double>& y) {
    const std::size_t n = x.rows();
    if (n == 0 || y.size() != n) throw LengthMismatch("GP fit needs one observation per row");
    train_x_ = x;
    y_mean_ = 0.0;
    for (double v : y) y_mean_ += v;
    y_mean_ /= static_cast<double>(n);

    const double two_l2 = 2.0 * length_scale_ * length_scale_;
    Matrix a(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = 1.0 + noise_variance_;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double k = std::exp(-squared_distance(x.row(i), x.row(j)) / two_l2);
            a(i, j) = k;
            a(j, i) = k;
        }
    }

    // Cholesky with escalating jitter; near-duplicate points can make the
    // Gram numerically singular.
    double jitter = 0.0;
    for (int attempt = 0; attempt < 6; ++attempt) {
        chol_ = a;
        if (jitter > 0.0) {
            for (std::size_t i = 0; i < n; ++i) chol_(i, i) += jitter;
        }
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = chol_(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= chol_(i, k) * chol_(j, k);
                if (i == j) {
                    if (s <= 0.0) {
                        ok = false;
                        break;
                    }
                    chol_(i, i) = std::sqrt(s);
                } else {
                    chol_(i, j) = s / chol_(j, j);
                }
            }
        }
        if (ok) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) chol_(i, j) = 0.0;
            }
            alpha_.assign(n, 0.0);
            // Solve L L^T alpha = y - mean
            std::vector<double> tmp(n);
            for (std::size_t i = 0; i < n; ++i) {
                double s = y[i] - y_mean_;
                for (std::size_t k = 0; k < i; ++k) s -= chol_(i, k) * tmp[k];
                tmp[i] = s / chol_(i, i);
            }
            for (std::size_t ii = n; ii-- > 0;) {
                double s = tmp[ii];
                for (std::size_t k = ii + 1; k < n; ++k) s -= chol_(k, ii) * alpha_[k];
                alpha_[ii] = s / chol_(ii, ii);
            }
            return;
        }
        jitter = jitter == 0.0 ? 1e-10 : jitter * 100.0;
    }
    throw NumericError("GP Cholesky factorization failed");
}

GpSurrogate::MeanVar GpSurrogate::predict(std::span<const double> x) const {
    const std::size_t n = train_x_.rows();
    const double two_l2 = 2.0 * length_scale_ * length_scale_;
    std::vector<double> k_star(n);
    for (std::size_t i = 0; i < n; ++i) {
        k_star[i] = std::exp(-squared_distance(train_x_.row(i), x) / two_l2);
    }
    MeanVar out;
    out.mean = y_mean_ + dot(k_star, alpha_);

    // var = 1 - k*^T (K + noise I)^{-1} k*, via one triangular solve
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = k_star[i];
        for (std::size_t k = 0; k < i; ++k) s -= chol_(i, k) * w[k];
        w[i] = s / chol_(i, i);
    }
    double explained = 0.0;
    for (double v : w) explained += v * v;
    out.variance = std::max(1.0 - explained, 1e-18);
    return out;
}

double expected_improvement(double mean, double sd, double best) {
    const double delta = best - mean;
    if (sd <= 0.0) return std::max(delta, 0.0);
    const double z = delta / sd;
    return delta * normal_cdf(z) + sd * normal_pdf(z);
}

BayesResult bayes_opt(const Objective& objective, const Space& space, std::size_t n_iter, std::uint64_t seed) {
    if (space.dims.empty()) throw DataError("search space is empty");
    if (n_iter < 5) throw DataError("bayes_opt needs n_iter >= 5");

    SplitMix64 rng = substream(seed, streams::kBayesOpt);

    BayesResult result;
    std::vector<std::vector<double>> embedded;
    std::vector<double> errors;

    auto evaluate = [&](const Point& p, TraceStep step) {
        step.point = p;
        try {
            step.observed_error = objective(p);
            step.objective_failed = false;
        } catch (const std::exception&) {
            step.observed_error = 1.0;
            step.objective_failed = true;
        }
        embedded.push_back(embed(space, p));
        errors.push_back(step.observed_error);
        const double best_so_far =
            result.trace.steps.empty() ? step.observed_error
                                       : std::min(step.observed_error, result.trace.steps.back().running_best_error);
        step.running_best_error = best_so_far;
        result.trace.steps.push_back(std::move(step));
    };

    // Quasi-random initialization: Halton points with a seeded
    // Cranley-Patterson shift per continuous dim, seeded categorical picks.
    std::vector<double> shifts(space.dims.size());
    for (double& s : shifts) s = rng.uniform();
    const std::size_t n_init = std::min(kInitialPoints, n_iter);
    for (std::size_t i = 0; i < n_init; ++i) {
        Point p(space.dims.size());
        std::size_t cont_index = 0;
        for (std::size_t d = 0; d < space.dims.size(); ++d) {
            if (const auto* c = std::get_if<ContinuousDim>(&space.dims[d])) {
                const std::size_t base = kHaltonPrimes[cont_index % std::size(kHaltonPrimes)];
                double u = halton(i + 1, base) + shifts[d];
                u -= std::floor(u);
                p[d] = from_unit(*c, u);
                ++cont_index;
            } else {
                const auto& cat = std::get<CategoricalDim>(space.dims[d]);
                p[d] = static_cast<double>(rng.integer(cat.values.size()));
            }
        }
        evaluate(p, TraceStep{});
    }

    GpSurrogate surrogate(kGpLengthScale, kGpNoiseStd);
    for (std::size_t iter = n_init; iter < n_iter; ++iter) {
        Matrix x(embedded.size(), embedded_dim(space), 0.0);
        for (std::size_t i = 0; i < embedded.size(); ++i) {
            for (std::size_t j = 0; j < embedded[i].size(); ++j) x(i, j) = embedded[i][j];
        }
        surrogate.fit(x, errors);
        const double best = *std::min_element(errors.begin(), errors.end());

        Point best_candidate;
        double best_ei = -1.0;
        GpSurrogate::MeanVar best_mv;
        for (std::size_t c = 0; c < kCandidatePoints; ++c) {
            const Point cand = sample_point(space, rng);
            const auto mv = surrogate.predict(embed(space, cand));
            const double ei = expected_improvement(mv.mean, std::sqrt(mv.variance), best);
            if (ei > best_ei) {
                best_ei = ei;
                best_candidate = cand;
                best_mv = mv;
            }
        }
        TraceStep step;
        step.expected_improvement = best_ei;
        step.posterior_mean = best_mv.mean;
        step.posterior_sd = std::sqrt(best_mv.variance);
        evaluate(best_candidate, std::move(step));
    }

    std::size_t best_index = 0;
    for (std::size_t i = 1; i < result.trace.steps.size(); ++i) {
        if (result.trace.steps[i].observed_error < result.trace.steps[best_index].observed_error) best_index = i;
    }
    result.best_point = result.trace.steps[best_index].point;
    result.best_error = result.trace.steps[best_index].observed_error;
    return result;
}

Space svm_search_space() {
    Space space;
    space.dims.push_back(ContinuousDim{"box_constraint", 1e-3, 1e3, true});
    space.dims.push_back(ContinuousDim{"kernel_scale", 1e-3, 1e3, true});
    space.dims.push_back(CategoricalDim{"standardize", {"false", "true"}});
    space.dims.push_back(CategoricalDim{"coding", {"one_vs_all"}});
    return space;
}

SvmHyperparams params_from_point(const Space& space, const Point& p) {
    SvmHyperparams params;
    for (std::size_t i = 0; i < space.dims.size(); ++i) {
        if (const auto* c = std::get_if<ContinuousDim>(&space.dims[i])) {
            if (c->name == "box_constraint") params.box_constraint = p[i];
            if (c->name == "kernel_scale") params.kernel_scale = p[i];
        } else {
            const auto& cat = std::get<CategoricalDim>(space.dims[i]);
            if (cat.name == "standardize") params.standardize = cat.values.at(static_cast<std::size_t>(p[i])) == "true";
        }
    }
    return params;
}

double cv_error(const Matrix& x, const std::vector<FaultClass>& labels, const SvmHyperparams& params,
                std::size_t k_folds, std::uint64_t seed) {
    if (k_folds < 2) throw DataError("k_folds must be >= 2");
    if (labels.size() != x.rows()) throw LengthMismatch("labels must match the number of rows");

    std::vector<std::vector<std::size_t>> per_class(kNumClasses);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        per_class[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    for (int c = 0; c < kNumClasses; ++c) {
        auto& idx = per_class[static_cast<std::size_t>(c)];
        if (!idx.empty() && idx.size() < k_folds) {
            throw ClassTooSmall("class " + fault_class_name(static_cast<FaultClass>(c)) + " has " +
                                std::to_string(idx.size()) + " samples, needs >= " + std::to_string(k_folds));
        }
    }

    // Stratified fold assignment: shuffle each class, deal round-robin.
    std::vector<std::size_t> fold_of(labels.size(), 0);
    for (int c = 0; c < kNumClasses; ++c) {
        auto& idx = per_class[static_cast<std::size_t>(c)];
        SplitMix64 rng = substream(mix_seed(seed, streams::kCrossValidation), static_cast<std::uint64_t>(c));
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[rng.integer(i)]);
        }
        for (std::size_t i = 0; i < idx.size(); ++i) fold_of[idx[i]] = i % k_folds;
    }

    svm::OvaConfig cfg;
    cfg.box_constraint = params.box_constraint;
    cfg.kernel.scale = params.kernel_scale;
    cfg.standardize = params.standardize;

    double error_sum = 0.0;
    for (std::size_t fold = 0; fold < k_folds; ++fold) {
        std::vector<std::size_t> train_idx;
        std::vector<std::size_t> test_idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            (fold_of[i] == fold ? test_idx : train_idx).push_back(i);
        }
        Matrix train(train_idx.size(), x.cols(), 0.0);
        std::vector<FaultClass> train_labels(train_idx.size());
        for (std::size_t r = 0; r < train_idx.size(); ++r) {
            for (std::size_t c = 0; c < x.cols(); ++c) train(r, c) = x(train_idx[r], c);
            train_labels[r] = labels[train_idx[r]];
        }
        const svm::MulticlassSvm model = svm::ova_train(train, train_labels, cfg);
        std::size_t wrong = 0;
        for (const std::size_t i : test_idx) {
            if (svm::ova_predict(model, x.row(i)).label != labels[i]) ++wrong;
        }
        error_sum += test_idx.empty() ? 0.0 : static_cast<double>(wrong) / static_cast<double>(test_idx.size());
    }
    return error_sum / static_cast<double>(k_folds);
}

TuneResult tune_svm(const Matrix& x, const std::vector<FaultClass>& labels, std::size_t n_iter, std::uint64_t seed,
                    std::size_t k_folds) {
    TuneResult result;
    result.space = svm_search_space();
    const Objective objective = [&](const Point& p) {
        return cv_error(x, labels, params_from_point(result.space, p), k_folds, seed);
    };
    BayesResult bayes = bayes_opt(objective, result.space, n_iter, seed);
    result.best_params = params_from_point(result.space, bayes.best_point);
    result.best_cv_error = bayes.best_error;
    result.trace = std::move(bayes.trace);

    svm::OvaConfig cfg;
    cfg.box_constraint = result.best_params.box_constraint;
    cfg.kernel.scale = result.best_params.kernel_scale;
    cfg.standardize = result.best_params.standardize;
    result.model = svm::ova_train(x, labels, cfg);
    return result;
}

std::string trace_to_csv(const Space& space, const TuneTrace& trace) {
    std::string out = "iteration";
    for (const auto& dim : space.dims) {
        out += ',';
        if (const auto* c = std::get_if<ContinuousDim>(&dim)) {
            out += c->name;
        } else {
            out += std::get<CategoricalDim>(dim).name;
        }
    }
    out += ",observed_error,running_best,failed,expected_improvement,posterior_mean,posterior_sd\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& step = trace.steps[i];
        out += std::to_string(i + 1);
        for (std::size_t d = 0; d < space.dims.size(); ++d) {
            out += ',';
            if (std::holds_alternative<ContinuousDim>(space.dims[d])) {
                out += format_double(step.point[d]);
            } else {
                const auto& cat = std::get<CategoricalDim>(space.dims[d]);
                out += cat.values.at(static_cast<std::size_t>(step.point[d]));
            }
        }
        out += ',';
        out += format_double(step.observed_error);
        out += ',';
        out += format_double(step.running_best_error);
        out += ',';
        out += step.objective_failed ? "1" : "0";
        out += ',';
        out += step.expected_improvement ? format_double(*step.expected_improvement) : "";
        out += ',';
        out += step.posterior_mean ? format_double(*step.posterior_mean) : "";
        out += ',';
        out += step.posterior_sd ? format_double(*step.posterior_sd) : "";
        out += '\n';
    }
    return out;
}

}  // namespace vibrofdd::hpo
