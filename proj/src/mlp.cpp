#include "vibrofdd/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

#include "vibrofdd/errors.hpp"
#include "vibrofdd/rng.hpp"

namespace vibrofdd::mlp {

namespace {

struct ForwardState {
    // Pre-activations and activations per layer; activations[0] is the input.
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
};

void forward_pass(const MlpModel& model, std::span<const double> x, ForwardState& state) {
    const std::size_t layers = model.weights.size();
    state.pre.assign(layers, {});
    state.act.assign(layers + 1, {});
    state.act[0].assign(x.begin(), x.end());

    for (std::size_t l = 0; l < layers; ++l) {
        const Matrix& w = model.weights[l];
        const auto& b = model.biases[l];
        std::vector<double> z(w.rows());
        for (std::size_t r = 0; r < w.rows(); ++r) {
            z[r] = b[r] + dot(w.row(r), state.act[l]);
        }
        state.pre[l] = z;
        if (l + 1 < layers) {
            for (double& v : z) v = std::max(v, 0.0);  // ReLU
            state.act[l + 1] = std::move(z);
        } else {
            // Stable softmax
            const double zmax = *std::max_element(z.begin(), z.end());
            double sum = 0.0;
            for (double& v : z) {
                v = std::exp(v - zmax);
                sum += v;
            }
            for (double& v : z) v /= sum;
            state.act[l + 1] = std::move(z);
        }
    }
}

std::size_t param_count(const MlpModel& model) {
    std::size_t n = 0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        n += model.weights[l].rows() * model.weights[l].cols() + model.biases[l].size();
    }
    return n;
}

}  // namespace

MlpModel init_model(std::size_t input_dim, std::uint64_t seed) {
    if (input_dim == 0) throw DataError("MLP input dimension must be positive");
    MlpModel model;
    model.layer_sizes = {input_dim, kHiddenWidth, kHiddenWidth, static_cast<std::size_t>(kNumClasses)};
    SplitMix64 rng = substream(seed, streams::kMlpInit);
    for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
        const std::size_t fan_in = model.layer_sizes[l];
        const std::size_t fan_out = model.layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        Matrix w(fan_out, fan_in, 0.0);
        for (double& v : w.data()) v = rng.uniform(-limit, limit);
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(fan_out, 0.0);
    }
    return model;
}

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
    if (x.size() != model.input_dim()) {
        throw DimMismatch("MLP input has dimension " + std::to_string(x.size()) + ", model expects " +
                          std::to_string(model.input_dim()));
    }
    ForwardState state;
    forward_pass(model, x, state);
    return state.act.back();
}

std::pair<double, Gradient> loss_and_grad(const MlpModel& model, const Matrix& x,
                                          const std::vector<FaultClass>& labels) {
    const std::size_t n = x.rows();
    if (n == 0) throw DataError("empty batch");
    if (labels.size() != n) throw LengthMismatch("labels must match the number of rows");
    if (x.cols() != model.input_dim()) {
        throw DimMismatch("batch has " + std::to_string(x.cols()) + " columns, model expects " +
                          std::to_string(model.input_dim()));
    }

    Gradient grad;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        grad.weights.emplace_back(model.weights[l].rows(), model.weights[l].cols(), 0.0);
        grad.biases.emplace_back(model.biases[l].size(), 0.0);
    }

    const std::size_t layers = model.weights.size();
    double loss = 0.0;
    ForwardState state;
    for (std::size_t i = 0; i < n; ++i) {
        forward_pass(model, x.row(i), state);
        const auto& probs = state.act.back();
        const auto target = static_cast<std::size_t>(labels[i]);

        // log p via the pre-activation logits for numerical exactness
        const auto& logits = state.pre.back();
        const double zmax = *std::max_element(logits.begin(), logits.end());
        double lse = 0.0;
        for (double z : logits) lse += std::exp(z - zmax);
        loss += -(logits[target] - zmax - std::log(lse));

        // delta for the softmax + cross-entropy head
        std::vector<double> delta(probs.size());
        for (std::size_t c = 0; c < probs.size(); ++c) {
            delta[c] = probs[c] - (c == target ? 1.0 : 0.0);
        }
        for (std::size_t l = layers; l-- > 0;) {
            auto& gw = grad.weights[l];
            auto& gb = grad.biases[l];
            const auto& input = state.act[l];
            for (std::size_t r = 0; r < gw.rows(); ++r) {
                gb[r] += delta[r];
                for (std::size_t c = 0; c < gw.cols(); ++c) gw(r, c) += delta[r] * input[c];
            }
            if (l == 0) break;
            std::vector<double> prev(model.weights[l].cols(), 0.0);
            for (std::size_t c = 0; c < prev.size(); ++c) {
                double s = 0.0;
                for (std::size_t r = 0; r < model.weights[l].rows(); ++r) {
                    s += model.weights[l](r, c) * delta[r];
                }
                prev[c] = state.pre[l - 1][c] > 0.0 ? s : 0.0;  // ReLU'
            }
            delta = std::move(prev);
        }
    }

    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    for (std::size_t l = 0; l < layers; ++l) {
        for (double& v : grad.weights[l].data()) v *= inv_n;
        for (double& v : grad.biases[l]) v *= inv_n;
    }
    return {loss, std::move(grad)};
}

std::vector<double> flatten(const MlpModel& model) {
    std::vector<double> out;
    out.reserve(param_count(model));
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        out.insert(out.end(), model.weights[l].data().begin(), model.weights[l].data().end());
        out.insert(out.end(), model.biases[l].begin(), model.biases[l].end());
    }
    return out;
}

void unflatten(std::span<const double> params, MlpModel& model) {
    std::size_t offset = 0;
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        auto& wdata = model.weights[l].data();
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), wdata.size(), wdata.begin());
        offset += wdata.size();
        std::copy_n(params.begin() + static_cast<std::ptrdiff_t>(offset), model.biases[l].size(),
                    model.biases[l].begin());
        offset += model.biases[l].size();
    }
}

std::vector<double> flatten_grad(const Gradient& grad) {
    std::vector<double> out;
    for (std::size_t l = 0; l < grad.weights.size(); ++l) {
        out.insert(out.end(), grad.weights[l].data().begin(), grad.weights[l].data().end());
        out.insert(out.end(), grad.biases[l].begin(), grad.biases[l].end());
    }
    return out;
}

TrainResult lbfgs_train(const Matrix& x, const std::vector<FaultClass>& labels, std::size_t max_iter,
                        std::uint64_t seed) {
    if (x.rows() == 0) throw DataError("empty training set");
    if (std::set<FaultClass>(labels.begin(), labels.end()).size() < 2) {
        throw SingleClass("MLP training needs at least 2 classes");
    }

    TrainResult result;
    result.model = init_model(x.cols(), seed);
    if (max_iter == 0) return result;

    std::vector<double> theta = flatten(result.model);
    auto eval = [&](const std::vector<double>& params) {
        unflatten(params, result.model);
        auto [loss, grad] = loss_and_grad(result.model, x, labels);
        return std::make_pair(loss, flatten_grad(grad));
    };

    auto [f, g] = eval(theta);
    result.loss_history.push_back(f);

    constexpr std::size_t kHistory = 10;
    constexpr double kArmijoC1 = 1e-4;
    std::deque<std::pair<std::vector<double>, std::vector<double>>> history;  // (s, y)

    const std::size_t dim = theta.size();
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < 1e-5) break;

        // Two-loop recursion
        std::vector<double> d = g;
        std::vector<double> rho(history.size());
        std::vector<double> a(history.size());
        for (std::size_t h = history.size(); h-- > 0;) {
            const auto& [s, yv] = history[h];
            rho[h] = 1.0 / dot(s, yv);
            a[h] = rho[h] * dot(s, d);
            for (std::size_t k = 0; k < dim; ++k) d[k] -= a[h] * yv[k];
        }
        if (!history.empty()) {
            const auto& [s, yv] = history.back();
            const double gamma = dot(s, yv) / dot(yv, yv);
            for (double& v : d) v *= gamma;
        }
        for (std::size_t h = 0; h < history.size(); ++h) {
            const auto& [s, yv] = history[h];
            const double beta = rho[h] * dot(yv, d);
            for (std::size_t k = 0; k < dim; ++k) d[k] += (a[h] - beta) * s[k];
        }
        for (double& v : d) v = -v;

        double slope = dot(g, d);
        if (slope >= 0.0) {  // not a descent direction; restart from steepest descent
            history.clear();
            for (std::size_t k = 0; k < dim; ++k) d[k] = -g[k];
            slope = dot(g, d);
        }

        double t = 1.0;
        std::vector<double> candidate(dim);
        double f_new = f;
        std::vector<double> g_new;
        bool accepted = false;
        while (t >= 1e-20) {
            for (std::size_t k = 0; k < dim; ++k) candidate[k] = theta[k] + t * d[k];
            auto [fc, gc] = eval(candidate);
            if (fc <= f + kArmijoC1 * t * slope) {
                f_new = fc;
                g_new = std::move(gc);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            result.line_search_failed = true;
            break;
        }

        std::vector<double> s(dim);
        std::vector<double> yv(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            s[k] = candidate[k] - theta[k];
            yv[k] = g_new[k] - g[k];
        }
        if (dot(s, yv) > 1e-10) {
            history.emplace_back(std::move(s), std::move(yv));
            if (history.size() > kHistory) history.pop_front();
        }

        theta = std::move(candidate);
        candidate.assign(dim, 0.0);
        g = std::move(g_new);
        result.loss_history.push_back(f_new);
        ++result.iterations;
        const double improvement = f - f_new;
        f = f_new;
        if (improvement < 1e-9) break;
    }

    unflatten(theta, result.model);
    return result;
}

FaultClass predict(const MlpModel& model, std::span<const double> x) {
    const std::vector<double> probs = forward(model, x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < probs.size(); ++c) {
        if (probs[c] > probs[best]) best = c;
    }
    return static_cast<FaultClass>(best);
}

}  // namespace vibrofdd::mlp
