#include "vbdp/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

namespace vbdp {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

double dot(const Vector& a, const Vector& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_training_input(const Matrix& X, const std::vector<int>& y) {
    if (X.empty() || X.size() != y.size())
        throw std::invalid_argument("fit: empty data or feature/label count mismatch");
    bool has0 = false, has1 = false;
    for (int v : y) (v == 1 ? has1 : has0) = true;
    if (!has0 || !has1) throw std::invalid_argument("fit: both classes must be present");
    for (const auto& row : X)
        if (row.size() != X[0].size()) throw std::invalid_argument("fit: ragged features");
}

std::vector<std::vector<size_t>> make_batches(size_t n, int batch_size, Rng& rng) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::vector<size_t>> batches;
    for (size_t start = 0; start < n; start += static_cast<size_t>(batch_size)) {
        size_t end = std::min(n, start + static_cast<size_t>(batch_size));
        batches.emplace_back(order.begin() + static_cast<long>(start),
                             order.begin() + static_cast<long>(end));
    }
    return batches;
}

}  // namespace

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::naive_bayes: return "naive_bayes";
        case ClassifierKind::logistic: return "logistic";
        case ClassifierKind::linear_svm: return "linear_svm";
        case ClassifierKind::mlp: return "mlp";
    }
    throw std::logic_error("unknown classifier kind");
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
    if (name == "naive_bayes") return ClassifierKind::naive_bayes;
    if (name == "logistic") return ClassifierKind::logistic;
    if (name == "linear_svm") return ClassifierKind::linear_svm;
    if (name == "mlp") return ClassifierKind::mlp;
    throw std::invalid_argument("unknown classifier kind: " + name);
}

void ClassifierSpec::validate() const {
    if (learning_rate <= 0) throw std::invalid_argument("spec: learning_rate must be positive");
    if (epochs < 1) throw std::invalid_argument("spec: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("spec: batch_size must be >= 1");
    if (l2 < 0) throw std::invalid_argument("spec: l2 must be non-negative");
    for (int h : hidden)
        if (h < 1) throw std::invalid_argument("spec: hidden widths must be positive");
}

namespace detail {

std::pair<double, Vector> logistic_loss_grad(const Vector& weights, double bias, const Matrix& X,
                                             const std::vector<int>& y, double l2) {
    const size_t n = X.size();
    const size_t d = weights.size();
    Vector grad(d + 1, 0.0);
    double loss = 0;
    for (size_t i = 0; i < n; ++i) {
        double p = sigmoid(dot(weights, X[i]) + bias);
        double t = y[i];
        loss += -(t * std::log(std::max(p, 1e-300)) +
                  (1 - t) * std::log(std::max(1 - p, 1e-300)));
        double err = p - t;
        for (size_t j = 0; j < d; ++j) grad[j] += err * X[i][j];
        grad[d] += err;
    }
    loss /= static_cast<double>(n);
    for (auto& g : grad) g /= static_cast<double>(n);
    for (size_t j = 0; j < d; ++j) {
        loss += 0.5 * l2 * weights[j] * weights[j];
        grad[j] += l2 * weights[j];
    }
    return {loss, grad};
}

size_t mlp_param_count(const std::vector<int>& widths) {
    size_t n = 0;
    for (size_t l = 0; l + 1 < widths.size(); ++l)
        n += static_cast<size_t>(widths[l]) * widths[l + 1] + widths[l + 1];
    return n;
}

std::pair<double, Vector> mlp_loss_grad(const std::vector<int>& widths, const Vector& params,
                                        const Matrix& X, const std::vector<int>& y, double l2) {
    if (params.size() != mlp_param_count(widths))
        throw std::invalid_argument("mlp_loss_grad: parameter count mismatch");
    const size_t layers = widths.size() - 1;
    const size_t n = X.size();

    // slice offsets into the flat vector: per layer W (out x in), then b
    std::vector<size_t> w_off(layers), b_off(layers);
    size_t off = 0;
    for (size_t l = 0; l < layers; ++l) {
        w_off[l] = off;
        off += static_cast<size_t>(widths[l]) * widths[l + 1];
        b_off[l] = off;
        off += static_cast<size_t>(widths[l + 1]);
    }

    Vector grad(params.size(), 0.0);
    double loss = 0;

    std::vector<Vector> act(layers + 1);
    std::vector<Vector> pre(layers);
    for (size_t i = 0; i < n; ++i) {
        act[0] = X[i];
        for (size_t l = 0; l < layers; ++l) {
            const int in = widths[l], out = widths[l + 1];
            pre[l].assign(static_cast<size_t>(out), 0.0);
            for (int r = 0; r < out; ++r) {
                double s = params[b_off[l] + static_cast<size_t>(r)];
                const size_t row = w_off[l] + static_cast<size_t>(r) * in;
                for (int c = 0; c < in; ++c) s += params[row + static_cast<size_t>(c)] * act[l][static_cast<size_t>(c)];
                pre[l][static_cast<size_t>(r)] = s;
            }
            act[l + 1].resize(static_cast<size_t>(out));
            const bool last = (l + 1 == layers);
            for (int r = 0; r < out; ++r)
                act[l + 1][static_cast<size_t>(r)] =
                    last ? sigmoid(pre[l][static_cast<size_t>(r)]) : std::max(0.0, pre[l][static_cast<size_t>(r)]);
        }
        double p = act[layers][0];
        double t = y[i];
        loss += -(t * std::log(std::max(p, 1e-300)) +
                  (1 - t) * std::log(std::max(1 - p, 1e-300)));

        // backward; sigmoid + cross-entropy collapses to (p - t)
        Vector delta{p - t};
        for (size_t l = layers; l-- > 0;) {
            const int in = widths[l], out = widths[l + 1];
            for (int r = 0; r < out; ++r) {
                const size_t row = w_off[l] + static_cast<size_t>(r) * in;
                for (int c = 0; c < in; ++c)
                    grad[row + static_cast<size_t>(c)] += delta[static_cast<size_t>(r)] * act[l][static_cast<size_t>(c)];
                grad[b_off[l] + static_cast<size_t>(r)] += delta[static_cast<size_t>(r)];
            }
            if (l == 0) break;
            Vector prev(static_cast<size_t>(in), 0.0);
            for (int c = 0; c < in; ++c) {
                double s = 0;
                for (int r = 0; r < out; ++r)
                    s += params[w_off[l] + static_cast<size_t>(r) * in + static_cast<size_t>(c)] * delta[static_cast<size_t>(r)];
                prev[static_cast<size_t>(c)] = pre[l - 1][static_cast<size_t>(c)] > 0 ? s : 0.0;
            }
            delta = std::move(prev);
        }
    }
    loss /= static_cast<double>(n);
    for (auto& g : grad) g /= static_cast<double>(n);
    // L2 on weight blocks only
    for (size_t l = 0; l < layers; ++l) {
        const size_t count = static_cast<size_t>(widths[l]) * widths[l + 1];
        for (size_t idx = w_off[l]; idx < w_off[l] + count; ++idx) {
            loss += 0.5 * l2 * params[idx] * params[idx];
            grad[idx] += l2 * params[idx];
        }
    }
    return {loss, grad};
}

}  // namespace detail

double TrainedClassifier::margin(const Vector& x) const {
    if (x.size() != dim_) throw std::invalid_argument("margin: dimension mismatch");
    if (kind_ != ClassifierKind::logistic && kind_ != ClassifierKind::linear_svm)
        throw std::logic_error("margin: only defined for linear models");
    return dot(weights_, x) + bias_;
}

Vector TrainedClassifier::mlp_forward(const Vector& x) const {
    Vector a = x;
    for (size_t l = 0; l < mlp_w_.size(); ++l) {
        const bool last = (l + 1 == mlp_w_.size());
        Vector next(mlp_w_[l].size());
        for (size_t r = 0; r < mlp_w_[l].size(); ++r) {
            double s = mlp_b_[l][r] + dot(mlp_w_[l][r], a);
            next[r] = last ? sigmoid(s) : std::max(0.0, s);
        }
        a = std::move(next);
    }
    return a;
}

double TrainedClassifier::predict_proba(const Vector& x) const {
    if (x.size() != dim_) throw std::invalid_argument("predict_proba: dimension mismatch");
    switch (kind_) {
        case ClassifierKind::logistic:
        case ClassifierKind::linear_svm:
            return sigmoid(dot(weights_, x) + bias_);
        case ClassifierKind::mlp:
            return mlp_forward(x)[0];
        case ClassifierKind::naive_bayes: {
            double logp[2];
            for (int cls = 0; cls < 2; ++cls) {
                double lp = std::log(nb_prior_[cls]);
                for (size_t j = 0; j < dim_; ++j) {
                    double var = nb_var_[cls][j];
                    double diff = x[j] - nb_mean_[cls][j];
                    lp += -0.5 * std::log(2.0 * M_PI * var) - diff * diff / (2.0 * var);
                }
                logp[cls] = lp;
            }
            double m = std::max(logp[0], logp[1]);
            double e0 = std::exp(logp[0] - m), e1 = std::exp(logp[1] - m);
            return e1 / (e0 + e1);
        }
    }
    throw std::logic_error("unknown classifier kind");
}

TrainedClassifier fit(const ClassifierSpec& spec, const Matrix& features,
                      const std::vector<int>& labels) {
    spec.validate();
    check_training_input(features, labels);
    const size_t n = features.size();
    const size_t d = features[0].size();

    TrainedClassifier model;
    model.kind_ = spec.kind;
    model.dim_ = d;

    if (spec.kind == ClassifierKind::naive_bayes) {
        size_t count[2] = {0, 0};
        for (int cls = 0; cls < 2; ++cls) {
            model.nb_mean_[cls].assign(d, 0.0);
            model.nb_var_[cls].assign(d, 0.0);
        }
        for (size_t i = 0; i < n; ++i) {
            int cls = labels[i];
            ++count[cls];
            for (size_t j = 0; j < d; ++j) model.nb_mean_[cls][j] += features[i][j];
        }
        for (int cls = 0; cls < 2; ++cls)
            for (size_t j = 0; j < d; ++j) model.nb_mean_[cls][j] /= static_cast<double>(count[cls]);
        for (size_t i = 0; i < n; ++i) {
            int cls = labels[i];
            for (size_t j = 0; j < d; ++j) {
                double diff = features[i][j] - model.nb_mean_[cls][j];
                model.nb_var_[cls][j] += diff * diff;
            }
        }
        double max_var = 0;
        for (int cls = 0; cls < 2; ++cls)
            for (size_t j = 0; j < d; ++j) {
                model.nb_var_[cls][j] /= static_cast<double>(count[cls]);
                max_var = std::max(max_var, model.nb_var_[cls][j]);
            }
        // smoothing keyed to the data scale, floored for all-constant features
        const double eps = std::max(1e-9 * max_var, 1e-12);
        for (int cls = 0; cls < 2; ++cls)
            for (size_t j = 0; j < d; ++j) model.nb_var_[cls][j] += eps;
        model.nb_prior_[0] = static_cast<double>(count[0]) / static_cast<double>(n);
        model.nb_prior_[1] = static_cast<double>(count[1]) / static_cast<double>(n);
        return model;
    }

    Rng rng(derive_seed(spec.seed, "fit/" + to_string(spec.kind), 0));

    if (spec.kind == ClassifierKind::logistic || spec.kind == ClassifierKind::linear_svm) {
        model.weights_.assign(d, 0.0);
        model.bias_ = 0.0;
        for (int epoch = 0; epoch < spec.epochs; ++epoch) {
            for (const auto& batch : make_batches(n, spec.batch_size, rng)) {
                Matrix bx;
                std::vector<int> by;
                bx.reserve(batch.size());
                by.reserve(batch.size());
                for (size_t idx : batch) {
                    bx.push_back(features[idx]);
                    by.push_back(labels[idx]);
                }
                if (spec.kind == ClassifierKind::logistic) {
                    auto [loss, grad] = detail::logistic_loss_grad(model.weights_, model.bias_, bx, by, spec.l2);
                    if (!std::isfinite(loss))
                        throw std::runtime_error("fit: non-finite loss at epoch " + std::to_string(epoch));
                    for (size_t j = 0; j < d; ++j) model.weights_[j] -= spec.learning_rate * grad[j];
                    model.bias_ -= spec.learning_rate * grad[d];
                } else {
                    // hinge subgradient, labels mapped to +-1
                    Vector grad(d, 0.0);
                    double gb = 0;
                    for (size_t i = 0; i < bx.size(); ++i) {
                        double yi = by[i] == 1 ? 1.0 : -1.0;
                        double m = yi * (dot(model.weights_, bx[i]) + model.bias_);
                        if (m < 1.0) {
                            for (size_t j = 0; j < d; ++j) grad[j] -= yi * bx[i][j];
                            gb -= yi;
                        }
                    }
                    const double bsz = static_cast<double>(bx.size());
                    for (size_t j = 0; j < d; ++j)
                        model.weights_[j] -= spec.learning_rate * (grad[j] / bsz + spec.l2 * model.weights_[j]);
                    model.bias_ -= spec.learning_rate * gb / bsz;
                    if (!std::isfinite(model.bias_))
                        throw std::runtime_error("fit: non-finite loss at epoch " + std::to_string(epoch));
                }
            }
        }
        return model;
    }

    // mlp
    std::vector<int> widths;
    widths.push_back(static_cast<int>(d));
    for (int h : spec.hidden) widths.push_back(h);
    widths.push_back(1);

    Vector params(detail::mlp_param_count(widths));
    {
        size_t off = 0;
        for (size_t l = 0; l + 1 < widths.size(); ++l) {
            double scale = 1.0 / std::sqrt(static_cast<double>(widths[l]));
            size_t wn = static_cast<size_t>(widths[l]) * widths[l + 1];
            for (size_t i = 0; i < wn; ++i) params[off++] = rng.uniform(-scale, scale);
            for (int i = 0; i < widths[l + 1]; ++i) params[off++] = 0.0;
        }
    }
    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        for (const auto& batch : make_batches(n, spec.batch_size, rng)) {
            Matrix bx;
            std::vector<int> by;
            for (size_t idx : batch) {
                bx.push_back(features[idx]);
                by.push_back(labels[idx]);
            }
            auto [loss, grad] = detail::mlp_loss_grad(widths, params, bx, by, spec.l2);
            if (!std::isfinite(loss))
                throw std::runtime_error("fit: non-finite loss at epoch " + std::to_string(epoch));
            for (size_t i = 0; i < params.size(); ++i) params[i] -= spec.learning_rate * grad[i];
        }
    }
    // unpack flat params into per-layer matrices
    model.mlp_widths_ = widths;
    size_t off = 0;
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        Matrix w(static_cast<size_t>(widths[l + 1]), Vector(static_cast<size_t>(widths[l])));
        for (auto& row : w)
            for (auto& v : row) v = params[off++];
        Vector b(static_cast<size_t>(widths[l + 1]));
        for (auto& v : b) v = params[off++];
        model.mlp_w_.push_back(std::move(w));
        model.mlp_b_.push_back(std::move(b));
    }
    return model;
}

std::string TrainedClassifier::to_json() const {
    nlohmann::json j;
    j["kind"] = vbdp::to_string(kind_);
    j["input_dim"] = dim_;
    switch (kind_) {
        case ClassifierKind::naive_bayes:
            j["mean0"] = nb_mean_[0];
            j["mean1"] = nb_mean_[1];
            j["var0"] = nb_var_[0];
            j["var1"] = nb_var_[1];
            j["prior0"] = nb_prior_[0];
            j["prior1"] = nb_prior_[1];
            break;
        case ClassifierKind::logistic:
        case ClassifierKind::linear_svm:
            j["weights"] = weights_;
            j["bias"] = bias_;
            break;
        case ClassifierKind::mlp:
            j["widths"] = mlp_widths_;
            j["weights"] = mlp_w_;
            j["biases"] = mlp_b_;
            break;
    }
    return j.dump(2);
}

TrainedClassifier TrainedClassifier::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TrainedClassifier m;
    m.kind_ = classifier_kind_from_string(j.at("kind").get<std::string>());
    m.dim_ = j.at("input_dim").get<size_t>();
    switch (m.kind_) {
        case ClassifierKind::naive_bayes:
            m.nb_mean_[0] = j.at("mean0").get<Vector>();
            m.nb_mean_[1] = j.at("mean1").get<Vector>();
            m.nb_var_[0] = j.at("var0").get<Vector>();
            m.nb_var_[1] = j.at("var1").get<Vector>();
            m.nb_prior_[0] = j.at("prior0").get<double>();
            m.nb_prior_[1] = j.at("prior1").get<double>();
            break;
        case ClassifierKind::logistic:
        case ClassifierKind::linear_svm:
            m.weights_ = j.at("weights").get<Vector>();
            m.bias_ = j.at("bias").get<double>();
            break;
        case ClassifierKind::mlp:
            m.mlp_widths_ = j.at("widths").get<std::vector<int>>();
            m.mlp_w_ = j.at("weights").get<std::vector<Matrix>>();
            m.mlp_b_ = j.at("biases").get<std::vector<Vector>>();
            break;
    }
    return m;
}

}  // namespace vbdp
