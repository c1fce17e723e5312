#pragma once

#include <string>
#include <utility>

#include "vbdp/common.hpp"

namespace vbdp {

enum class ClassifierKind { naive_bayes, logistic, linear_svm, mlp };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::logistic;
    double learning_rate = 0.1;
    int epochs = 200;
    int batch_size = 32;
    double l2 = 1e-4;
    std::vector<int> hidden = {16};  // mlp only
    uint64_t seed = 0;

    void validate() const;
};

// Fitted binary classifier exposing P(class 1 | x).
class TrainedClassifier {
public:
    double predict_proba(const Vector& x) const;
    int predict(const Vector& x) const { return predict_proba(x) >= 0.5 ? 1 : 0; }

    ClassifierKind kind() const { return kind_; }
    size_t input_dim() const { return dim_; }

    // flat parameter dump (layout documented in to_json)
    std::string to_json() const;
    static TrainedClassifier from_json(const std::string& text);

    // signed decision value before squashing (logistic / linear_svm only)
    double margin(const Vector& x) const;

private:
    friend TrainedClassifier fit(const ClassifierSpec&, const Matrix&, const std::vector<int>&);

    ClassifierKind kind_ = ClassifierKind::logistic;
    size_t dim_ = 0;

    // naive bayes
    Vector nb_mean_[2], nb_var_[2];
    double nb_prior_[2] = {0, 0};

    // logistic / linear svm
    Vector weights_;
    double bias_ = 0;

    // mlp: layer l maps widths_[l] -> widths_[l+1]
    std::vector<int> mlp_widths_;
    std::vector<Matrix> mlp_w_;
    std::vector<Vector> mlp_b_;

    Vector mlp_forward(const Vector& x) const;
};

TrainedClassifier fit(const ClassifierSpec& spec, const Matrix& features,
                      const std::vector<int>& labels);

namespace detail {

// Mean cross-entropy loss and analytic gradient for logistic regression on a
// batch; exposed so finite-difference tests can target the same code path the
// trainer uses.
std::pair<double, Vector> logistic_loss_grad(const Vector& weights, double bias,
                                             const Matrix& X, const std::vector<int>& y,
                                             double l2);

// Same for the MLP given a flat parameter vector (layer-major, weights then
// biases per layer).
std::pair<double, Vector> mlp_loss_grad(const std::vector<int>& widths, const Vector& params,
                                        const Matrix& X, const std::vector<int>& y, double l2);

size_t mlp_param_count(const std::vector<int>& widths);

}  // namespace detail

}  // namespace vbdp
