#include "vbdp/anomaly.hpp"

#include <algorithm>

#include "vbdp/vbd.hpp"

namespace vbdp {

AnomalyVerdict detect(const AEModel& model, const Matrix& train, const Vector& t,
                      const AnomalyConfig& config) {
    config.validate();
    if (train.size() < static_cast<size_t>(config.u))
        throw std::invalid_argument("detect: need at least u training instances");
    if (model.architecture().input_dim() != 2 * t.size())
        throw std::invalid_argument("detect: model input dim must be 2x test dimension");
    for (const auto& row : train)
        if (row.size() != t.size()) throw std::invalid_argument("detect: dimension mismatch");

    const size_t u = static_cast<size_t>(config.u);
    Rng p_rng(derive_seed(config.seed, "anomaly/P", 0));
    Rng q_rng(derive_seed(config.seed, "anomaly/Q", 0));
    auto p_idx = p_rng.sample_without_replacement(train.size(), u);
    auto q_idx = q_rng.sample_without_replacement(train.size(), u);

    AnomalyVerdict verdict;
    for (size_t i = 0; i < u; ++i) {
        double p = reconstruction_error(model, concat({t, train[p_idx[i]]}));
        double q = reconstruction_error(model, concat({train[p_idx[i]], train[q_idx[i]]}));
        if (p > q) ++verdict.count;
    }
    verdict.is_anomaly = verdict.count > config.w;
    return verdict;
}

bool detect_traditional(const AEModel& model, const Vector& t, double tau) {
    return reconstruction_error(model, t) > tau;
}

MetricsReport evaluate_detector(const std::function<bool(const Vector&)>& flags_anomaly,
                                const Matrix& positives, const Matrix& negatives) {
    if (positives.empty() || negatives.empty())
        throw std::invalid_argument("evaluate_detector: empty test set");
    std::vector<int> y_true, y_pred;
    Vector scores;  // 1 = predicted normal, for the rank AUC of the hard verdicts
    for (const auto& x : positives) {
        y_true.push_back(1);
        bool flagged = flags_anomaly(x);
        y_pred.push_back(flagged ? 0 : 1);
        scores.push_back(flagged ? 0.0 : 1.0);
    }
    for (const auto& x : negatives) {
        y_true.push_back(0);
        bool flagged = flags_anomaly(x);
        y_pred.push_back(flagged ? 0 : 1);
        scores.push_back(flagged ? 0.0 : 1.0);
    }
    Prf prf = precision_recall_f1(confusion(y_true, y_pred));
    MetricsReport r;
    r.precision = prf.precision;
    r.recall = prf.recall;
    r.f1 = prf.f1;
    r.degenerate = prf.degenerate;
    r.auc = roc_auc(y_true, scores);
    return r;
}

std::pair<double, double> sweep_traditional_threshold(const AEModel& model,
                                                      const Matrix& positives,
                                                      const Matrix& negatives) {
    Vector errors;
    for (const auto& x : positives) errors.push_back(reconstruction_error(model, x));
    for (const auto& x : negatives) errors.push_back(reconstruction_error(model, x));
    std::sort(errors.begin(), errors.end());
    Vector candidates{errors.front() / 2.0};
    for (size_t i = 0; i + 1 < errors.size(); ++i)
        candidates.push_back(0.5 * (errors[i] + errors[i + 1]));
    candidates.push_back(errors.back() + 1.0);

    double best_tau = candidates.front(), best_f1 = -1;
    for (double tau : candidates) {
        MetricsReport r = evaluate_detector(
            [&](const Vector& x) { return detect_traditional(model, x, tau); }, positives,
            negatives);
        if (r.f1 > best_f1) {
            best_f1 = r.f1;
            best_tau = tau;
        }
    }
    return {best_tau, best_f1};
}

}  // namespace vbdp
