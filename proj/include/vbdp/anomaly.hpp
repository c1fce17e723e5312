#pragma once

#include <functional>
#include <utility>

#include "vbdp/autoencoder.hpp"
#include "vbdp/eval.hpp"

namespace vbdp {

struct AnomalyConfig {
    int u = 20;  // probe versions per test point
    int w = 12;  // integer count threshold
    uint64_t seed = 0;

    void validate() const {
        if (w < 1 || w > u) throw std::invalid_argument("anomaly config: need 1 <= w <= u");
    }
};

struct AnomalyVerdict {
    int count = 0;  // probes where the test version lost to the reference pair
    bool is_anomaly = false;
};

// Probes a test point against an autoencoder trained on the VBD of normal
// data: u reference instances P and u pair partners Q are drawn seeded without
// replacement; the point is anomalous when recon(t ~ P_i) beats
// recon(P_i ~ Q_i) strictly more than w times.
AnomalyVerdict detect(const AEModel& model, const Matrix& train, const Vector& t,
                      const AnomalyConfig& config);

// Single-threshold baseline on the original-space autoencoder.
bool detect_traditional(const AEModel& model, const Vector& t, double tau);

// Positive (label 1) instances are the normal class; a detector flags
// anomalies. Recall measures detected normals, precision the purity of the
// predicted-normal set, matching the reported orientation.
MetricsReport evaluate_detector(const std::function<bool(const Vector&)>& flags_anomaly,
                                const Matrix& positives, const Matrix& negatives);

// Sweeps candidate traditional thresholds (midpoints of observed errors) and
// returns (best tau, best F1).
std::pair<double, double> sweep_traditional_threshold(const AEModel& model,
                                                      const Matrix& positives,
                                                      const Matrix& negatives);

}  // namespace vbdp
