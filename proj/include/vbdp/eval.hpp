#pragma once

#include <string>

#include "vbdp/dataset.hpp"
#include "vbdp/models.hpp"

namespace vbdp {

struct ConfusionMatrix {
    long tp = 0, fn = 0, fp = 0, tn = 0;
    long total() const { return tp + fn + fp + tn; }
};

struct MetricsReport {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    double auc = 0;
    bool degenerate = false;  // some metric had a zero denominator
};

enum class Method { none, smote, random_oversample, cross_concat };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

// Per-fold record of which source rows were used for fitting vs testing, for
// leakage checks.
struct CvTrace {
    std::vector<std::vector<size_t>> fit_rows;
    std::vector<std::vector<size_t>> test_rows;
};

struct CvConfig {
    int k = 10;
    uint64_t seed = 0;
    uint64_t method_seed = 0;  // balancing-method randomness only
    size_t cc_cap = 0;         // cross_concatenate pair cap (0 = full product)
    int jobs = 1;              // concurrent folds; aggregation order is by fold index
    CvTrace* trace = nullptr;
};

struct ExperimentResult {
    std::string method;
    ClassifierSpec spec;
    std::vector<MetricsReport> folds;
    MetricsReport mean;
    MetricsReport stddev;
    uint64_t seed = 0;

    std::string to_json(const std::string& tool_version = "",
                        const std::string& resolved_config = "") const;
    void save_folds_csv(const std::string& path, const std::string& metadata = "") const;
};

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// (precision, recall, f1); zero denominators yield 0 and set the flag
struct Prf {
    double precision = 0, recall = 0, f1 = 0;
    bool degenerate = false;
};
Prf precision_recall_f1(const ConfusionMatrix& m);

// rank-based (Mann-Whitney) AUC, ties contribute 1/2
double roc_auc(const std::vector<int>& y_true, const Vector& scores);

ExperimentResult run_cv_experiment(const LabeledDataset& data, Method method,
                                   const ClassifierSpec& spec, const CvConfig& config);

ExperimentResult run_cv_experiment(const LabeledDataset& data, Method method,
                                   const ClassifierSpec& spec, int k, uint64_t seed);

struct StabilityReport {
    double precision_var = 0, recall_var = 0, f1_var = 0, auc_var = 0;
};

// Re-runs the experiment `repeats` times with fixed folds and classifier seed,
// varying only the balancing method's internal seed; reports the variance of
// the fold-mean metrics across repeats.
StabilityReport stability_probe(const LabeledDataset& data, Method method,
                                const ClassifierSpec& spec, int repeats, uint64_t base_seed,
                                int k = 10, size_t cc_cap = 0);

}  // namespace vbdp
