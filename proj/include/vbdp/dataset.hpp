#pragma once

#include <optional>
#include <string>
#include <utility>

#include "vbdp/common.hpp"

namespace vbdp {

// Binary labeled tabular data. Label 1 is the positive (minority) class.
struct LabeledDataset {
    Matrix features;
    std::vector<int> labels;

    size_t instance_count() const { return features.size(); }
    size_t feature_count() const { return features.empty() ? 0 : features[0].size(); }

    void validate() const;
};

struct BinarySplit {
    Matrix minority;  // the smaller class (ties: label-1 class)
    Matrix majority;
};

struct NormalizationStats {
    Vector min;
    Vector max;
    std::vector<bool> constant;  // max == min on the fitting set
};

struct FoldPlan {
    int k = 0;
    std::vector<int> assignments;  // per-instance fold index in [0, k)
};

struct CsvOptions {
    bool has_header = false;
    // label column by header name (requires has_header) or numeric index
    std::string label_column = "-1";  // "-1" means last column
    std::string positive_label;
};

LabeledDataset load_csv(const std::string& path, const CsvOptions& opts);

// Writes features plus an optional trailing label column. `metadata`, when
// non-empty, is emitted as a leading '#' comment line (skipped on load).
void save_csv(const std::string& path, const Matrix& features,
              const std::vector<int>* labels = nullptr,
              const std::string& metadata = "");

// Loads an unlabeled feature matrix written by save_csv (no header, '#'
// comment lines ignored).
Matrix load_matrix_csv(const std::string& path);

// IDX (MNIST-style) image + label pair. Pixels are scaled to [0,1].
LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path,
                        size_t limit);

NormalizationStats fit_minmax(const Matrix& data);
Matrix apply_minmax(const NormalizationStats& stats, const Matrix& data);
Vector apply_minmax(const NormalizationStats& stats, const Vector& row);

std::pair<NormalizationStats, LabeledDataset> fit_apply_minmax(const LabeledDataset& fit_on,
                                                               const LabeledDataset& apply_to);

BinarySplit split_binary(const LabeledDataset& data);

Vector centroid(const Matrix& instances);

FoldPlan stratified_kfold(const LabeledDataset& data, int k, uint64_t seed);

}  // namespace vbdp
