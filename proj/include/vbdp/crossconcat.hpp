#pragma once

#include <utility>

#include "vbdp/common.hpp"
#include "vbdp/models.hpp"

namespace vbdp {

// The two balanced projected class sets: every minority instance paired with
// every majority instance (and the swapped order for the majority side).
struct ProjectedPair {
    Matrix minority;  // u_i ~ v_j
    Matrix majority;  // v_j ~ u_i
};

struct CCModel {
    TrainedClassifier base;  // fitted on 2d projected rows, minority side = class 1
    Vector c_u;              // minority centroid, original space
    Vector c_v;              // majority centroid, original space
};

struct CCPrediction {
    int label = 0;
    double p_w = 0;  // base model's majority-class probability on t ~ c_u
    double p_z = 0;  // base model's minority-class probability on t ~ c_v
};

struct MarginStats {
    double original_cross_min = 0;
    double projected_cross_min = 0;
    double ratio = 0;  // projected / original (0 when original is 0)
    double original_within_min = 0;   // min over both classes
    double projected_within_min = 0;
};

// cap > 0 keeps only every stride-th (i, j) pair so both sides stay <= cap;
// cap = 0 emits the full M*N product.
ProjectedPair cross_concatenate(const Matrix& minority, const Matrix& majority, size_t cap = 0);

std::pair<Vector, Vector> project_test(const Vector& t, const Vector& c_u, const Vector& c_v);

CCModel cc_fit(const ClassifierSpec& spec, const Matrix& minority, const Matrix& majority,
               size_t cap = 0);

CCPrediction cc_predict(const CCModel& model, const Vector& t);

MarginStats margin_stats(const Matrix& minority, const Matrix& majority);

}  // namespace vbdp
