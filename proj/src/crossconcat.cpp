#include "vbdp/crossconcat.hpp"

#include <cmath>
#include <limits>

#include "vbdp/dataset.hpp"
#include "vbdp/vbd.hpp"

namespace vbdp {

namespace {

void check_classes(const Matrix& minority, const Matrix& majority) {
    if (minority.empty() || majority.empty())
        throw std::invalid_argument("cross_concatenate: both classes must be non-empty");
    const size_t d = minority[0].size();
    for (const auto& r : minority)
        if (r.size() != d) throw std::invalid_argument("cross_concatenate: ragged minority");
    for (const auto& r : majority)
        if (r.size() != d) throw std::invalid_argument("cross_concatenate: dimension mismatch");
}

double min_within(const Matrix& cls) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (size_t i = 0; i < cls.size(); ++i)
        for (size_t j = i + 1; j < cls.size(); ++j) {
            double dist = euclidean(cls[i], cls[j]);
            if (std::isnan(best) || dist < best) best = dist;
        }
    return best;
}

}  // namespace

ProjectedPair cross_concatenate(const Matrix& minority, const Matrix& majority, size_t cap) {
    check_classes(minority, majority);
    const size_t total = minority.size() * majority.size();
    size_t stride = 1;
    if (cap > 0 && total > cap) stride = (total + cap - 1) / cap;

    ProjectedPair pair;
    pair.minority.reserve((total + stride - 1) / stride);
    pair.majority.reserve((total + stride - 1) / stride);
    size_t flat = 0;
    for (size_t i = 0; i < minority.size(); ++i) {
        for (size_t j = 0; j < majority.size(); ++j, ++flat) {
            if (flat % stride != 0) continue;
            pair.minority.push_back(concat({minority[i], majority[j]}));
            pair.majority.push_back(concat({majority[j], minority[i]}));
        }
    }
    return pair;
}

std::pair<Vector, Vector> project_test(const Vector& t, const Vector& c_u, const Vector& c_v) {
    if (t.size() != c_u.size() || t.size() != c_v.size())
        throw std::invalid_argument("project_test: dimension mismatch");
    return {concat({t, c_u}), concat({t, c_v})};
}

CCModel cc_fit(const ClassifierSpec& spec, const Matrix& minority, const Matrix& majority,
               size_t cap) {
    ProjectedPair pair = cross_concatenate(minority, majority, cap);
    Matrix X;
    std::vector<int> y;
    X.reserve(pair.minority.size() + pair.majority.size());
    for (auto& row : pair.minority) {
        X.push_back(std::move(row));
        y.push_back(1);
    }
    for (auto& row : pair.majority) {
        X.push_back(std::move(row));
        y.push_back(0);
    }
    CCModel model{fit(spec, X, y), centroid(minority), centroid(majority)};
    return model;
}

CCPrediction cc_predict(const CCModel& model, const Vector& t) {
    auto [w, z] = project_test(t, model.c_u, model.c_v);
    CCPrediction out;
    // w = t ~ c_u has the minority centroid in second position, matching the
    // majority training pattern v ~ u, so its probability is read from class 0;
    // z = t ~ c_v symmetrically matches the minority pattern u ~ v
    out.p_w = 1.0 - model.base.predict_proba(w);
    out.p_z = model.base.predict_proba(z);
    out.label = out.p_w > out.p_z ? 0 : 1;  // tie goes to the minority class
    return out;
}

MarginStats margin_stats(const Matrix& minority, const Matrix& majority) {
    check_classes(minority, majority);
    MarginStats s;
    double cross = std::numeric_limits<double>::infinity();
    for (const auto& u : minority)
        for (const auto& v : majority) cross = std::min(cross, euclidean(u, v));
    s.original_cross_min = cross;

    ProjectedPair pair = cross_concatenate(minority, majority);
    double pcross = std::numeric_limits<double>::infinity();
    for (const auto& up : pair.minority)
        for (const auto& vp : pair.majority) pcross = std::min(pcross, euclidean(up, vp));
    s.projected_cross_min = pcross;
    s.ratio = s.original_cross_min > 0 ? s.projected_cross_min / s.original_cross_min : 0.0;

    double ow = std::numeric_limits<double>::quiet_NaN();
    for (double v : {min_within(minority), min_within(majority)})
        if (!std::isnan(v) && (std::isnan(ow) || v < ow)) ow = v;
    s.original_within_min = ow;
    double pw = std::numeric_limits<double>::quiet_NaN();
    for (double v : {min_within(pair.minority), min_within(pair.majority)})
        if (!std::isnan(v) && (std::isnan(pw) || v < pw)) pw = v;
    s.projected_within_min = pw;
    return s;
}

}  // namespace vbdp
