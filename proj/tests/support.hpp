#pragma once

// Deterministic synthetic datasets used by the acceptance suite. They mirror
// the shape and difficulty profile of two classic clinical benchmarks:
//  - a small, heavily overlapping 3-feature survival dataset (306 rows,
//    81 minority) where linear classifiers struggle, and
//  - a larger, well-separated 9-feature diagnostic dataset (699 rows,
//    241 minority) where AUC lands in the mid-.9 range.

#include <algorithm>

#include "vbdp/dataset.hpp"

namespace support {

inline double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// 306 rows, 3 features, 81 minority (label 1), strong class overlap; a plain
// linear classifier stays non-degenerate but weak here
inline vbdp::LabeledDataset survival_like(uint64_t seed = 20260826) {
    vbdp::Rng rng(seed);
    vbdp::LabeledDataset ds;
    for (int i = 0; i < 81; ++i) {
        ds.features.push_back({clamp01(0.66 + 0.14 * rng.gaussian()),
                               clamp01(0.68 + 0.16 * rng.gaussian()),
                               clamp01(0.60 + 0.18 * rng.gaussian())});
        ds.labels.push_back(1);
    }
    for (int i = 0; i < 225; ++i) {
        ds.features.push_back({clamp01(0.42 + 0.14 * rng.gaussian()),
                               clamp01(0.40 + 0.16 * rng.gaussian()),
                               clamp01(0.48 + 0.18 * rng.gaussian())});
        ds.labels.push_back(0);
    }
    return ds;
}

// 699 rows, 9 features, 241 minority (label 1), mostly separable
inline vbdp::LabeledDataset diagnostic_like(uint64_t seed = 20260827) {
    vbdp::Rng rng(seed);
    vbdp::LabeledDataset ds;
    for (int i = 0; i < 241; ++i) {
        vbdp::Vector row(9);
        for (auto& v : row) v = clamp01(0.45 + 0.20 * rng.gaussian());
        ds.features.push_back(row);
        ds.labels.push_back(1);
    }
    for (int i = 0; i < 458; ++i) {
        vbdp::Vector row(9);
        for (auto& v : row) v = clamp01(0.30 + 0.15 * rng.gaussian());
        ds.features.push_back(row);
        ds.labels.push_back(0);
    }
    return ds;
}

// tight 2-D gaussian blob clipped to the unit square
inline vbdp::Matrix gaussian_blob(vbdp::Rng& rng, size_t n, double center, double sd) {
    vbdp::Matrix m(n, vbdp::Vector(2));
    for (auto& row : m)
        for (auto& v : row) v = clamp01(center + sd * rng.gaussian());
    return m;
}

}  // namespace support
