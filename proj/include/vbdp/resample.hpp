#pragma once

#include "vbdp/common.hpp"

namespace vbdp {

struct SmoteConfig {
    int k = 5;             // neighbor count
    size_t n_synthetic = 0;
    uint64_t seed = 0;
};

// Synthetic minority oversampling: each new point interpolates between a base
// minority instance (cycled round-robin) and one of its k nearest minority
// neighbors with a uniform coefficient in [0, 1].
Matrix smote(const Matrix& minority, const SmoteConfig& config);

// n_needed rows drawn uniformly with replacement from the minority set.
Matrix random_oversample(const Matrix& minority, size_t n_needed, uint64_t seed);

}  // namespace vbdp
