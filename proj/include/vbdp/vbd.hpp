#pragma once

#include <utility>

#include "vbdp/common.hpp"

namespace vbdp {

struct ConcatConfig {
    int c = 2;       // concatenation factor
    size_t u = 1;    // target virtual-set size
    uint64_t seed = 0;
};

struct VirtualDataset {
    Matrix vectors;     // rows of dimension c * source_dim
    int c = 2;
    size_t source_dim = 0;
};

struct DiversityStats {
    double min = 0;
    double max = 0;
    double mean = 0;
};

// Joins feature vectors end to end; output dimension = |parts| * d.
Vector concat(const std::vector<Vector>& parts);

// Full ordered cross product with self-pairs, outer i / inner j: n^2 rows of
// dimension 2d. Deterministic, no randomness.
VirtualDataset synth_small(const Matrix& data);

// u rows, each concatenating c distinct source instances sampled without
// replacement within a row, independently across rows.
VirtualDataset synth_large(const Matrix& data, const ConcatConfig& config);

// Exact pairwise Euclidean distance statistics over all unordered pairs.
DiversityStats diversity_stats(const Matrix& vectors);

double euclidean(const Vector& a, const Vector& b);

// Splits a c=2 virtual vector at its midpoint.
std::pair<Vector, Vector> split_halves(const Vector& v);

}  // namespace vbdp
