#include "vbdp/vbd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vbdp {

Vector concat(const std::vector<Vector>& parts) {
    if (parts.empty()) throw std::invalid_argument("concat: no parts");
    const size_t d = parts[0].size();
    Vector out;
    out.reserve(parts.size() * d);
    for (const auto& p : parts) {
        if (p.size() != d) throw std::invalid_argument("concat: dimension mismatch");
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

VirtualDataset synth_small(const Matrix& data) {
    if (data.empty()) throw std::invalid_argument("synth_small: empty input");
    const size_t n = data.size();
    const size_t d = data[0].size();
    VirtualDataset v;
    v.c = 2;
    v.source_dim = d;
    v.vectors.reserve(n * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            v.vectors.push_back(concat({data[i], data[j]}));
    return v;
}

VirtualDataset synth_large(const Matrix& data, const ConcatConfig& config) {
    if (config.c < 2) throw std::invalid_argument("synth_large: c must be >= 2");
    if (config.u == 0) throw std::invalid_argument("synth_large: u must be >= 1");
    if (data.size() < static_cast<size_t>(config.c))
        throw std::invalid_argument("synth_large: fewer instances than c");
    const size_t d = data[0].size();
    VirtualDataset v;
    v.c = config.c;
    v.source_dim = d;
    v.vectors.reserve(config.u);
    for (size_t row = 0; row < config.u; ++row) {
        // per-row stream so disjoint row ranges can be generated in parallel
        Rng rng(derive_seed(config.seed, "synth_large", row));
        auto picks = rng.sample_without_replacement(data.size(), static_cast<size_t>(config.c));
        std::vector<Vector> parts;
        parts.reserve(picks.size());
        for (size_t idx : picks) parts.push_back(data[idx]);
        v.vectors.push_back(concat(parts));
    }
    return v;
}

double euclidean(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("euclidean: dimension mismatch");
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        double dv = a[i] - b[i];
        s += dv * dv;
    }
    return std::sqrt(s);
}

DiversityStats diversity_stats(const Matrix& vectors) {
    if (vectors.size() < 2) throw std::invalid_argument("diversity_stats: need >= 2 rows");
    DiversityStats s;
    s.min = std::numeric_limits<double>::infinity();
    s.max = 0;
    double sum = 0;
    size_t pairs = 0;
    for (size_t i = 0; i < vectors.size(); ++i) {
        for (size_t j = i + 1; j < vectors.size(); ++j) {
            double dist = euclidean(vectors[i], vectors[j]);
            s.min = std::min(s.min, dist);
            s.max = std::max(s.max, dist);
            sum += dist;
            ++pairs;
        }
    }
    s.mean = sum / static_cast<double>(pairs);
    return s;
}

std::pair<Vector, Vector> split_halves(const Vector& v) {
    if (v.size() % 2 != 0) throw std::invalid_argument("split_halves: odd dimension");
    const size_t d = v.size() / 2;
    return {Vector(v.begin(), v.begin() + static_cast<long>(d)),
            Vector(v.begin() + static_cast<long>(d), v.end())};
}

}  // namespace vbdp
