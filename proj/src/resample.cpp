#include "vbdp/resample.hpp"

#include <algorithm>
#include <numeric>

#include "vbdp/vbd.hpp"

namespace vbdp {

Matrix smote(const Matrix& minority, const SmoteConfig& config) {
    if (config.k < 1) throw std::invalid_argument("smote: k must be >= 1");
    if (minority.size() <= static_cast<size_t>(config.k))
        throw std::invalid_argument("smote: need more than k minority points");

    const size_t n = minority.size();
    const size_t k = static_cast<size_t>(config.k);

    // k nearest minority neighbors per point, self excluded, ties by lower index
    std::vector<std::vector<size_t>> neighbors(n);
    for (size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, size_t>> dists;
        dists.reserve(n - 1);
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            dists.emplace_back(euclidean(minority[i], minority[j]), j);
        }
        std::sort(dists.begin(), dists.end());
        for (size_t m = 0; m < k; ++m) neighbors[i].push_back(dists[m].second);
    }

    Rng rng(derive_seed(config.seed, "smote", 0));
    Matrix synthetic;
    synthetic.reserve(config.n_synthetic);
    for (size_t s = 0; s < config.n_synthetic; ++s) {
        const size_t base = s % n;  // round-robin base scheduling
        const size_t nn = neighbors[base][rng.uniform_index(k)];
        const double u = rng.uniform();
        Vector row(minority[base].size());
        for (size_t j = 0; j < row.size(); ++j)
            row[j] = minority[base][j] + u * (minority[nn][j] - minority[base][j]);
        synthetic.push_back(std::move(row));
    }
    return synthetic;
}

Matrix random_oversample(const Matrix& minority, size_t n_needed, uint64_t seed) {
    if (minority.empty()) throw std::invalid_argument("random_oversample: empty minority");
    Rng rng(derive_seed(seed, "random_oversample", 0));
    Matrix out;
    out.reserve(n_needed);
    for (size_t i = 0; i < n_needed; ++i) out.push_back(minority[rng.uniform_index(minority.size())]);
    return out;
}

}  // namespace vbdp
