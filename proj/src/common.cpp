#include "vbdp/common.hpp"

#include <cmath>
#include <numbers>

namespace vbdp {

double Rng::gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<size_t> Rng::sample_without_replacement(size_t n, size_t k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    std::vector<size_t> pool(n);
    for (size_t i = 0; i < n; ++i) pool[i] = i;
    // partial Fisher-Yates
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + uniform_index(n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index) {
    // FNV-1a over the tag, then one splitmix round folding in base and index
    uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    Rng mixer(base ^ h ^ (index * 0x9e3779b97f4a7c15ULL));
    return mixer.next_u64();
}

}  // namespace vbdp
