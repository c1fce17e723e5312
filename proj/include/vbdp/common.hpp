#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vbdp {

using Vector = std::vector<double>;
using Matrix = std::vector<Vector>;

// Deterministic generator (splitmix64). All randomness in the library flows
// through this so results are reproducible across platforms and standard
// library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform index in [0, n)
    size_t uniform_index(size_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
        return static_cast<size_t>(next_u64() % n);
    }

    // standard normal via Box-Muller (no cached spare, keeps the stream
    // position independent of call pairing)
    double gaussian();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), order randomized
    std::vector<size_t> sample_without_replacement(size_t n, size_t k);

private:
    uint64_t state_;
};

// Derives an independent child seed from (base seed, purpose tag, index).
uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index);

}  // namespace vbdp
