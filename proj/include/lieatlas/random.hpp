#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace lieatlas {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Key for an independent stream: (seed, stream id, counter) -> 64 bits.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

// Counter-based generator; satisfies UniformRandomBitGenerator so the
// <random> distributions can sit on top of it.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(key_ ^ splitmix64(counter_++)); }

    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal() { return normal_(*this); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

inline CounterRng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter = 0) {
    return CounterRng(derive_seed(seed, stream, counter));
}

}  // namespace lieatlas
