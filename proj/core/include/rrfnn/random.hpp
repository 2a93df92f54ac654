#pragma once

// Seeded randomness with fully specified algorithms, so that splits, scenes
// and initializations are reproducible across compilers and standard
// libraries.
//
//   engine     std::mt19937_64 (its output sequence is fixed by the standard)
//   uniform    top 53 bits of one draw, scaled to [0, 1)
//   below(n)   rejection sampling on the top bits, unbiased
//   normal     Box-Muller using two uniforms per variate, no caching
//   shuffle    Fisher-Yates from the back, j = below(i + 1)
//
// Seed derivation: derive_seed(a, b, ...) starts from 0x9E3779B97F4A7C15 and
// folds each value in with h = splitmix64(h ^ value).

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

namespace rrfnn {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> values) noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL;
    for (std::uint64_t v : values) h = splitmix64(h ^ v);
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);
    /// Standard normal variate.
    double normal();

private:
    std::mt19937_64 engine_;
};

template <class T>
void shuffle(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

}  // namespace rrfnn
