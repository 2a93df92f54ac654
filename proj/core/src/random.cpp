#include "rrfnn/random.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "rrfnn/errors.hpp"

namespace rrfnn {

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw InvalidArgument("Rng::below needs a positive bound");
    if (n == 1) return 0;
    // Smallest all-ones mask covering n - 1; draws above it are rejected.
    const int bits = std::bit_width(n - 1);
    const std::uint64_t mask = bits == 64 ? ~0ULL : ((1ULL << bits) - 1);
    for (;;) {
        const std::uint64_t candidate = (engine_() >> (64 - bits)) & mask;
        if (candidate < n) return candidate;
    }
}

double Rng::normal() {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rrfnn
