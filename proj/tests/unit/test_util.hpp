#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rrfnn/cube.hpp"
#include "rrfnn/model.hpp"
#include "rrfnn/random.hpp"
#include "rrfnn/tensor.hpp"

namespace rrfnn::testing {

inline std::vector<double> random_vector(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(lo, hi);
    return v;
}

inline Tensor3 random_tensor(Dims3 dims, Rng& rng, double lo = -1.0, double hi = 1.0) {
    return Tensor3(dims, random_vector(dims.size(), rng, lo, hi));
}

inline CPFactorSet random_factors(std::size_t rank, std::size_t bands, std::size_t side, Rng& rng) {
    std::vector<std::vector<double>> a, b, c;
    for (std::size_t k = 0; k < rank; ++k) {
        a.push_back(random_vector(bands, rng));
        b.push_back(random_vector(side, rng));
        c.push_back(random_vector(side, rng));
    }
    return CPFactorSet(a, b, c);
}

template <class Model>
void randomize(Model& model, Rng& rng, double range = 0.5) {
    for (double& p : model.parameters()) p = rng.uniform(-range, range);
}

inline HyperCube random_cube(std::size_t h, std::size_t w, std::size_t b, Rng& rng) {
    return HyperCube(h, w, b, random_vector(h * w * b, rng, 0.0, 1.0));
}

inline double rel_diff(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace rrfnn::testing
