#pragma once

#include <cstdint>

#include "sdm/tensor.hpp"

namespace sdm {

// Counter-based generator: output i depends only on (seed, i), so streams are
// splittable and replay is exact across platforms.
struct Rng {
    std::uint64_t seed = 0;
    std::uint64_t counter = 0;

    explicit Rng(std::uint64_t s = 0) : seed(s) {}

    std::uint64_t next_u64();

    // in [0, 1)
    double uniform();
    double uniform(double lo, double hi);

    // standard normal via Box-Muller; consumes two uniforms per draw
    double gaussian();

    // in [lo, hi) without modulo bias
    std::uint64_t int_range(std::uint64_t lo, std::uint64_t hi);

    Tensor2 gaussian_tensor(std::size_t rows, std::size_t cols);
    void fill_gaussian(Tensor2& t);

    // Independent child stream; deterministic in (seed, stream).
    Rng derive(std::uint64_t stream) const;
};

} // namespace sdm
