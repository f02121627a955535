#pragma once

#include <string>
#include <vector>

#include "sdm/tensor.hpp"

namespace sdm {

struct Demonstration {
    std::vector<double> obs;
    Tensor2 actions; // horizon x action_dim, environment units
};

// JSON Lines, one demonstration per line. Round-trips losslessly.
void dataset_save(const std::string& path, const std::vector<Demonstration>& demos);
std::vector<Demonstration> dataset_load(const std::string& path);

// Per-action-dimension affine map of [lo, hi] onto [-1, 1]. A collapsed
// dimension (hi == lo) maps to 0 and inverts back to the constant.
struct ActionNormalizer {
    std::vector<double> lo, hi;

    static ActionNormalizer fit(const std::vector<Demonstration>& demos);
    static ActionNormalizer fixed(std::vector<double> lo, std::vector<double> hi);

    std::size_t dims() const { return lo.size(); }

    // rows of `flat` are concatenated H-step chunks; dimension pattern repeats
    // with period dims()
    Tensor2 normalize_flat(const Tensor2& flat) const;
    Tensor2 denormalize_flat(const Tensor2& flat) const;

    Tensor2 normalize_chunk(const Tensor2& chunk) const;   // H x A
    Tensor2 denormalize_chunk(const Tensor2& chunk) const; // H x A
};

// Flattens demos into training matrices: actions [N, H*A] normalized, obs [N, obs_dim].
struct TrainingMatrices {
    Tensor2 actions;
    Tensor2 obs;
    int horizon = 0;
    int action_dim = 0;
};

TrainingMatrices to_matrices(const std::vector<Demonstration>& demos,
                             const ActionNormalizer& norm);

} // namespace sdm
