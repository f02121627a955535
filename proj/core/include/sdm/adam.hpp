#pragma once

#include <cstdint>
#include <vector>

#include "sdm/mlp.hpp"

namespace sdm {

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t step = 0;

    std::vector<Tensor2> mW, vW;
    std::vector<std::vector<double>> mb, vb;
};

AdamState make_adam(const MlpNet& net, double lr);

// Bias-corrected update in place; bumps net.version. Throws NumericError on
// NaN/Inf gradients, naming the offending layer.
void adam_step(AdamState& state, MlpNet& net, const Gradients& grads);

} // namespace sdm
