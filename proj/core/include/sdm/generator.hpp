#pragma once

#include "sdm/denoiser.hpp"

namespace sdm {

// Maps pure noise plus an observation to an action chunk in one forward pass,
// using the denoiser architecture evaluated at a fixed timestep. Sharing the
// architecture lets the generator start from copied teacher weights.
struct OneStepGenerator {
    DenoiserNet net;
    int t_init = 0; // defaults to schedule T when built via make_generator
};

OneStepGenerator make_generator(const DenoiserNet& teacher, const NoiseSchedule& s);
OneStepGenerator make_generator_scratch(const DenoiserNet& teacher, const NoiseSchedule& s,
                                        Rng& rng);

// One forward pass; x0 is the generated chunk (normalized units).
DenoiseOut generator_sample(const OneStepGenerator& g, const NoiseSchedule& s, const Tensor2& z,
                            const Tensor2& obs, ForwardCache* cache = nullptr);

} // namespace sdm
