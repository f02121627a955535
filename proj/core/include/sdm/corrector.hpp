#pragma once

#include <utility>

#include "sdm/denoiser.hpp"

namespace sdm {

// Frozen reference denoiser P (real-data score) plus a trainable denoiser D
// that tracks the generator's output distribution. Their denoised-output
// difference is the update direction for the generator.
struct CorrectorPair {
    DenoiserNet P;
    DenoiserNet D;
};

CorrectorPair make_corrector(const DenoiserNet& teacher);

struct CorrectorBand {
    int t_min = 1;
    int t_max = 1;
};

CorrectorBand make_band(const NoiseSchedule& s, double t_min_frac, double t_max_frac);

// g = predict_x0(P, a_t) - predict_x0(D, a_t) at a_t = forward_noise(a_G0, t, eps).
// With `normalize`, each row is divided by max(mean |g_row|, 1e-3).
// No gradient flows into P or D (pure forward evaluation).
Tensor2 corrector_direction(const CorrectorPair& pair, const NoiseSchedule& s,
                            const Tensor2& a_G0, const Tensor2& obs, const std::vector<int>& ts,
                            const Tensor2& eps, bool normalize, const CorrectorBand& band);

// Monitoring only: mean squared norm of score_P - score_D at the noised batch.
double kl_diagnostic(const CorrectorPair& pair, const NoiseSchedule& s, const Tensor2& a_G0,
                     const Tensor2& obs, const std::vector<int>& ts, const Tensor2& eps,
                     const CorrectorBand& band);

} // namespace sdm
