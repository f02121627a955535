#pragma once

#include <vector>

#include "sdm/mlp.hpp"
#include "sdm/rng.hpp"
#include "sdm/schedule.hpp"
#include "sdm/tensor.hpp"

namespace sdm {

inline constexpr int kTimeEmbedDim = 16; // sin/cos pairs appended after t/T
inline constexpr double kX0Clamp = 1.5;

// Noise-prediction network over [action chunk | timestep features | observation].
struct DenoiserNet {
    MlpNet net;
    int obs_dim = 0;
    int horizon = 0;
    int action_dim = 0;

    int chunk_dim() const { return horizon * action_dim; }
    int cond_input_dim() const { return chunk_dim() + 1 + kTimeEmbedDim + obs_dim; }
};

DenoiserNet make_denoiser(int obs_dim, int horizon, int action_dim,
                          const std::vector<std::size_t>& hidden, Rng& rng);

// [t/T, sin(t w_i), cos(t w_i)] with w_i = 10000^(-i/(half-1)), i = 0..half-1
std::vector<double> timestep_features(int t, int T);

Tensor2 build_denoiser_input(const DenoiserNet& dn, const Tensor2& a_t,
                             const std::vector<int>& ts, int T, const Tensor2& obs);

struct DenoiseOut {
    Tensor2 x0;      // clamped to [-kX0Clamp, kX0Clamp]
    Tensor2 x0_raw;  // pre-clamp
    Tensor2 eps_hat; // network output
};

DenoiseOut predict_x0(const DenoiserNet& dn, const NoiseSchedule& s, const Tensor2& a_t,
                      const std::vector<int>& ts, const Tensor2& obs,
                      ForwardCache* cache = nullptr);

// -eps_hat / sigma_t; rejects sigma_t < 1e-6
Tensor2 score_estimate(const DenoiserNet& dn, const NoiseSchedule& s, const Tensor2& a_t,
                       const std::vector<int>& ts, const Tensor2& obs);

Tensor2 forward_noise(const NoiseSchedule& s, const Tensor2& a0, const std::vector<int>& ts,
                      const Tensor2& eps);

// Ancestral sampling over an evenly strided timestep subsequence; the final
// step adds no noise. `a_T` overrides the N(0, I) start when provided.
Tensor2 ddpm_sample(const DenoiserNet& dn, const NoiseSchedule& s, const Tensor2& obs, int nfe,
                    Rng& rng, const Tensor2* a_T = nullptr);

} // namespace sdm
