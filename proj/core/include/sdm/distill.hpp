#pragma once

#include <vector>

#include "sdm/adam.hpp"
#include "sdm/corrector.hpp"
#include "sdm/dataset.hpp"
#include "sdm/generator.hpp"
#include "sdm/rng.hpp"

namespace sdm {

struct DistillConfig {
    double lambda_gen = 1.0;
    double gamma_diff = 1.0;
    int c = 5; // generator update period; the dynamic net updates every iteration
    double t_min_frac = 0.02;
    double t_max_frac = 0.98;
    bool normalize_direction = true;
    int iters = 3000;
    int batch = 64;
    double lr_gen = 1e-4;
    double lr_D = 2e-4;
    bool ablate_scratch_init = false;

    void validate() const; // throws ConfigError
};

struct GenUpdateDiag {
    double mean_g_norm = 0.0; // mean L2 norm of the direction rows
    double loss_G = 0.0;      // pseudo-loss value
    double kl_diag = 0.0;     // mean squared score-difference norm
};

// Parameter gradients of the pseudo-loss
//   L_G = (lambda / (N*H*A)) sum <stop-grad(-g), a_G0>
// at a fixed draw of per-sample (t, eps). The gradient equals the
// distribution-matching KL gradient assembled from the direction g.
Gradients generator_gradients(const OneStepGenerator& G, const CorrectorPair& pair,
                              const NoiseSchedule& s, const Tensor2& obs, const Tensor2& z,
                              const std::vector<int>& ts, const Tensor2& eps,
                              const DistillConfig& cfg, GenUpdateDiag* diag = nullptr);

// One Adam step on G along the pseudo-loss; draws ts (in band) and eps from rng.
GenUpdateDiag generator_update(OneStepGenerator& G, const CorrectorPair& pair,
                               const NoiseSchedule& s, const Tensor2& obs, const Tensor2& z,
                               const DistillConfig& cfg, AdamState& opt, Rng& rng);

// Gradients of L_D = gamma * mean || predict_x0(D, forward_noise(a_G0, t, eps)) - a_G0 ||^2
// on D at a fixed draw.
Gradients dynamic_teacher_gradients(const CorrectorPair& pair, const NoiseSchedule& s,
                                    const Tensor2& a_G0_detached, const Tensor2& obs,
                                    const std::vector<int>& ts, const Tensor2& eps,
                                    const DistillConfig& cfg, double* loss = nullptr);

// One Adam step on D toward denoising the generator's current outputs:
//   L_D = gamma * mean || predict_x0(D, forward_noise(a_G0, t, eps), t, obs) - a_G0 ||^2.
// P is never touched.
double dynamic_teacher_update(CorrectorPair& pair, const NoiseSchedule& s,
                              const Tensor2& a_G0_detached, const Tensor2& obs,
                              const DistillConfig& cfg, AdamState& opt, Rng& rng);

struct IterLog {
    int iter = 0;
    double loss_D = 0.0;
    double grad_norm = 0.0; // 0 on iterations without a generator update
    double loss_G = 0.0;
    double kl_diag = 0.0;
};

struct DistillResult {
    OneStepGenerator G;
    DenoiserNet D;
    std::vector<IterLog> log;
};

// G, P, D start from the teacher weights (G from random weights when
// cfg.ablate_scratch_init). Each iteration: sample an obs minibatch and z,
// update G when iter % c == 0 (1-indexed), then update D.
DistillResult distill(const DenoiserNet& teacher, const std::vector<Demonstration>& data,
                      const ActionNormalizer& norm, const NoiseSchedule& s,
                      const DistillConfig& cfg, Rng& rng);

void write_training_log(const std::string& path, const std::vector<IterLog>& log);

} // namespace sdm
