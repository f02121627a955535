#pragma once

#include <vector>

#include "sdm/adam.hpp"
#include "sdm/dataset.hpp"
#include "sdm/denoiser.hpp"
#include "sdm/rng.hpp"
#include "sdm/schedule.hpp"

namespace sdm {

struct TeacherTrainConfig {
    int iters = 8000;
    int batch = 128;
    double lr = 2e-3; // cosine-decayed to 0 over the run
    std::vector<std::size_t> hidden = {128, 128, 128};
    int log_every = 400;
};

// Noise-prediction training: minimizes E || eps - net(a_t, t, obs) ||^2 with
// t uniform over 1..T. Actions must already be normalized.
DenoiserNet train_teacher(const std::vector<Demonstration>& data, const ActionNormalizer& norm,
                          const NoiseSchedule& s, const TeacherTrainConfig& cfg, Rng& rng,
                          std::vector<double>* loss_log = nullptr);

} // namespace sdm
