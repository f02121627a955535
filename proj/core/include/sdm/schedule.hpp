#pragma once

#include <string>
#include <vector>

namespace sdm {

// Discrete variance-preserving schedule. Vectors are indexed t-1 for t = 1..T;
// alpha_bar(0) == 1 by convention so the final denoising step is noise-free.
struct NoiseSchedule {
    int T = 0;
    std::vector<double> beta;
    std::vector<double> alpha_bar;
    std::vector<double> alpha;          // sqrt(alpha_bar)
    std::vector<double> sigma;          // sqrt(1 - alpha_bar)
    std::vector<double> step_mean_scale; // 1 / sqrt(1 - beta_t)
    std::vector<double> step_eps_coef;   // beta_t / sqrt(1 - alpha_bar_t)
    std::vector<double> step_noise_std;  // sqrt(beta_t (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t))

    double beta_at(int t) const;
    double alpha_bar_at(int t) const; // accepts t = 0 (returns 1)
    double alpha_at(int t) const;
    double sigma_at(int t) const;

    void require_t(int t) const; // throws IndexError unless 1 <= t <= T
};

NoiseSchedule make_schedule(const std::string& kind, int T, double beta_min, double beta_max);

// Evenly strided descending timesteps from T down to 1, `nfe` of them
// (fewer if rounding collides); nfe == 1 gives {T}.
std::vector<int> sample_timesteps(int T, int nfe);

} // namespace sdm
