#include "sdm/schedule.hpp"

#include <cmath>

#include "sdm/errors.hpp"

namespace sdm {

void NoiseSchedule::require_t(int t) const {
    if (t < 1 || t > T) {
        throw IndexError("timestep " + std::to_string(t) + " outside 1.." + std::to_string(T));
    }
}

double NoiseSchedule::beta_at(int t) const {
    require_t(t);
    return beta[t - 1];
}

double NoiseSchedule::alpha_bar_at(int t) const {
    if (t == 0) return 1.0;
    require_t(t);
    return alpha_bar[t - 1];
}

double NoiseSchedule::alpha_at(int t) const {
    require_t(t);
    return alpha[t - 1];
}

double NoiseSchedule::sigma_at(int t) const {
    require_t(t);
    return sigma[t - 1];
}

NoiseSchedule make_schedule(const std::string& kind, int T, double beta_min, double beta_max) {
    if (kind != "linear") throw ConfigError("unknown schedule kind: " + kind);
    if (T < 1) throw ConfigError("schedule T must be >= 1");
    if (!(beta_min > 0.0) || !(beta_min <= beta_max) || !(beta_max < 1.0)) {
        throw ConfigError("schedule betas must satisfy 0 < beta_min <= beta_max < 1");
    }

    NoiseSchedule s;
    s.T = T;
    s.beta.resize(T);
    s.alpha_bar.resize(T);
    s.alpha.resize(T);
    s.sigma.resize(T);
    s.step_mean_scale.resize(T);
    s.step_eps_coef.resize(T);
    s.step_noise_std.resize(T);

    double abar = 1.0;
    for (int i = 0; i < T; ++i) {
        double frac = (T == 1) ? 0.0 : static_cast<double>(i) / (T - 1);
        s.beta[i] = beta_min + (beta_max - beta_min) * frac;
        double abar_prev = abar;
        abar *= 1.0 - s.beta[i];
        s.alpha_bar[i] = abar;
        s.alpha[i] = std::sqrt(abar);
        s.sigma[i] = std::sqrt(1.0 - abar);
        s.step_mean_scale[i] = 1.0 / std::sqrt(1.0 - s.beta[i]);
        s.step_eps_coef[i] = s.beta[i] / std::sqrt(1.0 - abar);
        s.step_noise_std[i] = std::sqrt(s.beta[i] * (1.0 - abar_prev) / (1.0 - abar));
    }
    return s;
}

std::vector<int> sample_timesteps(int T, int nfe) {
    if (nfe < 1 || nfe > T) {
        throw ConfigError("nfe must be in 1.." + std::to_string(T) + ", got " +
                          std::to_string(nfe));
    }
    std::vector<int> ts;
    if (nfe == 1) {
        ts.push_back(T);
        return ts;
    }
    for (int i = 0; i < nfe; ++i) {
        double v = T + (1.0 - T) * static_cast<double>(i) / (nfe - 1);
        int t = static_cast<int>(std::lround(v));
        if (ts.empty() || ts.back() != t) ts.push_back(t);
    }
    return ts;
}

} // namespace sdm
