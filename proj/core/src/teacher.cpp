#include "sdm/teacher.hpp"

#include <cmath>
#include <numbers>

#include "sdm/errors.hpp"

namespace sdm {

DenoiserNet train_teacher(const std::vector<Demonstration>& data, const ActionNormalizer& norm,
                          const NoiseSchedule& s, const TeacherTrainConfig& cfg, Rng& rng,
                          std::vector<double>* loss_log) {
    if (data.empty()) throw ConfigError("train_teacher: empty dataset");
    if (cfg.iters < 1 || cfg.batch < 1 || !(cfg.lr > 0.0)) {
        throw ConfigError("train_teacher: iters/batch/lr must be positive");
    }

    TrainingMatrices m = to_matrices(data, norm);
    const std::size_t n = m.actions.rows;
    const std::size_t chunk = m.actions.cols;

    DenoiserNet dn = make_denoiser(static_cast<int>(m.obs.cols), m.horizon, m.action_dim,
                                   cfg.hidden, rng);
    AdamState opt = make_adam(dn.net, cfg.lr);

    Tensor2 a0(cfg.batch, chunk), obs(cfg.batch, m.obs.cols), eps(cfg.batch, chunk);
    std::vector<int> ts(cfg.batch);
    double running = 0.0;
    int running_n = 0;

    for (int it = 0; it < cfg.iters; ++it) {
        opt.lr = cfg.lr * 0.5 * (1.0 + std::cos(std::numbers::pi * it / cfg.iters));

        for (int b = 0; b < cfg.batch; ++b) {
            std::size_t idx = rng.int_range(0, n);
            const double* ar = m.actions.row(idx);
            const double* orow = m.obs.row(idx);
            for (std::size_t c = 0; c < chunk; ++c) a0.at(b, c) = ar[c];
            for (std::size_t c = 0; c < m.obs.cols; ++c) obs.at(b, c) = orow[c];
            ts[b] = static_cast<int>(rng.int_range(1, static_cast<std::uint64_t>(s.T) + 1));
        }
        rng.fill_gaussian(eps);
        Tensor2 a_t = forward_noise(s, a0, ts, eps);

        ForwardCache cache;
        Tensor2 eps_hat = mlp_forward(dn.net, build_denoiser_input(dn, a_t, ts, s.T, obs), &cache);

        Tensor2 grad(eps_hat.rows, eps_hat.cols);
        double loss = 0.0;
        const double inv = 1.0 / static_cast<double>(eps_hat.size());
        for (std::size_t i = 0; i < eps_hat.data.size(); ++i) {
            const double diff = eps_hat.data[i] - eps.data[i];
            loss += diff * diff;
            grad.data[i] = 2.0 * diff * inv;
        }
        loss *= inv;

        Gradients grads = mlp_backward(dn.net, cache, grad);
        adam_step(opt, dn.net, grads);

        running += loss;
        running_n += 1;
        if (loss_log && ((it + 1) % cfg.log_every == 0 || it + 1 == cfg.iters)) {
            loss_log->push_back(running / running_n);
            running = 0.0;
            running_n = 0;
        }
    }
    return dn;
}

} // namespace sdm
