#include "sdm/distill.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "sdm/checkpoint.hpp"
#include "sdm/errors.hpp"

namespace sdm {

void DistillConfig::validate() const {
    if (c < 1) throw ConfigError("distill.c must be >= 1");
    if (!(t_min_frac > 0.0) || !(t_min_frac < t_max_frac) || !(t_max_frac <= 1.0)) {
        throw ConfigError("distill band: need 0 < t_min_frac < t_max_frac <= 1");
    }
    if (!(lambda_gen > 0.0)) throw ConfigError("distill.lambda_gen must be > 0");
    if (!(gamma_diff > 0.0)) throw ConfigError("distill.gamma_diff must be > 0");
    if (iters < 1) throw ConfigError("distill.iters must be >= 1");
    if (batch < 1) throw ConfigError("distill.batch must be >= 1");
    if (!(lr_gen > 0.0) || !(lr_D > 0.0)) throw ConfigError("distill learning rates must be > 0");
}

namespace {
std::vector<int> draw_band_ts(Rng& rng, const CorrectorBand& band, int n) {
    std::vector<int> ts(n);
    for (int i = 0; i < n; ++i) {
        ts[i] = static_cast<int>(
            rng.int_range(band.t_min, static_cast<std::uint64_t>(band.t_max) + 1));
    }
    return ts;
}
} // namespace

Gradients generator_gradients(const OneStepGenerator& G, const CorrectorPair& pair,
                              const NoiseSchedule& s, const Tensor2& obs, const Tensor2& z,
                              const std::vector<int>& ts, const Tensor2& eps,
                              const DistillConfig& cfg, GenUpdateDiag* diag) {
    if (z.rows == 0) throw ConfigError("generator_gradients: empty batch");
    const CorrectorBand band = make_band(s, cfg.t_min_frac, cfg.t_max_frac);

    ForwardCache cache;
    DenoiseOut gen = generator_sample(G, s, z, obs, &cache);

    Tensor2 g = corrector_direction(pair, s, gen.x0, obs, ts, eps, cfg.normalize_direction, band);
    check_finite(g, "corrector direction");

    const double inv_n = 1.0 / static_cast<double>(g.size());
    if (diag) {
        *diag = GenUpdateDiag{};
        for (std::size_t r = 0; r < g.rows; ++r) {
            const double* gr = g.row(r);
            const double* ar = gen.x0.row(r);
            double norm2 = 0.0;
            for (std::size_t c = 0; c < g.cols; ++c) {
                norm2 += gr[c] * gr[c];
                diag->loss_G += -gr[c] * ar[c];
            }
            diag->mean_g_norm += std::sqrt(norm2);
        }
        diag->mean_g_norm /= static_cast<double>(g.rows);
        diag->loss_G *= cfg.lambda_gen * inv_n;
        diag->kl_diag = kl_diagnostic(pair, s, gen.x0, obs, ts, eps, band);
    }

    // dL/d a_G0 = -lambda g / (N*H*A); chain through the clamp and the
    // x0 = (z - sigma eps_hat)/alpha map down to the network output
    const double dx0_deps = -s.sigma_at(G.t_init) / s.alpha_at(G.t_init);
    Tensor2 grad_out(z.rows, z.cols);
    for (std::size_t i = 0; i < grad_out.data.size(); ++i) {
        const bool clamped = std::abs(gen.x0_raw.data[i]) >= kX0Clamp;
        grad_out.data[i] =
            clamped ? 0.0 : (-cfg.lambda_gen * g.data[i] * inv_n) * dx0_deps;
    }

    return mlp_backward(G.net.net, cache, grad_out);
}

GenUpdateDiag generator_update(OneStepGenerator& G, const CorrectorPair& pair,
                               const NoiseSchedule& s, const Tensor2& obs, const Tensor2& z,
                               const DistillConfig& cfg, AdamState& opt, Rng& rng) {
    const CorrectorBand band = make_band(s, cfg.t_min_frac, cfg.t_max_frac);
    const std::vector<int> ts = draw_band_ts(rng, band, static_cast<int>(z.rows));
    Tensor2 eps = rng.gaussian_tensor(z.rows, z.cols);

    GenUpdateDiag diag;
    Gradients grads = generator_gradients(G, pair, s, obs, z, ts, eps, cfg, &diag);
    adam_step(opt, G.net.net, grads);
    return diag;
}

Gradients dynamic_teacher_gradients(const CorrectorPair& pair, const NoiseSchedule& s,
                                    const Tensor2& a_G0_detached, const Tensor2& obs,
                                    const std::vector<int>& ts, const Tensor2& eps,
                                    const DistillConfig& cfg, double* loss_out) {
    Tensor2 a_t = forward_noise(s, a_G0_detached, ts, eps);

    ForwardCache cache;
    DenoiseOut out = predict_x0(pair.D, s, a_t, ts, obs, &cache);

    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(a_t.size());
    Tensor2 grad_out(a_t.rows, a_t.cols);
    for (std::size_t r = 0; r < a_t.rows; ++r) {
        const double dx0_deps = -s.sigma_at(ts[r]) / s.alpha_at(ts[r]);
        const double* x0 = out.x0.row(r);
        const double* raw = out.x0_raw.row(r);
        const double* target = a_G0_detached.row(r);
        double* go = grad_out.row(r);
        for (std::size_t c = 0; c < a_t.cols; ++c) {
            const double diff = x0[c] - target[c];
            loss += diff * diff;
            const bool clamped = std::abs(raw[c]) >= kX0Clamp;
            go[c] = clamped ? 0.0 : cfg.gamma_diff * 2.0 * diff * inv_n * dx0_deps;
        }
    }
    loss *= cfg.gamma_diff * inv_n;
    if (loss_out) *loss_out = loss;

    return mlp_backward(pair.D.net, cache, grad_out);
}

double dynamic_teacher_update(CorrectorPair& pair, const NoiseSchedule& s,
                              const Tensor2& a_G0_detached, const Tensor2& obs,
                              const DistillConfig& cfg, AdamState& opt, Rng& rng) {
    const CorrectorBand band = make_band(s, cfg.t_min_frac, cfg.t_max_frac);
    const std::vector<int> ts = draw_band_ts(rng, band, static_cast<int>(a_G0_detached.rows));
    Tensor2 eps = rng.gaussian_tensor(a_G0_detached.rows, a_G0_detached.cols);

    double loss = 0.0;
    Gradients grads = dynamic_teacher_gradients(pair, s, a_G0_detached, obs, ts, eps, cfg, &loss);
    adam_step(opt, pair.D.net, grads);
    return loss;
}

DistillResult distill(const DenoiserNet& teacher, const std::vector<Demonstration>& data,
                      const ActionNormalizer& norm, const NoiseSchedule& s,
                      const DistillConfig& cfg, Rng& rng) {
    cfg.validate();
    if (data.empty()) throw ConfigError("distill: empty dataset");

    TrainingMatrices m = to_matrices(data, norm);
    const std::size_t n = m.obs.rows;
    const std::size_t chunk = m.actions.cols;
    const std::size_t obs_dim = m.obs.cols;

    DistillResult res;
    res.G = cfg.ablate_scratch_init ? make_generator_scratch(teacher, s, rng)
                                    : make_generator(teacher, s);
    CorrectorPair pair = make_corrector(teacher);

    AdamState optG = make_adam(res.G.net.net, cfg.lr_gen);
    AdamState optD = make_adam(pair.D.net, cfg.lr_D);

    Tensor2 obs(cfg.batch, obs_dim);
    res.log.reserve(cfg.iters);

    for (int iter = 1; iter <= cfg.iters; ++iter) {
        for (int b = 0; b < cfg.batch; ++b) {
            std::size_t idx = rng.int_range(0, n);
            const double* src = m.obs.row(idx);
            double* dst = obs.row(b);
            for (std::size_t c = 0; c < obs_dim; ++c) dst[c] = src[c];
        }
        Tensor2 z = rng.gaussian_tensor(cfg.batch, chunk);
        DenoiseOut gen = generator_sample(res.G, s, z, obs);

        IterLog entry;
        entry.iter = iter;
        if (iter % cfg.c == 0) {
            GenUpdateDiag diag = generator_update(res.G, pair, s, obs, z, cfg, optG, rng);
            entry.grad_norm = diag.mean_g_norm;
            entry.loss_G = diag.loss_G;
            entry.kl_diag = diag.kl_diag;
        }
        entry.loss_D = dynamic_teacher_update(pair, s, gen.x0, obs, cfg, optD, rng);
        res.log.push_back(entry);
    }

    res.D = std::move(pair.D);
    return res;
}

void write_training_log(const std::string& path, const std::vector<IterLog>& log) {
    std::ostringstream out;
    out << "iter,loss_D,grad_norm,loss_G,kl_diag\n";
    out.precision(17);
    for (const IterLog& e : log) {
        out << e.iter << ',' << e.loss_D << ',' << e.grad_norm << ',' << e.loss_G << ','
            << e.kl_diag << '\n';
    }
    atomic_write_file(path, out.str());
}

} // namespace sdm
