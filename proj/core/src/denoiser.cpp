#include "sdm/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdm/errors.hpp"

namespace sdm {

DenoiserNet make_denoiser(int obs_dim, int horizon, int action_dim,
                          const std::vector<std::size_t>& hidden, Rng& rng) {
    if (obs_dim < 0 || horizon < 1 || action_dim < 1) {
        throw ConfigError("make_denoiser: bad dims");
    }
    DenoiserNet dn;
    dn.obs_dim = obs_dim;
    dn.horizon = horizon;
    dn.action_dim = action_dim;
    std::vector<std::size_t> dims;
    dims.push_back(static_cast<std::size_t>(dn.cond_input_dim()));
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(static_cast<std::size_t>(dn.chunk_dim()));
    dn.net = make_mlp(dims, rng);
    return dn;
}

std::vector<double> timestep_features(int t, int T) {
    const int half = kTimeEmbedDim / 2;
    std::vector<double> f;
    f.reserve(1 + kTimeEmbedDim);
    f.push_back(static_cast<double>(t) / T);
    for (int i = 0; i < half; ++i) {
        double omega = std::pow(10000.0, -static_cast<double>(i) / (half - 1));
        f.push_back(std::sin(t * omega));
    }
    for (int i = 0; i < half; ++i) {
        double omega = std::pow(10000.0, -static_cast<double>(i) / (half - 1));
        f.push_back(std::cos(t * omega));
    }
    return f;
}

Tensor2 build_denoiser_input(const DenoiserNet& dn, const Tensor2& a_t,
                             const std::vector<int>& ts, int T, const Tensor2& obs) {
    const std::size_t n = a_t.rows;
    if (a_t.cols != static_cast<std::size_t>(dn.chunk_dim())) {
        throw ShapeError("denoiser input: chunk cols " + std::to_string(a_t.cols) + " != " +
                         std::to_string(dn.chunk_dim()));
    }
    if (obs.rows != n || obs.cols != static_cast<std::size_t>(dn.obs_dim)) {
        throw ShapeError("denoiser input: obs " + std::to_string(obs.rows) + "x" +
                         std::to_string(obs.cols) + " != " + std::to_string(n) + "x" +
                         std::to_string(dn.obs_dim));
    }
    if (ts.size() != n) throw ShapeError("denoiser input: t count != batch");

    Tensor2 in(n, static_cast<std::size_t>(dn.cond_input_dim()));
    for (std::size_t r = 0; r < n; ++r) {
        double* dst = in.row(r);
        const double* ar = a_t.row(r);
        std::size_t c = 0;
        for (std::size_t k = 0; k < a_t.cols; ++k) dst[c++] = ar[k];
        for (double f : timestep_features(ts[r], T)) dst[c++] = f;
        const double* orow = obs.row(r);
        for (int k = 0; k < dn.obs_dim; ++k) dst[c++] = orow[k];
    }
    return in;
}

DenoiseOut predict_x0(const DenoiserNet& dn, const NoiseSchedule& s, const Tensor2& a_t,
                      const std::vector<int>& ts, const Tensor2& obs, ForwardCache* cache) {
    for (int t : ts) s.require_t(t);
    DenoiseOut out;
    out.eps_hat = mlp_forward(dn.net, build_denoiser_input(dn, a_t, ts, s.T, obs), cache);
    out.x0_raw = Tensor2(a_t.rows, a_t.cols);
    out.x0 = Tensor2(a_t.rows, a_t.cols);
    for (std::size_t r = 0; r < a_t.rows; ++r) {
        const double al = s.alpha_at(ts[r]);
        const double si = s.sigma_at(ts[r]);
        const double* ar = a_t.row(r);
        const double* er = out.eps_hat.row(r);
        double* raw = out.x0_raw.row(r);
        double* cl = out.x0.row(r);
        for (std::size_t c = 0; c < a_t.cols; ++c) {
            raw[c] = (ar[c] - si * er[c]) / al;
            cl[c] = std::clamp(raw[c], -kX0Clamp, kX0Clamp);
        }
    }
    return out;
}

Tensor2 score_estimate(const DenoiserNet& dn, const NoiseSchedule& s, const Tensor2& a_t,
                       const std::vector<int>& ts, const Tensor2& obs) {
    for (int t : ts) {
        s.require_t(t);
        if (s.sigma_at(t) < 1e-6) {
            throw NumericError("score undefined: sigma at t=" + std::to_string(t) + " below 1e-6");
        }
    }
    Tensor2 eps_hat = mlp_forward(dn.net, build_denoiser_input(dn, a_t, ts, s.T, obs));
    Tensor2 score(eps_hat.rows, eps_hat.cols);
    for (std::size_t r = 0; r < eps_hat.rows; ++r) {
        const double si = s.sigma_at(ts[r]);
        const double* er = eps_hat.row(r);
        double* sr = score.row(r);
        for (std::size_t c = 0; c < eps_hat.cols; ++c) sr[c] = -er[c] / si;
    }
    return score;
}

Tensor2 forward_noise(const NoiseSchedule& s, const Tensor2& a0, const std::vector<int>& ts,
                      const Tensor2& eps) {
    if (!a0.same_shape(eps)) throw ShapeError("forward_noise: eps shape != a0 shape");
    if (ts.size() != a0.rows) throw ShapeError("forward_noise: t count != batch");
    Tensor2 a_t(a0.rows, a0.cols);
    for (std::size_t r = 0; r < a0.rows; ++r) {
        const double al = s.alpha_at(ts[r]);
        const double si = s.sigma_at(ts[r]);
        const double* a = a0.row(r);
        const double* e = eps.row(r);
        double* o = a_t.row(r);
        for (std::size_t c = 0; c < a0.cols; ++c) o[c] = al * a[c] + si * e[c];
    }
    return a_t;
}

Tensor2 ddpm_sample(const DenoiserNet& dn, const NoiseSchedule& s, const Tensor2& obs, int nfe,
                    Rng& rng, const Tensor2* a_T) {
    const std::size_t n = obs.rows;
    const std::size_t d = static_cast<std::size_t>(dn.chunk_dim());
    Tensor2 x = a_T ? *a_T : rng.gaussian_tensor(n, d);
    if (x.rows != n || x.cols != d) throw ShapeError("ddpm_sample: a_T shape mismatch");

    const std::vector<int> stride = sample_timesteps(s.T, nfe);
    for (std::size_t k = 0; k < stride.size(); ++k) {
        const int t = stride[k];
        const int t_lo = (k + 1 < stride.size()) ? stride[k + 1] : 0;
        const std::vector<int> ts(n, t);
        DenoiseOut den = predict_x0(dn, s, x, ts, obs);

        const double ab_t = s.alpha_bar_at(t);
        const double ab_lo = s.alpha_bar_at(t_lo);
        const double a_step = ab_t / ab_lo;
        const double b_step = 1.0 - a_step;
        const double coef_x0 = std::sqrt(ab_lo) * b_step / (1.0 - ab_t);
        const double coef_x = std::sqrt(a_step) * (1.0 - ab_lo) / (1.0 - ab_t);
        const double noise_std =
            (t_lo > 0) ? std::sqrt(b_step * (1.0 - ab_lo) / (1.0 - ab_t)) : 0.0;

        for (std::size_t r = 0; r < n; ++r) {
            double* xr = x.row(r);
            const double* x0r = den.x0.row(r);
            for (std::size_t c = 0; c < d; ++c) {
                double mean = coef_x0 * x0r[c] + coef_x * xr[c];
                xr[c] = (t_lo > 0) ? mean + noise_std * rng.gaussian() : mean;
            }
        }
    }
    return x;
}

} // namespace sdm
