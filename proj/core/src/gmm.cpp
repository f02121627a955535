#include "sdm/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdm/errors.hpp"

namespace sdm {

void GmmSpec::validate() const {
    if (comps.empty()) throw ConfigError("gmm: no components");
    double wsum = 0.0;
    for (const GmmComponent& c : comps) {
        if (c.weight < 0.0) throw ConfigError("gmm: negative weight");
        if (!(c.std > 0.0)) throw ConfigError("gmm: std must be > 0");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw ConfigError("gmm: weights must sum to 1");
}

GmmSpec GmmSpec::noised(const NoiseSchedule& s, int t) const {
    const double al = s.alpha_at(t);
    const double si = s.sigma_at(t);
    GmmSpec out = *this;
    for (GmmComponent& c : out.comps) {
        c.mean = {al * c.mean[0], al * c.mean[1]};
        c.std = std::sqrt(al * al * c.std * c.std + si * si);
    }
    return out;
}

GmmSpec GmmSpec::rescaled(double shift_x, double shift_y, double scale) const {
    if (!(scale > 0.0)) throw ConfigError("gmm rescale: scale must be > 0");
    GmmSpec out = *this;
    for (GmmComponent& c : out.comps) {
        c.mean = {(c.mean[0] - shift_x) / scale, (c.mean[1] - shift_y) / scale};
        c.std /= scale;
    }
    return out;
}

GmmSpec default_gmm_spec() {
    GmmSpec spec;
    spec.comps.push_back({{2.0, 0.0}, 0.3, 0.5});
    spec.comps.push_back({{-2.0, 0.0}, 0.3, 0.5});
    return spec;
}

double gmm_env_halfwidth() {
    return 3.0;
}

ActionNormalizer gmm_normalizer() {
    const double w = gmm_env_halfwidth();
    return ActionNormalizer::fixed({-w, -w}, {w, w});
}

GmmSpec normalized_gmm_spec(const GmmSpec& env_spec) {
    return env_spec.rescaled(0.0, 0.0, gmm_env_halfwidth());
}

Tensor2 gmm_sample(const GmmSpec& spec, std::size_t n, Rng& rng) {
    spec.validate();
    if (n < 1) throw ConfigError("gmm_sample: n must be >= 1");
    Tensor2 out(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        double u = rng.uniform();
        std::size_t k = 0;
        double acc = 0.0;
        for (; k + 1 < spec.comps.size(); ++k) {
            acc += spec.comps[k].weight;
            if (u < acc) break;
        }
        const GmmComponent& c = spec.comps[k];
        out.at(i, 0) = c.mean[0] + c.std * rng.gaussian();
        out.at(i, 1) = c.mean[1] + c.std * rng.gaussian();
    }
    return out;
}

Tensor2 gmm_noised_score(const GmmSpec& spec, const NoiseSchedule& s, const Tensor2& x, int t) {
    spec.validate();
    if (x.cols != 2) throw ShapeError("gmm score: points must be 2-D");
    const GmmSpec nz = spec.noised(s, t);
    const std::size_t K = nz.comps.size();

    Tensor2 score(x.rows, 2);
    std::vector<double> logw(K);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double px = x.at(i, 0);
        const double py = x.at(i, 1);
        double logmax = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < K; ++k) {
            const GmmComponent& c = nz.comps[k];
            const double v = c.std * c.std;
            const double dx = px - c.mean[0];
            const double dy = py - c.mean[1];
            logw[k] = std::log(c.weight) - (dx * dx + dy * dy) / (2.0 * v) -
                      std::log(2.0 * std::numbers::pi * v);
            logmax = std::max(logmax, logw[k]);
        }
        double zsum = 0.0;
        for (std::size_t k = 0; k < K; ++k) zsum += std::exp(logw[k] - logmax);
        double sx = 0.0, sy = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const GmmComponent& c = nz.comps[k];
            const double v = c.std * c.std;
            const double r = std::exp(logw[k] - logmax) / zsum;
            sx += r * (c.mean[0] - px) / v;
            sy += r * (c.mean[1] - py) / v;
        }
        score.at(i, 0) = sx;
        score.at(i, 1) = sy;
    }
    return score;
}

double gmm_noised_logpdf(const GmmSpec& spec, const NoiseSchedule& s, double x0, double x1,
                         int t) {
    const GmmSpec nz = spec.noised(s, t);
    double logmax = -std::numeric_limits<double>::infinity();
    std::vector<double> logw(nz.comps.size());
    for (std::size_t k = 0; k < nz.comps.size(); ++k) {
        const GmmComponent& c = nz.comps[k];
        const double v = c.std * c.std;
        const double dx = x0 - c.mean[0];
        const double dy = x1 - c.mean[1];
        logw[k] = std::log(c.weight) - (dx * dx + dy * dy) / (2.0 * v) -
                  std::log(2.0 * std::numbers::pi * v);
        logmax = std::max(logmax, logw[k]);
    }
    double zsum = 0.0;
    for (double lw : logw) zsum += std::exp(lw - logmax);
    return logmax + std::log(zsum);
}

std::vector<Demonstration> gen_gmm_demos(const GmmSpec& spec, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Tensor2 draws = gmm_sample(spec, n, rng);
    const double w = gmm_env_halfwidth();
    std::vector<Demonstration> demos(n);
    for (std::size_t i = 0; i < n; ++i) {
        demos[i].obs = {0.0};
        demos[i].actions = Tensor2(1, 2);
        demos[i].actions.at(0, 0) = std::clamp(draws.at(i, 0), -w, w);
        demos[i].actions.at(0, 1) = std::clamp(draws.at(i, 1), -w, w);
    }
    return demos;
}

} // namespace sdm
