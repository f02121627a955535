#include "sdm/corrector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdm/errors.hpp"

namespace sdm {

CorrectorPair make_corrector(const DenoiserNet& teacher) {
    CorrectorPair pair;
    pair.P = teacher;
    pair.D = teacher;
    pair.D.net.version = 0;
    return pair;
}

CorrectorBand make_band(const NoiseSchedule& s, double t_min_frac, double t_max_frac) {
    if (!(t_min_frac > 0.0) || !(t_min_frac < t_max_frac) || !(t_max_frac <= 1.0)) {
        throw ConfigError("corrector band: need 0 < t_min_frac < t_max_frac <= 1");
    }
    CorrectorBand band;
    band.t_min = std::max(1, static_cast<int>(std::lround(t_min_frac * s.T)));
    band.t_max = std::min(s.T, static_cast<int>(std::lround(t_max_frac * s.T)));
    if (band.t_min > band.t_max) throw ConfigError("corrector band: empty after rounding");
    return band;
}

namespace {
void require_in_band(const std::vector<int>& ts, const CorrectorBand& band) {
    for (int t : ts) {
        if (t < band.t_min || t > band.t_max) {
            throw IndexError("timestep " + std::to_string(t) + " outside corrector band [" +
                             std::to_string(band.t_min) + ", " + std::to_string(band.t_max) + "]");
        }
    }
}
} // namespace

Tensor2 corrector_direction(const CorrectorPair& pair, const NoiseSchedule& s,
                            const Tensor2& a_G0, const Tensor2& obs, const std::vector<int>& ts,
                            const Tensor2& eps, bool normalize, const CorrectorBand& band) {
    require_in_band(ts, band);
    Tensor2 a_t = forward_noise(s, a_G0, ts, eps);
    DenoiseOut outP = predict_x0(pair.P, s, a_t, ts, obs);
    DenoiseOut outD = predict_x0(pair.D, s, a_t, ts, obs);
    Tensor2 g = outP.x0 - outD.x0;
    if (normalize) {
        for (std::size_t r = 0; r < g.rows; ++r) {
            double* gr = g.row(r);
            double mean_abs = 0.0;
            for (std::size_t c = 0; c < g.cols; ++c) mean_abs += std::abs(gr[c]);
            mean_abs /= static_cast<double>(g.cols);
            const double scale = 1.0 / std::max(mean_abs, 1e-3);
            for (std::size_t c = 0; c < g.cols; ++c) gr[c] *= scale;
        }
    }
    return g;
}

double kl_diagnostic(const CorrectorPair& pair, const NoiseSchedule& s, const Tensor2& a_G0,
                     const Tensor2& obs, const std::vector<int>& ts, const Tensor2& eps,
                     const CorrectorBand& band) {
    require_in_band(ts, band);
    Tensor2 a_t = forward_noise(s, a_G0, ts, eps);
    Tensor2 sP = score_estimate(pair.P, s, a_t, ts, obs);
    Tensor2 sD = score_estimate(pair.D, s, a_t, ts, obs);
    double acc = 0.0;
    for (std::size_t r = 0; r < sP.rows; ++r) {
        const double* p = sP.row(r);
        const double* d = sD.row(r);
        double norm2 = 0.0;
        for (std::size_t c = 0; c < sP.cols; ++c) {
            const double diff = p[c] - d[c];
            norm2 += diff * diff;
        }
        acc += norm2;
    }
    return acc / static_cast<double>(sP.rows);
}

} // namespace sdm
