#pragma once

#include <array>
#include <vector>

#include "sdm/dataset.hpp"
#include "sdm/rng.hpp"
#include "sdm/schedule.hpp"
#include "sdm/tensor.hpp"

namespace sdm {

struct GmmComponent {
    std::array<double, 2> mean{0.0, 0.0};
    double std = 1.0; // isotropic
    double weight = 1.0;
};

struct GmmSpec {
    std::vector<GmmComponent> comps;

    void validate() const; // weights >= 0 summing to 1, stds > 0

    // Analytically diffused mixture at timestep t: means scale by alpha_t,
    // variances become alpha_t^2 std^2 + sigma_t^2.
    GmmSpec noised(const NoiseSchedule& s, int t) const;

    // Affine map x -> (x - shift)/scale applied to the mixture (isotropic).
    GmmSpec rescaled(double shift_x, double shift_y, double scale) const;
};

// Two modes at (+-2, 0), std 0.3, equal weights, in environment units.
GmmSpec default_gmm_spec();

// Environment units span [-3, 3] in both dims; fixed (not fitted) so the
// normalized mixture stays isotropic and the analytic score stays exact.
double gmm_env_halfwidth();
ActionNormalizer gmm_normalizer();
GmmSpec normalized_gmm_spec(const GmmSpec& env_spec);

Tensor2 gmm_sample(const GmmSpec& spec, std::size_t n, Rng& rng);

// Exact gradient of log p_t at x for the diffused mixture (log-sum-exp).
Tensor2 gmm_noised_score(const GmmSpec& spec, const NoiseSchedule& s, const Tensor2& x, int t);

// log p_t(x) for finite-difference crosschecks.
double gmm_noised_logpdf(const GmmSpec& spec, const NoiseSchedule& s, double x0, double x1, int t);

// Demonstrations for the unconditional task: obs is a single constant 0,
// one draw per demonstration, entries clamped to the environment box.
std::vector<Demonstration> gen_gmm_demos(const GmmSpec& spec, std::size_t n, std::uint64_t seed);

} // namespace sdm
