#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "sdm/corrector.hpp"
#include "sdm/denoiser.hpp"
#include "sdm/errors.hpp"
#include "sdm/rng.hpp"
#include "sdm/schedule.hpp"
#include "sdm/tensor.hpp"
#include "test_util.hpp"

using namespace sdm;

namespace {

NoiseSchedule sched() { return make_schedule("linear", 50, 1e-4, 0.1); }

// constant-output denoisers: with a_G0 = 0 and eps = 0 the noised input is 0,
// so predict_x0 returns -sigma/alpha * bias; bias = -alpha/sigma * v hits v
DenoiserNet const_x0_net(const NoiseSchedule& s, int t, double v) {
    const double b = -s.alpha_at(t) / s.sigma_at(t) * v;
    return testutil::bias_denoiser(1, 1, 1, {b});
}

} // namespace

TEST_CASE("make_corrector copies the teacher into both slots") {
    Rng rng(4);
    DenoiserNet teacher = make_denoiser(2, 1, 2, {8}, rng);
    teacher.net.version = 7;
    CorrectorPair pair = make_corrector(teacher);
    CHECK(testutil::nets_equal(pair.P.net, teacher.net));
    CHECK(testutil::nets_equal(pair.D.net, teacher.net));
    CHECK(pair.P.net.version == 7);
    CHECK(pair.D.net.version == 0);
}

TEST_CASE("band construction rounds fractions onto valid timesteps") {
    auto s = sched();
    CorrectorBand band = make_band(s, 0.02, 0.98);
    CHECK(band.t_min == 1);
    CHECK(band.t_max == 49);
    CorrectorBand upper = make_band(s, 0.5, 1.0);
    CHECK(upper.t_min == 25);
    CHECK(upper.t_max == 50);

    CHECK_THROWS_AS(make_band(s, 0.0, 0.5), ConfigError);
    CHECK_THROWS_AS(make_band(s, 0.5, 0.4), ConfigError);
    CHECK_THROWS_AS(make_band(s, 0.3, 1.1), ConfigError);
    CHECK_THROWS_AS(make_band(s, 0.001, 0.002), ConfigError);
}

TEST_CASE("identical nets give an exactly zero direction") {
    auto s = sched();
    Rng rng(5);
    DenoiserNet teacher = make_denoiser(2, 2, 2, {16}, rng);
    CorrectorPair pair = make_corrector(teacher);
    CorrectorBand band = make_band(s, 0.02, 0.98);

    Tensor2 a_G0 = rng.gaussian_tensor(3, 4);
    Tensor2 obs = rng.gaussian_tensor(3, 2);
    Tensor2 eps = rng.gaussian_tensor(3, 4);
    std::vector<int> ts{5, 25, 45};

    for (bool normalize : {false, true}) {
        Tensor2 g = corrector_direction(pair, s, a_G0, obs, ts, eps, normalize, band);
        for (double v : g.data) CHECK(v == 0.0);
    }
    CHECK(kl_diagnostic(pair, s, a_G0, obs, ts, eps, band) == 0.0);
}

TEST_CASE("scalar direction is the difference of denoised outputs") {
    auto s = sched();
    const int t = 25;
    CorrectorPair pair;
    pair.P = const_x0_net(s, t, 1.0);
    pair.D = const_x0_net(s, t, 0.2);
    CorrectorBand band = make_band(s, 0.02, 0.98);

    Tensor2 a_G0(1, 1), obs(1, 1), eps(1, 1);
    Tensor2 g = corrector_direction(pair, s, a_G0, obs, {t}, eps, false, band);
    CHECK(g.at(0, 0) == doctest::Approx(0.8).epsilon(1e-12));

    Tensor2 gn = corrector_direction(pair, s, a_G0, obs, {t}, eps, true, band);
    CHECK(gn.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalization floors tiny directions at 1e-3") {
    auto s = sched();
    const int t = 25;
    CorrectorPair pair;
    pair.P = const_x0_net(s, t, 1.0);
    pair.D = const_x0_net(s, t, 1.0);
    pair.D.net.layers[0].b[0] += 1e-6; // direction magnitude ~1e-6, under the floor
    CorrectorBand band = make_band(s, 0.02, 0.98);

    Tensor2 a_G0(1, 1), obs(1, 1), eps(1, 1);
    Tensor2 g = corrector_direction(pair, s, a_G0, obs, {t}, eps, false, band);
    Tensor2 gn = corrector_direction(pair, s, a_G0, obs, {t}, eps, true, band);
    REQUIRE(std::fabs(g.at(0, 0)) > 0.0);
    CHECK(std::fabs(g.at(0, 0)) < 1e-3);
    CHECK(gn.at(0, 0) == doctest::Approx(g.at(0, 0) * 1000.0).epsilon(1e-9));
}

TEST_CASE("timesteps outside the band are rejected") {
    auto s = sched();
    Rng rng(6);
    DenoiserNet teacher = make_denoiser(1, 1, 1, {4}, rng);
    CorrectorPair pair = make_corrector(teacher);
    CorrectorBand band = make_band(s, 0.1, 0.9);

    Tensor2 a_G0(1, 1), obs(1, 1), eps(1, 1);
    CHECK_THROWS_AS(corrector_direction(pair, s, a_G0, obs, {50}, eps, false, band), IndexError);
    CHECK_THROWS_AS(corrector_direction(pair, s, a_G0, obs, {2}, eps, false, band), IndexError);
    CHECK_THROWS_AS(kl_diagnostic(pair, s, a_G0, obs, {50}, eps, band), IndexError);
}

TEST_CASE("kl diagnostic matches the closed form for constant predictors") {
    auto s = sched();
    const int t = 30;
    CorrectorPair pair;
    pair.P = testutil::bias_denoiser(1, 1, 2, {0.3, -0.5});
    pair.D = testutil::bias_denoiser(1, 1, 2, {0.1, 0.4});
    CorrectorBand band = make_band(s, 0.02, 0.98);

    Rng rng(8);
    Tensor2 a_G0 = rng.gaussian_tensor(4, 2);
    Tensor2 obs(4, 1);
    Tensor2 eps = rng.gaussian_tensor(4, 2);
    std::vector<int> ts{t, t, t, t};

    // score difference per row is -(bP - bD)/sigma, identical across the batch
    const double sig = s.sigma_at(t);
    const double d0 = (0.3 - 0.1) / sig;
    const double d1 = (-0.5 - 0.4) / sig;
    const double expected = d0 * d0 + d1 * d1;

    CHECK(kl_diagnostic(pair, s, a_G0, obs, ts, eps, band) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kl diagnostic is invariant under batch permutation") {
    auto s = sched();
    Rng rng(12);
    DenoiserNet teacher = make_denoiser(2, 1, 2, {8}, rng);
    CorrectorPair pair = make_corrector(teacher);
    for (double& v : pair.D.net.layers[0].b) v += 0.1;
    CorrectorBand band = make_band(s, 0.02, 0.98);

    const std::size_t n = 6;
    Tensor2 a_G0 = rng.gaussian_tensor(n, 2);
    Tensor2 obs = rng.gaussian_tensor(n, 2);
    Tensor2 eps = rng.gaussian_tensor(n, 2);
    std::vector<int> ts{5, 30, 49, 12, 25, 7};

    const double base = kl_diagnostic(pair, s, a_G0, obs, ts, eps, band);
    CHECK(base > 0.0);

    Tensor2 a2(n, 2), o2(n, 2), e2(n, 2);
    std::vector<int> t2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        for (std::size_t c = 0; c < 2; ++c) {
            a2.at(i, c) = a_G0.at(j, c);
            o2.at(i, c) = obs.at(j, c);
            e2.at(i, c) = eps.at(j, c);
        }
        t2[i] = ts[j];
    }
    CHECK(kl_diagnostic(pair, s, a2, o2, t2, e2, band) ==
          doctest::Approx(base).epsilon(1e-12));
}
