#include "doctest.h"

#include <cmath>

#include "sdm/errors.hpp"
#include "sdm/schedule.hpp"

using namespace sdm;

TEST_CASE("single-step schedule hand values") {
    NoiseSchedule s = make_schedule("linear", 1, 0.02, 0.02);
    CHECK(s.alpha_bar_at(1) == doctest::Approx(0.98).epsilon(1e-12));
    CHECK(s.alpha_at(1) == doctest::Approx(0.98995).epsilon(1e-5));
    CHECK(s.sigma_at(1) == doctest::Approx(0.14142).epsilon(1e-4));
    CHECK(s.alpha_bar_at(0) == 1.0);
}

TEST_CASE("variance preserving identity holds at every timestep") {
    for (double bmax : {0.02, 0.1}) {
        NoiseSchedule s = make_schedule("linear", 50, 1e-4, bmax);
        for (int t = 1; t <= s.T; ++t) {
            const double a = s.alpha_at(t);
            const double sg = s.sigma_at(t);
            CHECK(std::fabs(a * a + sg * sg - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("alpha_bar is a strictly decreasing product in (0,1)") {
    NoiseSchedule s = make_schedule("linear", 50, 1e-4, 0.02);
    double prod = 1.0;
    for (int t = 1; t <= s.T; ++t) {
        prod *= 1.0 - s.beta_at(t); // brute-force product oracle
        CHECK(s.alpha_bar_at(t) == doctest::Approx(prod).epsilon(1e-14));
        CHECK(s.alpha_bar_at(t) > 0.0);
        CHECK(s.alpha_bar_at(t) < 1.0);
        if (t > 1) CHECK(s.alpha_bar_at(t) < s.alpha_bar_at(t - 1));
    }
}

TEST_CASE("beta endpoints follow the linear ramp") {
    NoiseSchedule s = make_schedule("linear", 50, 1e-4, 0.02);
    CHECK(s.beta_at(1) == doctest::Approx(1e-4).epsilon(1e-12));
    CHECK(s.beta_at(50) == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(s.beta_at(25) > s.beta_at(24));
}

TEST_CASE("last denoising step adds no noise") {
    NoiseSchedule s = make_schedule("linear", 50, 1e-4, 0.02);
    // t = 1 -> 0 posterior: alpha_bar_prev = 1, so the posterior variance is 0
    CHECK(s.step_noise_std[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.step_noise_std[10] > 0.0);
}

TEST_CASE("invalid schedule parameters are rejected") {
    CHECK_THROWS_AS(make_schedule("cosine", 50, 1e-4, 0.02), ConfigError);
    CHECK_THROWS_AS(make_schedule("linear", 0, 1e-4, 0.02), ConfigError);
    CHECK_THROWS_AS(make_schedule("linear", 50, 0.0, 0.02), ConfigError);
    CHECK_THROWS_AS(make_schedule("linear", 50, 0.03, 0.02), ConfigError);
    CHECK_THROWS_AS(make_schedule("linear", 50, 1e-4, 1.0), ConfigError);
}

TEST_CASE("timestep accessors reject out-of-range t") {
    NoiseSchedule s = make_schedule("linear", 10, 1e-4, 0.02);
    CHECK_THROWS_AS(s.beta_at(0), IndexError);
    CHECK_THROWS_AS(s.alpha_at(11), IndexError);
    CHECK_THROWS_AS(s.sigma_at(-1), IndexError);
}

TEST_CASE("strided timesteps run from T down to 1") {
    std::vector<int> ts = sample_timesteps(50, 10);
    CHECK(ts.front() == 50);
    CHECK(ts.back() == 1);
    for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] < ts[i - 1]);

    CHECK(sample_timesteps(50, 1) == std::vector<int>{50});

    std::vector<int> full = sample_timesteps(50, 50);
    CHECK(full.size() == 50);
    for (int i = 0; i < 50; ++i) CHECK(full[i] == 50 - i);
}

TEST_CASE("stride rounding collisions are deduplicated") {
    std::vector<int> ts = sample_timesteps(3, 3);
    CHECK(ts == std::vector<int>{3, 2, 1});
    ts = sample_timesteps(2, 2);
    CHECK(ts == std::vector<int>{2, 1});
    // more requested steps than distinct integers cannot happen (nfe <= T),
    // but rounding can still repeat for small T
    CHECK_THROWS_AS(sample_timesteps(5, 6), ConfigError);
    CHECK_THROWS_AS(sample_timesteps(5, 0), ConfigError);
}
