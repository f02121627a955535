#include <benchmark/benchmark.h>

#include "sdm/denoiser.hpp"
#include "sdm/generator.hpp"
#include "sdm/rng.hpp"
#include "sdm/schedule.hpp"

namespace {

struct Fixture {
    sdm::NoiseSchedule s;
    sdm::DenoiserNet dn;
    sdm::OneStepGenerator gen;
    sdm::Tensor2 obs;

    Fixture() : s(sdm::make_schedule("linear", 50, 1e-4, 0.1)) {
        sdm::Rng rng(7);
        dn = sdm::make_denoiser(4, 4, 2, {128, 128, 128}, rng);
        gen = sdm::make_generator(dn, s);
        obs = sdm::Tensor2(1, 4);
        obs.at(0, 0) = -0.8;
        obs.at(0, 3) = 0.1;
    }
};

const Fixture& fix() {
    static Fixture f;
    return f;
}

void bm_generator_one_step(benchmark::State& state) {
    const Fixture& f = fix();
    sdm::Rng rng(11);
    for (auto _ : state) {
        const sdm::Tensor2 z = rng.gaussian_tensor(1, static_cast<std::size_t>(f.dn.chunk_dim()));
        benchmark::DoNotOptimize(sdm::generator_sample(f.gen, f.s, z, f.obs).x0);
    }
}

void bm_ddpm_sample(benchmark::State& state) {
    const Fixture& f = fix();
    const int nfe = static_cast<int>(state.range(0));
    sdm::Rng rng(11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sdm::ddpm_sample(f.dn, f.s, f.obs, nfe, rng));
    }
}

void bm_denoiser_batch(benchmark::State& state) {
    const Fixture& f = fix();
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    sdm::Rng rng(13);
    const sdm::Tensor2 a_t = rng.gaussian_tensor(n, static_cast<std::size_t>(f.dn.chunk_dim()));
    sdm::Tensor2 obs(n, 4);
    for (std::size_t i = 0; i < n; ++i) obs.at(i, 0) = -0.8;
    const std::vector<int> ts(n, f.s.T / 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(sdm::predict_x0(f.dn, f.s, a_t, ts, obs).x0);
    }
}

BENCHMARK(bm_generator_one_step);
BENCHMARK(bm_ddpm_sample)->Arg(1)->Arg(2)->Arg(5)->Arg(10);
BENCHMARK(bm_denoiser_batch)->Arg(1)->Arg(16)->Arg(64);

} // namespace

BENCHMARK_MAIN();
