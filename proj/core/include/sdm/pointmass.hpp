#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "sdm/dataset.hpp"
#include "sdm/generator.hpp"
#include "sdm/rng.hpp"
#include "sdm/tensor.hpp"

namespace sdm {

// 2-D reaching arena: drive from start to goal around a central disc.
// Positions live in [-1, 1]^2; actions are per-step velocity commands in
// [-1, 1]^2 scaled by step_size.
struct PointMassEnv {
    std::array<double, 2> start{-0.8, 0.0};
    std::array<double, 2> goal{0.8, 0.0};
    std::array<double, 2> obstacle_center{0.0, 0.0};
    double obstacle_radius = 0.25;
    double step_size = 0.05;
    double success_radius = 0.1;
    int max_steps = 100;
    int horizon = 4;

    std::vector<double> observation(const std::array<double, 2>& pos) const;
    static constexpr int obs_dim = 4; // [position | goal]
    static constexpr int action_dim = 2;
};

struct EpisodeResult {
    bool success = false;
    int steps = 0;
    std::vector<std::array<double, 2>> trajectory;
    bool collided = false;
};

// Returns (new position, segment crossed the obstacle disc).
std::pair<std::array<double, 2>, bool> env_step(const PointMassEnv& env,
                                                const std::array<double, 2>& pos,
                                                const double* action);

// Policy: observation -> horizon x action_dim chunk in environment units.
using PolicyFn = std::function<Tensor2(const std::vector<double>& obs, Rng& rng)>;

// Fresh policy instance per episode (policies may hold episode state).
using PolicyFactory = std::function<PolicyFn(Rng& episode_rng)>;

// Executes each chunk open-loop for `horizon` steps, then re-queries. Stops at
// success, collision, or max_steps. A NaN action fails the episode without
// marking a collision.
EpisodeResult rollout(const PolicyFn& policy, const PointMassEnv& env, Rng& rng);

// Scripted detour expert: picks the pass side (up for even episodes) and a
// lateral clearance h ~ U(0.4, 0.6), then tracks waypoints at unit speed.
PolicyFn make_expert_policy(const PointMassEnv& env, bool side_up, Rng& rng);

// n_episodes expert runs sliced stride-1 into (obs, horizon-chunk) pairs.
std::vector<Demonstration> gen_pointmass_demos(int n_episodes, std::uint64_t seed,
                                               const PointMassEnv& env = PointMassEnv{});

// Policy adapters; chunks come back denormalized to environment units.
// Both factories copy their nets, so returned policies own their state.
PolicyFactory make_denoiser_policy(const DenoiserNet& net, const NoiseSchedule& s,
                                   const ActionNormalizer& norm, int nfe);
PolicyFactory make_one_step_policy(const OneStepGenerator& g, const NoiseSchedule& s,
                                   const ActionNormalizer& norm);

} // namespace sdm
