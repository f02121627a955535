#include "sdm/pointmass.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "sdm/errors.hpp"

namespace sdm {

namespace {
double dist2(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

bool segment_hits_disc(const std::array<double, 2>& p0, const std::array<double, 2>& p1,
                       const std::array<double, 2>& center, double radius) {
    const double dx = p1[0] - p0[0];
    const double dy = p1[1] - p0[1];
    const double fx = p0[0] - center[0];
    const double fy = p0[1] - center[1];
    const double a = dx * dx + dy * dy;
    if (a < 1e-18) return fx * fx + fy * fy <= radius * radius;
    double t = -(fx * dx + fy * dy) / a;
    t = std::clamp(t, 0.0, 1.0);
    const double cx = fx + t * dx;
    const double cy = fy + t * dy;
    return cx * cx + cy * cy <= radius * radius;
}
} // namespace

std::vector<double> PointMassEnv::observation(const std::array<double, 2>& pos) const {
    return {pos[0], pos[1], goal[0], goal[1]};
}

std::pair<std::array<double, 2>, bool> env_step(const PointMassEnv& env,
                                                const std::array<double, 2>& pos,
                                                const double* action) {
    std::array<double, 2> next;
    for (int k = 0; k < 2; ++k) {
        const double a = std::clamp(action[k], -1.0, 1.0);
        next[k] = std::clamp(pos[k] + env.step_size * a, -1.0, 1.0);
    }
    const bool hit = segment_hits_disc(pos, next, env.obstacle_center, env.obstacle_radius);
    return {next, hit};
}

EpisodeResult rollout(const PolicyFn& policy, const PointMassEnv& env, Rng& rng) {
    EpisodeResult res;
    std::array<double, 2> pos = env.start;
    res.trajectory.push_back(pos);

    while (res.steps < env.max_steps) {
        Tensor2 chunk = policy(env.observation(pos), rng);
        if (chunk.rows != static_cast<std::size_t>(env.horizon) ||
            chunk.cols != static_cast<std::size_t>(PointMassEnv::action_dim)) {
            throw ShapeError("rollout: policy chunk is " + std::to_string(chunk.rows) + "x" +
                             std::to_string(chunk.cols) + ", expected " +
                             std::to_string(env.horizon) + "x2");
        }
        for (double v : chunk.data) {
            if (!std::isfinite(v)) return res; // failed, not collided
        }
        for (int k = 0; k < env.horizon; ++k) {
            auto [next, hit] = env_step(env, pos, chunk.row(k));
            pos = next;
            res.trajectory.push_back(pos);
            res.steps += 1;
            if (hit) {
                res.collided = true;
                return res;
            }
            if (dist2(pos, env.goal) <= env.success_radius * env.success_radius) {
                res.success = true;
                return res;
            }
            if (res.steps >= env.max_steps) return res;
        }
    }
    return res;
}

PolicyFn make_expert_policy(const PointMassEnv& env, bool side_up, Rng& rng) {
    const double side = side_up ? 1.0 : -1.0;
    const double h = rng.uniform(0.4, 0.6);
    auto waypoints = std::make_shared<std::vector<std::array<double, 2>>>(
        std::vector<std::array<double, 2>>{{-0.35, side * h}, {0.35, side * h}, env.goal});
    auto wi = std::make_shared<std::size_t>(0);

    return [env, waypoints, wi](const std::vector<double>& obs, Rng&) -> Tensor2 {
        std::array<double, 2> pos{obs[0], obs[1]};
        Tensor2 chunk(env.horizon, 2);
        for (int k = 0; k < env.horizon; ++k) {
            while (*wi + 1 < waypoints->size() &&
                   std::sqrt(dist2((*waypoints)[*wi], pos)) < 0.06) {
                ++*wi;
            }
            const auto& target = (*waypoints)[*wi];
            const double dx = target[0] - pos[0];
            const double dy = target[1] - pos[1];
            const double norm = std::max(std::sqrt(dx * dx + dy * dy), 1e-9);
            chunk.at(k, 0) = dx / norm;
            chunk.at(k, 1) = dy / norm;
            auto [next, hit] = env_step(env, pos, chunk.row(k));
            (void)hit;
            pos = next;
        }
        return chunk;
    };
}

std::vector<Demonstration> gen_pointmass_demos(int n_episodes, std::uint64_t seed,
                                               const PointMassEnv& env) {
    if (n_episodes < 2) throw ConfigError("gen_pointmass_demos: need n_episodes >= 2");
    std::vector<Demonstration> demos;
    Rng base(seed);
    for (int ep = 0; ep < n_episodes; ++ep) {
        Rng ep_rng = base.derive(static_cast<std::uint64_t>(ep));
        PolicyFn expert = make_expert_policy(env, ep % 2 == 0, ep_rng);
        EpisodeResult res = rollout(expert, env, ep_rng);
        if (!res.success) {
            throw NumericError("expert episode " + std::to_string(ep) + " failed");
        }
        // reconstruct per-step actions from the trajectory, then slice
        const std::size_t n_steps = res.trajectory.size() - 1;
        Tensor2 obs_seq(n_steps, PointMassEnv::obs_dim);
        Tensor2 act_seq(n_steps, PointMassEnv::action_dim);
        for (std::size_t i = 0; i < n_steps; ++i) {
            const auto& p = res.trajectory[i];
            const auto& q = res.trajectory[i + 1];
            std::vector<double> o = env.observation(p);
            for (int c = 0; c < PointMassEnv::obs_dim; ++c) obs_seq.at(i, c) = o[c];
            act_seq.at(i, 0) = (q[0] - p[0]) / env.step_size;
            act_seq.at(i, 1) = (q[1] - p[1]) / env.step_size;
        }
        if (n_steps < static_cast<std::size_t>(env.horizon)) continue;
        for (std::size_t i = 0; i + env.horizon <= n_steps; ++i) {
            Demonstration d;
            d.obs.assign(obs_seq.row(i), obs_seq.row(i) + PointMassEnv::obs_dim);
            d.actions = Tensor2(env.horizon, PointMassEnv::action_dim);
            for (int r = 0; r < env.horizon; ++r) {
                d.actions.at(r, 0) = act_seq.at(i + r, 0);
                d.actions.at(r, 1) = act_seq.at(i + r, 1);
            }
            demos.push_back(std::move(d));
        }
    }
    return demos;
}

namespace {
Tensor2 obs_row(const std::vector<double>& obs) {
    Tensor2 m(1, obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) m.at(0, i) = obs[i];
    return m;
}

Tensor2 unflatten_chunk(const Tensor2& flat, int horizon, int action_dim) {
    Tensor2 chunk(horizon, action_dim);
    for (int r = 0; r < horizon; ++r)
        for (int c = 0; c < action_dim; ++c)
            chunk.at(r, c) = flat.at(0, static_cast<std::size_t>(r * action_dim + c));
    return chunk;
}
} // namespace

PolicyFactory make_denoiser_policy(const DenoiserNet& net, const NoiseSchedule& s,
                                   const ActionNormalizer& norm, int nfe) {
    auto held = std::make_shared<const DenoiserNet>(net);
    return [held, s, norm, nfe](Rng&) -> PolicyFn {
        return [held, s, norm, nfe](const std::vector<double>& obs, Rng& rng) {
            const Tensor2 o = obs_row(obs);
            const Tensor2 flat = ddpm_sample(*held, s, o, nfe, rng);
            return norm.denormalize_chunk(unflatten_chunk(flat, held->horizon, held->action_dim));
        };
    };
}

PolicyFactory make_one_step_policy(const OneStepGenerator& g, const NoiseSchedule& s,
                                   const ActionNormalizer& norm) {
    auto held = std::make_shared<const OneStepGenerator>(g);
    return [held, s, norm](Rng&) -> PolicyFn {
        return [held, s, norm](const std::vector<double>& obs, Rng& rng) {
            const Tensor2 o = obs_row(obs);
            const Tensor2 z = rng.gaussian_tensor(1, static_cast<std::size_t>(held->net.chunk_dim()));
            const Tensor2 flat = generator_sample(*held, s, z, o).x0;
            return norm.denormalize_chunk(
                unflatten_chunk(flat, held->net.horizon, held->net.action_dim));
        };
    };
}

} // namespace sdm
