#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdm/mlp.hpp"

namespace sdm {

// Everything a saved net needs to be usable standalone: schedule parameters,
// conditioning dims, and action normalization stats travel with the weights.
struct CheckpointMeta {
    std::string role; // "teacher", "one_step_generator", "dynamic_teacher"
    std::string schedule_kind = "linear";
    int T = 0;
    double beta_min = 0.0;
    double beta_max = 0.0;
    int obs_dim = 0;
    int horizon = 0;
    int action_dim = 0;
    int t_init = 0; // generator checkpoints only, 0 when unused
    std::vector<double> norm_lo, norm_hi; // empty = identity normalization
};

struct Checkpoint {
    MlpNet net;
    CheckpointMeta meta;
};

// JSON with weights rounded to f32. Written atomically (temp file + rename).
void save_checkpoint(const std::string& path, const MlpNet& net, const CheckpointMeta& meta);

// Rejects unknown format_version; validates the net before returning.
Checkpoint load_checkpoint(const std::string& path);

// Small file helpers shared by reports and tests.
std::string read_file(const std::string& path);
void atomic_write_file(const std::string& path, const std::string& contents);
std::uint64_t fnv1a64(const std::string& bytes);

} // namespace sdm
