#include "sdm/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sdm/checkpoint.hpp"
#include "sdm/errors.hpp"

namespace sdm {

namespace {

bool is_mode_coverage_name(const std::string& name) {
    const std::string prefix = "mode_coverage_";
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0)
        return false;
    for (std::size_t i = prefix.size(); i < name.size(); ++i)
        if (name[i] < '0' || name[i] > '9') return false;
    return true;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

bool is_known_metric(const std::string& name) {
    static const char* fixed[] = {"success_rate", "mmd2", "hz", "action_error", "score_cosine"};
    for (const char* f : fixed)
        if (name == f) return true;
    return is_mode_coverage_name(name);
}

void MetricsReport::add(const std::string& name, double value, std::uint64_t seed,
                        const std::string& context) {
    if (!is_known_metric(name)) throw ConfigError("unknown metric name: " + name);
    if (context.find(',') != std::string::npos || context.find('\n') != std::string::npos)
        throw ConfigError("metric context must not contain commas or newlines");
    entries.push_back({name, value, seed, context});
}

std::string now_timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void report_save_csv(const MetricsReport& report, const std::string& path) {
    std::ostringstream out;
    out << "metric,value,seed,context\n";
    for (const auto& e : report.entries)
        out << e.name << ',' << fmt_double(e.value) << ',' << e.seed << ',' << e.context << '\n';
    atomic_write_file(path, out.str());
}

void report_save_json(const MetricsReport& report, const std::string& path) {
    nlohmann::json j;
    j["timestamp"] = report.timestamp;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : report.entries) {
        j["entries"].push_back({{"metric", e.name},
                                {"value", e.value},
                                {"seed", e.seed},
                                {"context", e.context}});
    }
    atomic_write_file(path, j.dump(2) + "\n");
}

namespace {

double sq_dist_rows(const Tensor2& a, std::size_t i, const Tensor2& b, std::size_t j) {
    double d2 = 0.0;
    const double* pa = a.row(i);
    const double* pb = b.row(j);
    for (std::size_t k = 0; k < a.cols; ++k) {
        const double d = pa[k] - pb[k];
        d2 += d * d;
    }
    return d2;
}

double mmd2_with_bandwidth(const Tensor2& x, const Tensor2& y, double h) {
    const double inv = 1.0 / (2.0 * h * h);
    auto mean_kernel = [inv](const Tensor2& a, const Tensor2& b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i)
            for (std::size_t j = 0; j < b.rows; ++j)
                sum += std::exp(-sq_dist_rows(a, i, b, j) * inv);
        return sum / static_cast<double>(a.rows * b.rows);
    };
    return mean_kernel(x, x) + mean_kernel(y, y) - 2.0 * mean_kernel(x, y);
}

void check_sample_sets(const Tensor2& x, const Tensor2& y) {
    if (x.rows == 0 || y.rows == 0) throw ShapeError("mmd2: empty sample set");
    if (x.cols != y.cols) throw ShapeError("mmd2: sample dimensionality mismatch");
}

} // namespace

double mmd2_fixed(const Tensor2& x, const Tensor2& y, double bandwidth) {
    check_sample_sets(x, y);
    if (!(bandwidth > 0.0)) throw ConfigError("mmd2: bandwidth must be positive");
    return mmd2_with_bandwidth(x, y, bandwidth);
}

Mmd2Result mmd2_median(const Tensor2& x, const Tensor2& y) {
    check_sample_sets(x, y);
    const std::size_t n = x.rows + y.rows;
    auto pooled_row = [&](std::size_t i) { return i < x.rows ? x.row(i) : y.row(i - x.rows); };
    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double* pi = pooled_row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* pj = pooled_row(j);
            double d2 = 0.0;
            for (std::size_t k = 0; k < x.cols; ++k) {
                const double d = pi[k] - pj[k];
                d2 += d * d;
            }
            dists.push_back(std::sqrt(d2));
        }
    }
    const std::size_t m = dists.size();
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(m / 2),
                     dists.end());
    double median = dists[m / 2];
    if (m % 2 == 0) {
        const double below = *std::max_element(
            dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(m / 2));
        median = 0.5 * (below + median);
    }

    Mmd2Result result;
    if (median < 1e-12) {
        result.bandwidth = 1.0;
        result.fallback_bandwidth = true;
    } else {
        result.bandwidth = median;
    }
    result.value = mmd2_with_bandwidth(x, y, result.bandwidth);
    return result;
}

std::vector<double> mode_coverage(const Tensor2& samples, const std::vector<CoverageMode>& modes) {
    if (modes.empty()) throw ConfigError("mode_coverage: no modes given");
    for (const auto& m : modes)
        if (m.center.size() != samples.cols)
            throw ShapeError("mode_coverage: mode center dimensionality mismatch");
    std::vector<double> fractions(modes.size(), 0.0);
    if (samples.rows == 0) return fractions;
    for (std::size_t i = 0; i < samples.rows; ++i) {
        const double* p = samples.row(i);
        for (std::size_t k = 0; k < modes.size(); ++k) {
            double d2 = 0.0;
            for (std::size_t c = 0; c < samples.cols; ++c) {
                const double d = p[c] - modes[k].center[c];
                d2 += d * d;
            }
            if (d2 <= modes[k].radius * modes[k].radius) fractions[k] += 1.0;
        }
    }
    for (double& f : fractions) f /= static_cast<double>(samples.rows);
    return fractions;
}

double action_error(const OneStepGenerator& gen, const DenoiserNet& teacher,
                    const NoiseSchedule& s, const Tensor2& obs, Rng& rng, int n_ref_nfe) {
    if (obs.rows == 0) throw ShapeError("action_error: empty observation set");
    if (n_ref_nfe < 1) throw ConfigError("action_error: n_ref_nfe must be >= 1");
    const std::size_t chunk = static_cast<std::size_t>(gen.net.chunk_dim());

    // per-row noise streams keyed by observation content (plus an occurrence
    // counter for repeats), making the mean independent of row order
    std::map<std::string, std::uint64_t> seen;
    double sum = 0.0;
    Tensor2 o(1, obs.cols);
    for (std::size_t i = 0; i < obs.rows; ++i) {
        const std::string key(reinterpret_cast<const char*>(obs.row(i)),
                              obs.cols * sizeof(double));
        const std::uint64_t occ = seen[key]++;
        Rng row_rng = rng.derive(fnv1a64(key) ^ (0x9E3779B97F4A7C15ULL * (occ + 1)));
        for (std::size_t c = 0; c < obs.cols; ++c) o.at(0, c) = obs.at(i, c);
        const Tensor2 z = row_rng.gaussian_tensor(1, chunk);
        const Tensor2 student = generator_sample(gen, s, z, o).x0;
        const Tensor2 ref = ddpm_sample(teacher, s, o, n_ref_nfe, row_rng, &z);
        for (std::size_t c = 0; c < chunk; ++c) {
            const double d = student.at(0, c) - ref.at(0, c);
            sum += d * d;
        }
    }
    return sum / static_cast<double>(obs.rows * chunk);
}

double bench_latency(const std::function<void()>& call, int reps, int warmup) {
    if (reps < 100) throw ConfigError("bench_latency: reps must be >= 100");
    if (warmup < 10) throw ConfigError("bench_latency: warmup must be >= 10");
    using clock = std::chrono::steady_clock;
    for (int i = 0; i < warmup; ++i) call();
    const auto t0 = clock::now();
    for (int i = 0; i < reps; ++i) call();
    const auto t1 = clock::now();
    if (t1 < t0) throw ClockError("bench_latency: clock went backwards");
    const double secs = std::chrono::duration<double>(t1 - t0).count();
    if (secs <= 0.0) throw ClockError("bench_latency: zero elapsed time over timed reps");
    return static_cast<double>(reps) / secs;
}

int thread_budget() {
    const char* raw = std::getenv("SDM_THREADS");
    if (raw == nullptr || *raw == '\0') return 1;
    char* end = nullptr;
    const long v = std::strtol(raw, &end, 10);
    if (end == raw || *end != '\0' || v < 1 || v > 1024)
        throw ConfigError("SDM_THREADS must be an integer in [1, 1024]");
    return static_cast<int>(v);
}

SuccessRateResult success_rate(const PointMassEnv& env, const PolicyFactory& make_policy,
                               int n_episodes, const std::vector<std::uint64_t>& seeds) {
    if (n_episodes < 20) throw ConfigError("success_rate: n_episodes must be >= 20");
    if (seeds.size() < 3) throw ConfigError("success_rate: need at least 3 seeds");

    SuccessRateResult result;
    result.episode_success.assign(seeds.size(), std::vector<int>(n_episodes, 0));

    const std::size_t total = seeds.size() * static_cast<std::size_t>(n_episodes);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= total) return;
            const std::size_t si = idx / static_cast<std::size_t>(n_episodes);
            const int ep = static_cast<int>(idx % static_cast<std::size_t>(n_episodes));
            Rng base(seeds[si]);
            Rng ep_rng = base.derive(static_cast<std::uint64_t>(ep));
            PolicyFn policy = make_policy(ep_rng);
            const EpisodeResult r = rollout(policy, env, ep_rng);
            result.episode_success[si][static_cast<std::size_t>(ep)] = r.success ? 1 : 0;
        }
    };

    const int threads = std::min<int>(thread_budget(), static_cast<int>(total));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    result.per_seed.reserve(seeds.size());
    double mean = 0.0;
    for (const auto& eps : result.episode_success) {
        int hits = 0;
        for (int v : eps) hits += v;
        const double frac = static_cast<double>(hits) / static_cast<double>(n_episodes);
        result.per_seed.push_back(frac);
        mean += frac;
    }
    mean /= static_cast<double>(seeds.size());
    double var = 0.0;
    for (double f : result.per_seed) {
        const double d = f - mean;
        var += d * d;
    }
    var /= static_cast<double>(seeds.size());
    result.mean = mean;
    result.stddev = std::sqrt(var);
    return result;
}

} // namespace sdm
