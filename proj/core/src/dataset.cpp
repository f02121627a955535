#include "sdm/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sdm/checkpoint.hpp"
#include "sdm/errors.hpp"

namespace sdm {

using nlohmann::json;

void dataset_save(const std::string& path, const std::vector<Demonstration>& demos) {
    std::ostringstream out;
    for (const Demonstration& d : demos) {
        json j;
        j["obs"] = d.obs;
        json acts = json::array();
        for (std::size_t r = 0; r < d.actions.rows; ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < d.actions.cols; ++c) row.push_back(d.actions.at(r, c));
            acts.push_back(std::move(row));
        }
        j["actions"] = std::move(acts);
        out << j.dump() << '\n';
    }
    atomic_write_file(path, out.str());
}

std::vector<Demonstration> dataset_load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<Demonstration> demos;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() && in.peek() == EOF) break; // trailing newline
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.contains("obs") || !j["obs"].is_array()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing \"obs\"");
        }
        if (!j.contains("actions") || !j["actions"].is_array() || j["actions"].empty()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": missing \"actions\"");
        }
        Demonstration d;
        d.obs = j["obs"].get<std::vector<double>>();
        const json& acts = j["actions"];
        std::size_t rows = acts.size();
        std::size_t cols = acts.at(0).size();
        d.actions = Tensor2(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            const json& row = acts.at(r);
            if (!row.is_array() || row.size() != cols) {
                throw ParseError(path + ":" + std::to_string(lineno) + ": ragged \"actions\"");
            }
            for (std::size_t c = 0; c < cols; ++c) d.actions.at(r, c) = row.at(c).get<double>();
        }
        demos.push_back(std::move(d));
    }
    return demos;
}

ActionNormalizer ActionNormalizer::fit(const std::vector<Demonstration>& demos) {
    if (demos.empty()) throw ConfigError("normalizer fit: empty dataset");
    std::size_t a_dim = demos.front().actions.cols;
    ActionNormalizer n;
    n.lo.assign(a_dim, std::numeric_limits<double>::infinity());
    n.hi.assign(a_dim, -std::numeric_limits<double>::infinity());
    for (const Demonstration& d : demos) {
        if (d.actions.cols != a_dim) throw ShapeError("normalizer fit: mixed action dims");
        for (std::size_t r = 0; r < d.actions.rows; ++r) {
            for (std::size_t c = 0; c < a_dim; ++c) {
                double v = d.actions.at(r, c);
                n.lo[c] = std::min(n.lo[c], v);
                n.hi[c] = std::max(n.hi[c], v);
            }
        }
    }
    return n;
}

ActionNormalizer ActionNormalizer::fixed(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty()) throw ConfigError("normalizer: lo/hi size mismatch");
    ActionNormalizer n;
    n.lo = std::move(lo);
    n.hi = std::move(hi);
    return n;
}

namespace {
Tensor2 map_flat(const Tensor2& flat, const std::vector<double>& lo, const std::vector<double>& hi,
                 bool forward) {
    const std::size_t a_dim = lo.size();
    if (flat.cols % a_dim != 0) {
        throw ShapeError("normalizer: cols " + std::to_string(flat.cols) +
                         " not a multiple of action dim " + std::to_string(a_dim));
    }
    Tensor2 out(flat.rows, flat.cols);
    for (std::size_t r = 0; r < flat.rows; ++r) {
        const double* src = flat.row(r);
        double* dst = out.row(r);
        for (std::size_t c = 0; c < flat.cols; ++c) {
            const std::size_t k = c % a_dim;
            const double range = hi[k] - lo[k];
            if (range < 1e-12) {
                dst[c] = forward ? 0.0 : lo[k];
            } else if (forward) {
                dst[c] = 2.0 * (src[c] - lo[k]) / range - 1.0;
            } else {
                dst[c] = (src[c] + 1.0) * 0.5 * range + lo[k];
            }
        }
    }
    return out;
}
} // namespace

Tensor2 ActionNormalizer::normalize_flat(const Tensor2& flat) const {
    return map_flat(flat, lo, hi, true);
}

Tensor2 ActionNormalizer::denormalize_flat(const Tensor2& flat) const {
    return map_flat(flat, lo, hi, false);
}

Tensor2 ActionNormalizer::normalize_chunk(const Tensor2& chunk) const {
    if (chunk.cols != dims()) throw ShapeError("normalize_chunk: action dim mismatch");
    return map_flat(chunk, lo, hi, true);
}

Tensor2 ActionNormalizer::denormalize_chunk(const Tensor2& chunk) const {
    if (chunk.cols != dims()) throw ShapeError("denormalize_chunk: action dim mismatch");
    return map_flat(chunk, lo, hi, false);
}

TrainingMatrices to_matrices(const std::vector<Demonstration>& demos,
                             const ActionNormalizer& norm) {
    if (demos.empty()) throw ConfigError("to_matrices: empty dataset");
    const std::size_t n = demos.size();
    const std::size_t h = demos.front().actions.rows;
    const std::size_t a = demos.front().actions.cols;
    const std::size_t o = demos.front().obs.size();

    TrainingMatrices m;
    m.horizon = static_cast<int>(h);
    m.action_dim = static_cast<int>(a);
    m.actions = Tensor2(n, h * a);
    m.obs = Tensor2(n, o);
    for (std::size_t i = 0; i < n; ++i) {
        const Demonstration& d = demos[i];
        if (d.actions.rows != h || d.actions.cols != a || d.obs.size() != o) {
            throw ShapeError("to_matrices: demonstration " + std::to_string(i) +
                             " has inconsistent shape");
        }
        Tensor2 nc = norm.normalize_chunk(d.actions);
        double* dst = m.actions.row(i);
        for (std::size_t r = 0; r < h; ++r) {
            for (std::size_t c = 0; c < a; ++c) *dst++ = nc.at(r, c);
        }
        for (std::size_t c = 0; c < o; ++c) m.obs.at(i, c) = d.obs[c];
    }
    return m;
}

} // namespace sdm
