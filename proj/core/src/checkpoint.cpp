#include "sdm/checkpoint.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sdm/errors.hpp"

namespace sdm {

using nlohmann::json;

namespace {

std::string act_name(Activation a) {
    switch (a) {
        case Activation::SiLU: return "silu";
        case Activation::ReLU: return "relu";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation act_from_name(const std::string& s) {
    if (s == "silu") return Activation::SiLU;
    if (s == "relu") return Activation::ReLU;
    if (s == "identity") return Activation::Identity;
    throw ParseError("unknown activation: " + s);
}

double to_f32(double v) {
    return static_cast<double>(static_cast<float>(v));
}

json meta_to_json(const CheckpointMeta& m) {
    json j;
    j["role"] = m.role;
    j["schedule_kind"] = m.schedule_kind;
    j["T"] = m.T;
    j["beta_min"] = m.beta_min;
    j["beta_max"] = m.beta_max;
    j["obs_dim"] = m.obs_dim;
    j["horizon"] = m.horizon;
    j["action_dim"] = m.action_dim;
    j["t_init"] = m.t_init;
    j["norm_lo"] = m.norm_lo;
    j["norm_hi"] = m.norm_hi;
    return j;
}

CheckpointMeta meta_from_json(const json& j) {
    CheckpointMeta m;
    m.role = j.value("role", "");
    m.schedule_kind = j.value("schedule_kind", "linear");
    m.T = j.value("T", 0);
    m.beta_min = j.value("beta_min", 0.0);
    m.beta_max = j.value("beta_max", 0.0);
    m.obs_dim = j.value("obs_dim", 0);
    m.horizon = j.value("horizon", 0);
    m.action_dim = j.value("action_dim", 0);
    m.t_init = j.value("t_init", 0);
    m.norm_lo = j.value("norm_lo", std::vector<double>{});
    m.norm_hi = j.value("norm_hi", std::vector<double>{});
    return m;
}

} // namespace

void save_checkpoint(const std::string& path, const MlpNet& net, const CheckpointMeta& meta) {
    json j;
    j["format_version"] = 1;
    j["dtype"] = "f32";
    json layers = json::array();
    for (const Layer& layer : net.layers) {
        json jl;
        json w = json::array();
        for (std::size_t r = 0; r < layer.W.rows; ++r) {
            json row = json::array();
            for (std::size_t c = 0; c < layer.W.cols; ++c) row.push_back(to_f32(layer.W.at(r, c)));
            w.push_back(std::move(row));
        }
        jl["w"] = std::move(w);
        json b = json::array();
        for (double v : layer.b) b.push_back(to_f32(v));
        jl["b"] = std::move(b);
        jl["act"] = act_name(layer.act);
        layers.push_back(std::move(jl));
    }
    j["layers"] = std::move(layers);
    j["meta"] = meta_to_json(meta);
    atomic_write_file(path, j.dump());
}

Checkpoint load_checkpoint(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError("checkpoint " + path + ": " + e.what());
    }
    if (!j.contains("format_version") || !j["format_version"].is_number_integer() ||
        j["format_version"].get<int>() != 1) {
        throw ParseError("checkpoint " + path + ": unsupported format_version");
    }

    Checkpoint ck;
    if (!j.contains("layers") || !j["layers"].is_array() || j["layers"].empty()) {
        throw ParseError("checkpoint " + path + ": missing layers");
    }
    for (const json& jl : j["layers"]) {
        Layer layer;
        const json& w = jl.at("w");
        std::size_t rows = w.size();
        std::size_t cols = w.at(0).size();
        layer.W = Tensor2(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            const json& row = w.at(r);
            if (row.size() != cols) {
                throw ParseError("checkpoint " + path + ": ragged weight matrix");
            }
            for (std::size_t c = 0; c < cols; ++c) layer.W.at(r, c) = row.at(c).get<double>();
        }
        layer.b = jl.at("b").get<std::vector<double>>();
        if (layer.b.size() != rows) {
            throw ParseError("checkpoint " + path + ": bias length mismatch");
        }
        layer.act = act_from_name(jl.at("act").get<std::string>());
        ck.net.layers.push_back(std::move(layer));
    }
    ck.net.input_dim = ck.net.layers.front().in_dim();
    ck.net.output_dim = ck.net.layers.back().out_dim();
    validate_net(ck.net);
    if (j.contains("meta")) ck.meta = meta_from_json(j["meta"]);
    return ck;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void atomic_write_file(const std::string& path, const std::string& contents) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw IoError("short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp + " -> " + path + ": " + ec.message());
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

} // namespace sdm
