#include "sdm/config.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sdm/checkpoint.hpp"
#include "sdm/errors.hpp"

namespace sdm {

namespace {

using json = nlohmann::json;

struct Field {
    const char* type_name;
    std::function<void(RunConfig&, const json&, const std::string&)> from_json;
    std::function<void(RunConfig&, const std::string&, const std::string&)> from_string;
};

[[noreturn]] void type_error(const std::string& key, const char* expected) {
    throw ConfigError("config key '" + key + "' expects " + expected);
}

long long json_int(const json& j, const std::string& key, const char* expected) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) type_error(key, expected);
    return j.get<long long>();
}

long long str_int(const std::string& v, const std::string& key, const char* expected) {
    char* end = nullptr;
    const long long out = std::strtoll(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') type_error(key, expected);
    return out;
}

double str_double(const std::string& v, const std::string& key) {
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') type_error(key, "float");
    return out;
}

bool str_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    type_error(key, "bool");
}

std::vector<std::string> split_commas(const std::string& v) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(v);
    while (std::getline(in, cur, ',')) parts.push_back(cur);
    return parts;
}

Field int_field(int RunConfig::*member) {
    return {"integer",
            [member](RunConfig& c, const json& j, const std::string& k) {
                c.*member = static_cast<int>(json_int(j, k, "integer"));
            },
            [member](RunConfig& c, const std::string& v, const std::string& k) {
                c.*member = static_cast<int>(str_int(v, k, "integer"));
            }};
}

template <typename S>
Field sub_int(S RunConfig::*sub, int S::*member) {
    return {"integer",
            [sub, member](RunConfig& c, const json& j, const std::string& k) {
                c.*sub.*member = static_cast<int>(json_int(j, k, "integer"));
            },
            [sub, member](RunConfig& c, const std::string& v, const std::string& k) {
                c.*sub.*member = static_cast<int>(str_int(v, k, "integer"));
            }};
}

template <typename S>
Field sub_double(S RunConfig::*sub, double S::*member) {
    return {"float",
            [sub, member](RunConfig& c, const json& j, const std::string& k) {
                if (!j.is_number()) type_error(k, "float");
                c.*sub.*member = j.get<double>();
            },
            [sub, member](RunConfig& c, const std::string& v, const std::string& k) {
                c.*sub.*member = str_double(v, k);
            }};
}

template <typename S>
Field sub_bool(S RunConfig::*sub, bool S::*member) {
    return {"bool",
            [sub, member](RunConfig& c, const json& j, const std::string& k) {
                if (!j.is_boolean()) type_error(k, "bool");
                c.*sub.*member = j.get<bool>();
            },
            [sub, member](RunConfig& c, const std::string& v, const std::string& k) {
                c.*sub.*member = str_bool(v, k);
            }};
}

Field string_field(std::string RunConfig::*member) {
    return {"string",
            [member](RunConfig& c, const json& j, const std::string& k) {
                if (!j.is_string()) type_error(k, "string");
                c.*member = j.get<std::string>();
            },
            [member](RunConfig& c, const std::string& v, const std::string&) { c.*member = v; }};
}

const std::map<std::string, Field>& field_table() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        t["task"] = string_field(&RunConfig::task);
        t["out_dir"] = string_field(&RunConfig::out_dir);
        t["seed"] = {"integer",
                     [](RunConfig& c, const json& j, const std::string& k) {
                         c.seed = static_cast<std::uint64_t>(json_int(j, k, "integer"));
                     },
                     [](RunConfig& c, const std::string& v, const std::string& k) {
                         c.seed = static_cast<std::uint64_t>(str_int(v, k, "integer"));
                     }};
        t["seeds"] = {"integer list",
                      [](RunConfig& c, const json& j, const std::string& k) {
                          if (!j.is_array()) type_error(k, "integer list");
                          std::vector<std::uint64_t> out;
                          for (const auto& e : j)
                              out.push_back(static_cast<std::uint64_t>(
                                  json_int(e, k, "integer list")));
                          c.seeds = out;
                      },
                      [](RunConfig& c, const std::string& v, const std::string& k) {
                          std::vector<std::uint64_t> out;
                          for (const auto& p : split_commas(v))
                              out.push_back(static_cast<std::uint64_t>(
                                  str_int(p, k, "integer list")));
                          c.seeds = out;
                      }};
        t["episodes"] = int_field(&RunConfig::episodes);
        t["schedule.kind"] = {"string",
                              [](RunConfig& c, const json& j, const std::string& k) {
                                  if (!j.is_string()) type_error(k, "string");
                                  c.schedule.kind = j.get<std::string>();
                              },
                              [](RunConfig& c, const std::string& v, const std::string&) {
                                  c.schedule.kind = v;
                              }};
        t["schedule.T"] = sub_int(&RunConfig::schedule, &ScheduleConfig::T);
        t["schedule.beta_min"] = sub_double(&RunConfig::schedule, &ScheduleConfig::beta_min);
        t["schedule.beta_max"] = sub_double(&RunConfig::schedule, &ScheduleConfig::beta_max);
        t["net.hidden"] = {"integer list",
                           [](RunConfig& c, const json& j, const std::string& k) {
                               if (!j.is_array()) type_error(k, "integer list");
                               std::vector<std::size_t> out;
                               for (const auto& e : j) {
                                   const long long w = json_int(e, k, "integer list");
                                   if (w < 1) throw ConfigError(
                                       "config key '" + k + "': widths must be >= 1");
                                   out.push_back(static_cast<std::size_t>(w));
                               }
                               c.hidden = out;
                           },
                           [](RunConfig& c, const std::string& v, const std::string& k) {
                               std::vector<std::size_t> out;
                               for (const auto& p : split_commas(v)) {
                                   const long long w = str_int(p, k, "integer list");
                                   if (w < 1) throw ConfigError(
                                       "config key '" + k + "': widths must be >= 1");
                                   out.push_back(static_cast<std::size_t>(w));
                               }
                               c.hidden = out;
                           }};
        t["teacher.iters"] = sub_int(&RunConfig::teacher, &TeacherConfig::iters);
        t["teacher.batch"] = sub_int(&RunConfig::teacher, &TeacherConfig::batch);
        t["teacher.lr"] = sub_double(&RunConfig::teacher, &TeacherConfig::lr);
        t["teacher.log_every"] = sub_int(&RunConfig::teacher, &TeacherConfig::log_every);
        t["distill.lambda_gen"] = sub_double(&RunConfig::distill, &DistillConfig::lambda_gen);
        t["distill.gamma_diff"] = sub_double(&RunConfig::distill, &DistillConfig::gamma_diff);
        t["distill.c"] = sub_int(&RunConfig::distill, &DistillConfig::c);
        t["distill.t_min_frac"] = sub_double(&RunConfig::distill, &DistillConfig::t_min_frac);
        t["distill.t_max_frac"] = sub_double(&RunConfig::distill, &DistillConfig::t_max_frac);
        t["distill.normalize_direction"] =
            sub_bool(&RunConfig::distill, &DistillConfig::normalize_direction);
        t["distill.iters"] = sub_int(&RunConfig::distill, &DistillConfig::iters);
        t["distill.batch"] = sub_int(&RunConfig::distill, &DistillConfig::batch);
        t["distill.lr_gen"] = sub_double(&RunConfig::distill, &DistillConfig::lr_gen);
        t["distill.lr_D"] = sub_double(&RunConfig::distill, &DistillConfig::lr_D);
        t["distill.ablate_scratch_init"] =
            sub_bool(&RunConfig::distill, &DistillConfig::ablate_scratch_init);
        t["eval.episodes"] = sub_int(&RunConfig::eval, &EvalConfig::episodes);
        t["eval.nfe"] = sub_int(&RunConfig::eval, &EvalConfig::nfe);
        t["eval.samples"] = sub_int(&RunConfig::eval, &EvalConfig::samples);
        t["eval.bench_reps"] = sub_int(&RunConfig::eval, &EvalConfig::bench_reps);
        t["eval.bench_warmup"] = sub_int(&RunConfig::eval, &EvalConfig::bench_warmup);
        return t;
    }();
    return table;
}

void apply_json_object(RunConfig& cfg, const json& obj, const std::string& prefix) {
    const auto& table = field_table();
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        const auto found = table.find(key);
        if (found != table.end()) {
            found->second.from_json(cfg, it.value(), key);
            continue;
        }
        if (it.value().is_object()) {
            const std::string sub_prefix = key + ".";
            bool known_group = false;
            for (const auto& [name, _] : table)
                if (name.compare(0, sub_prefix.size(), sub_prefix) == 0) {
                    known_group = true;
                    break;
                }
            if (known_group) {
                apply_json_object(cfg, it.value(), key);
                continue;
            }
        }
        throw ConfigError("unknown config key: " + key);
    }
}

} // namespace

void RunConfig::validate() const {
    if (task != "gmm" && task != "pointmass")
        throw ConfigError("task must be 'gmm' or 'pointmass', got '" + task + "'");
    if (out_dir.empty()) throw ConfigError("out_dir must be nonempty");
    if (seeds.empty()) throw ConfigError("seeds must be nonempty");
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (schedule.kind != "linear")
        throw ConfigError("schedule.kind must be 'linear', got '" + schedule.kind + "'");
    if (schedule.T < 1) throw ConfigError("schedule.T must be >= 1");
    if (!(schedule.beta_min > 0.0 && schedule.beta_min <= schedule.beta_max &&
          schedule.beta_max < 1.0))
        throw ConfigError("schedule betas must satisfy 0 < beta_min <= beta_max < 1");
    if (hidden.empty()) throw ConfigError("net.hidden must be nonempty");
    if (teacher.iters < 1) throw ConfigError("teacher.iters must be >= 1");
    if (teacher.batch < 1) throw ConfigError("teacher.batch must be >= 1");
    if (!(teacher.lr > 0.0)) throw ConfigError("teacher.lr must be positive");
    if (teacher.log_every < 1) throw ConfigError("teacher.log_every must be >= 1");
    distill.validate();
    if (eval.episodes < 1) throw ConfigError("eval.episodes must be >= 1");
    if (eval.nfe < 1) throw ConfigError("eval.nfe must be >= 1");
    if (eval.nfe > schedule.T) throw ConfigError("eval.nfe must be <= schedule.T");
    if (eval.samples < 2) throw ConfigError("eval.samples must be >= 2");
    if (eval.bench_reps < 100) throw ConfigError("eval.bench_reps must be >= 100");
    if (eval.bench_warmup < 10) throw ConfigError("eval.bench_warmup must be >= 10");
}

RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        std::string text;
        try {
            text = read_file(path);
        } catch (const IoError& e) {
            throw ConfigError(std::string("cannot read config file: ") + e.what());
        }
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(path + ": invalid JSON: " + e.what());
        }
        if (!doc.is_object()) throw ConfigError(path + ": config root must be a JSON object");
        apply_json_object(cfg, doc, "");
    }
    const auto& table = field_table();
    for (const auto& [key, value] : overrides) {
        const auto found = table.find(key);
        if (found == table.end()) throw ConfigError("unknown config key: " + key);
        found->second.from_string(cfg, value, key);
    }
    cfg.validate();
    return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["task"] = cfg.task;
    j["out_dir"] = cfg.out_dir;
    j["seed"] = cfg.seed;
    j["seeds"] = cfg.seeds;
    j["episodes"] = cfg.episodes;
    j["schedule"] = {{"kind", cfg.schedule.kind},
                     {"T", cfg.schedule.T},
                     {"beta_min", cfg.schedule.beta_min},
                     {"beta_max", cfg.schedule.beta_max}};
    j["net"] = {{"hidden", cfg.hidden}};
    j["teacher"] = {{"iters", cfg.teacher.iters},
                    {"batch", cfg.teacher.batch},
                    {"lr", cfg.teacher.lr},
                    {"log_every", cfg.teacher.log_every}};
    j["distill"] = {{"lambda_gen", cfg.distill.lambda_gen},
                    {"gamma_diff", cfg.distill.gamma_diff},
                    {"c", cfg.distill.c},
                    {"t_min_frac", cfg.distill.t_min_frac},
                    {"t_max_frac", cfg.distill.t_max_frac},
                    {"normalize_direction", cfg.distill.normalize_direction},
                    {"iters", cfg.distill.iters},
                    {"batch", cfg.distill.batch},
                    {"lr_gen", cfg.distill.lr_gen},
                    {"lr_D", cfg.distill.lr_D},
                    {"ablate_scratch_init", cfg.distill.ablate_scratch_init}};
    j["eval"] = {{"episodes", cfg.eval.episodes},
                 {"nfe", cfg.eval.nfe},
                 {"samples", cfg.eval.samples},
                 {"bench_reps", cfg.eval.bench_reps},
                 {"bench_warmup", cfg.eval.bench_warmup}};
    return j.dump(2) + "\n";
}

void save_config_snapshot(const RunConfig& cfg, const std::string& path) {
    atomic_write_file(path, config_to_json(cfg));
}

} // namespace sdm
