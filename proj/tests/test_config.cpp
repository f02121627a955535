#include <fstream>

#include "doctest.h"
#include "sdm/config.hpp"
#include "sdm/errors.hpp"
#include "test_util.hpp"

using namespace sdm;

namespace {

std::string write_json(const testutil::TempDir& dir, const std::string& name,
                       const std::string& text) {
    const std::string path = dir.file(name);
    std::ofstream out(path);
    out << text;
    return path;
}

using Overrides = std::vector<std::pair<std::string, std::string>>;

} // namespace

TEST_CASE("no file and no overrides yields the documented defaults") {
    RunConfig cfg = parse_config("", {});
    CHECK(cfg.task == "pointmass");
    CHECK(cfg.out_dir == "run");
    CHECK(cfg.seed == 42);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{42, 43, 44});
    CHECK(cfg.episodes == 20);
    CHECK(cfg.schedule.kind == "linear");
    CHECK(cfg.schedule.T == 50);
    CHECK(cfg.schedule.beta_min == 1e-4);
    CHECK(cfg.schedule.beta_max == 0.1);
    CHECK(cfg.hidden == std::vector<std::size_t>{128, 128, 128});
    CHECK(cfg.teacher.iters == 8000);
    CHECK(cfg.distill.c == 5);
    CHECK(cfg.distill.normalize_direction);
    CHECK_FALSE(cfg.distill.ablate_scratch_init);
    CHECK(cfg.eval.nfe == 10);
    CHECK(cfg.eval.samples == 4000);
}

TEST_CASE("an empty JSON object behaves exactly like no file") {
    testutil::TempDir dir;
    const std::string path = write_json(dir, "empty.json", "{}\n");
    RunConfig from_file = parse_config(path, {});
    RunConfig defaults = parse_config("", {});
    CHECK(config_to_json(from_file) == config_to_json(defaults));
}

TEST_CASE("file values apply over defaults, overrides apply over the file") {
    testutil::TempDir dir;
    const std::string path = write_json(dir, "cfg.json", R"({
        "task": "gmm",
        "schedule": {"T": 20, "beta_max": 0.05},
        "distill": {"c": 2, "iters": 100},
        "net": {"hidden": [32, 16]}
    })");

    SUBCASE("file only") {
        RunConfig cfg = parse_config(path, {});
        CHECK(cfg.task == "gmm");
        CHECK(cfg.schedule.T == 20);
        CHECK(cfg.schedule.beta_max == 0.05);
        CHECK(cfg.distill.c == 2);
        CHECK(cfg.distill.iters == 100);
        CHECK(cfg.hidden == std::vector<std::size_t>{32, 16});
        CHECK(cfg.teacher.iters == 8000); // untouched keys keep defaults
    }

    SUBCASE("override beats file") {
        RunConfig cfg = parse_config(path, Overrides{{"distill.c", "3"}});
        CHECK(cfg.distill.c == 3);
        CHECK(cfg.distill.iters == 100);
    }
}

TEST_CASE("dotted keys at the top level address the same fields as nested objects") {
    testutil::TempDir dir;
    const std::string nested = write_json(dir, "a.json", R"({"distill": {"c": 4}})");
    const std::string dotted = write_json(dir, "b.json", R"({"distill.c": 4})");
    CHECK(parse_config(nested, {}).distill.c == 4);
    CHECK(parse_config(dotted, {}).distill.c == 4);
}

TEST_CASE("override values are parsed per field type") {
    RunConfig cfg = parse_config(
        "", Overrides{{"task", "gmm"},
                      {"seed", "7"},
                      {"seeds", "1,2,3"},
                      {"schedule.beta_max", "0.2"},
                      {"net.hidden", "64,32"},
                      {"distill.normalize_direction", "false"},
                      {"distill.ablate_scratch_init", "1"}});
    CHECK(cfg.task == "gmm");
    CHECK(cfg.seed == 7);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});
    CHECK(cfg.schedule.beta_max == 0.2);
    CHECK(cfg.hidden == std::vector<std::size_t>{64, 32});
    CHECK_FALSE(cfg.distill.normalize_direction);
    CHECK(cfg.distill.ablate_scratch_init);
}

TEST_CASE("seeds accept a JSON array in files") {
    testutil::TempDir dir;
    const std::string path = write_json(dir, "cfg.json", R"({"seeds": [9, 10, 11, 12]})");
    CHECK(parse_config(path, {}).seeds == std::vector<std::uint64_t>{9, 10, 11, 12});
}

TEST_CASE("unknown keys are rejected by name") {
    testutil::TempDir dir;
    const std::string top = write_json(dir, "a.json", R"({"foo": 1})");
    CHECK_THROWS_WITH_AS(parse_config(top, {}), "unknown config key: foo", ConfigError);

    const std::string nested = write_json(dir, "b.json", R"({"distill": {"bogus": 1}})");
    CHECK_THROWS_WITH_AS(parse_config(nested, {}), "unknown config key: distill.bogus",
                         ConfigError);

    const std::string group = write_json(dir, "c.json", R"({"nope": {"c": 1}})");
    CHECK_THROWS_WITH_AS(parse_config(group, {}), "unknown config key: nope", ConfigError);

    CHECK_THROWS_WITH_AS(parse_config("", Overrides{{"distill.gamma", "2"}}),
                         "unknown config key: distill.gamma", ConfigError);
}

TEST_CASE("type mismatches name the key and the expected type") {
    testutil::TempDir dir;
    const std::string bad_int = write_json(dir, "a.json", R"({"distill": {"c": "three"}})");
    CHECK_THROWS_WITH_AS(parse_config(bad_int, {}), "config key 'distill.c' expects integer",
                         ConfigError);

    const std::string bad_str = write_json(dir, "b.json", R"({"task": 3})");
    CHECK_THROWS_WITH_AS(parse_config(bad_str, {}), "config key 'task' expects string",
                         ConfigError);

    const std::string bad_float = write_json(dir, "c.json", R"({"teacher": {"lr": true}})");
    CHECK_THROWS_WITH_AS(parse_config(bad_float, {}), "config key 'teacher.lr' expects float",
                         ConfigError);

    const std::string bad_bool =
        write_json(dir, "d.json", R"({"distill": {"normalize_direction": 1}})");
    CHECK_THROWS_WITH_AS(parse_config(bad_bool, {}),
                         "config key 'distill.normalize_direction' expects bool", ConfigError);

    const std::string bad_list = write_json(dir, "e.json", R"({"net": {"hidden": 64}})");
    CHECK_THROWS_WITH_AS(parse_config(bad_list, {}),
                         "config key 'net.hidden' expects integer list", ConfigError);

    CHECK_THROWS_WITH_AS(parse_config("", Overrides{{"distill.c", "abc"}}),
                         "config key 'distill.c' expects integer", ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("", Overrides{{"distill.normalize_direction", "yes"}}),
                         "config key 'distill.normalize_direction' expects bool", ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("", Overrides{{"seeds", "1,x"}}),
                         "config key 'seeds' expects integer list", ConfigError);
}

TEST_CASE("hidden widths below one are rejected from either source") {
    testutil::TempDir dir;
    const std::string path = write_json(dir, "cfg.json", R"({"net": {"hidden": [8, 0]}})");
    CHECK_THROWS_AS(parse_config(path, {}), ConfigError);
    CHECK_THROWS_AS(parse_config("", Overrides{{"net.hidden", "8,0"}}), ConfigError);
}

TEST_CASE("validation rejects out-of-range settings") {
    CHECK_THROWS_AS(parse_config("", Overrides{{"task", "cartpole"}}), ConfigError);
    CHECK_THROWS_AS(parse_config("", Overrides{{"out_dir", ""}}), ConfigError);
    CHECK_THROWS_AS(parse_config("", Overrides{{"distill.c", "0"}}), ConfigError);
    CHECK_THROWS_AS(parse_config("", Overrides{{"schedule.kind", "cosine"}}), ConfigError);
    CHECK_THROWS_AS(parse_config("", Overrides{{"schedule.beta_min", "0"}}), ConfigError);
    CHECK_THROWS_AS(parse_config("", Overrides{{"schedule.beta_max", "1.0"}}), ConfigError);
    CHECK_THROWS_AS(parse_config("", Overrides{{"eval.nfe", "51"}}), ConfigError); // > T
    CHECK_THROWS_AS(parse_config("", Overrides{{"eval.samples", "1"}}), ConfigError);
    CHECK_THROWS_AS(parse_config("", Overrides{{"eval.bench_reps", "50"}}), ConfigError);
    CHECK_THROWS_AS(parse_config("", Overrides{{"eval.bench_warmup", "5"}}), ConfigError);
    CHECK_THROWS_AS(parse_config("", Overrides{{"teacher.lr", "0"}}), ConfigError);

    // nfe bound tracks the configured T, not the default
    RunConfig cfg =
        parse_config("", Overrides{{"schedule.T", "100"}, {"eval.nfe", "51"}});
    CHECK(cfg.eval.nfe == 51);
}

TEST_CASE("unreadable or malformed config files are config errors") {
    testutil::TempDir dir;
    CHECK_THROWS_AS(parse_config(dir.file("missing.json"), {}), ConfigError);

    const std::string bad = write_json(dir, "bad.json", "{ not json");
    CHECK_THROWS_AS(parse_config(bad, {}), ConfigError);

    const std::string arr = write_json(dir, "arr.json", "[1, 2]");
    CHECK_THROWS_AS(parse_config(arr, {}), ConfigError);
}

TEST_CASE("a saved snapshot parses back to the same config") {
    testutil::TempDir dir;
    RunConfig cfg = parse_config(
        "", Overrides{{"task", "gmm"},
                      {"seeds", "5,6,7"},
                      {"schedule.T", "30"},
                      {"net.hidden", "48"},
                      {"distill.lambda_gen", "0.5"},
                      {"distill.normalize_direction", "false"},
                      {"eval.nfe", "4"}});
    const std::string snap = dir.file("snapshot.json");
    save_config_snapshot(cfg, snap);
    RunConfig reloaded = parse_config(snap, {});
    CHECK(config_to_json(reloaded) == config_to_json(cfg));
    CHECK(reloaded.seeds == std::vector<std::uint64_t>{5, 6, 7});
    CHECK(reloaded.distill.lambda_gen == 0.5);
}
