#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <functional>

#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"

using namespace glf;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode{};
}

}  // namespace

TEST_CASE("default config round-trips through TOML") {
    ExperimentConfig c;
    c.run.seed = 42;
    c.decay.window = {15.0, 150.0};
    c.contour.kind = ContourKind::LeftParabolaRays;
    c.decay_quantities = {"p_L1", "psix_L1"};
    c.semigroup.times = {0.5, 2.0, 7.25};
    const auto text = to_toml(c);
    const auto back = parse_config(text);
    CHECK(to_toml(back) == text);
    CHECK(back.run.seed == 42);
    CHECK(back.decay.window.lo == 15.0);
    CHECK(back.contour.kind == ContourKind::LeftParabolaRays);
    CHECK(back.decay_quantities.size() == 2);
}

TEST_CASE("doubles keep every bit through TOML") {
    ExperimentConfig c;
    c.nonlinear.options.dt = 0.1 + 0.2;
    c.crossmodel.x_min = -1.0 / 3.0;
    const auto back = parse_config(to_toml(c));
    CHECK(back.nonlinear.options.dt == c.nonlinear.options.dt);
    CHECK(back.crossmodel.x_min == c.crossmodel.x_min);
}

TEST_CASE("unknown keys and sections are rejected by name") {
    try {
        parse_config("[front]\nnn = 3\n");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigInvalid);
        CHECK(std::string(e.what()).find("front.nn") != std::string::npos);
    }
    CHECK(code_of([] { parse_config("[nosuch]\nx = 1\n"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { parse_config("[front]\nn = \"many\"\n"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { parse_config("[front\n"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("validation catches inconsistent values") {
    CHECK(code_of([] { parse_config("[front]\nx_min = 5.0\nx_max = -5.0\n"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { parse_config("[decay]\nquantities = [\"nope\"]\n"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([] { parse_config("[run]\nexperiment = \"dance\"\n"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("set and get by dotted key") {
    ExperimentConfig c;
    set_config_value(c, "semigroup.dt", "0.02");
    set_config_value(c, "run.out", "some/dir");
    set_config_value(c, "contour.kind", "right_arc_rays");
    CHECK(c.semigroup.dt == 0.02);
    CHECK(c.run.out == "some/dir");
    CHECK(get_config_value(c, "semigroup.dt") == "0.02");
    CHECK(get_config_value(c, "run.out").find("some/dir") != std::string::npos);
    CHECK(code_of([&] { set_config_value(c, "semigroup.nope", "1"); }) == ErrorCode::ConfigInvalid);
    CHECK(code_of([&] { get_config_value(c, "nope.dt"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("environment overrides") {
    ExperimentConfig c;
    apply_env_overrides(c, {{"GLF_RUN_SEED", "9"}, {"GLF_DECAY_T", "50.0"}, {"HOME", "/x"}});
    CHECK(c.run.seed == 9);
    CHECK(c.decay.T == 50.0);
    CHECK(code_of([&] { apply_env_overrides(c, {{"GLF_RUN_SPEED", "1"}}); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("load_config reports missing files") {
    CHECK(code_of([] { load_config("/nonexistent/glfront.toml"); }) == ErrorCode::IoError);
    const auto p = std::filesystem::temp_directory_path() / "glfront_test_config.toml";
    {
        std::ofstream f(p);
        f << "[run]\nseed = 3\n";
    }
    CHECK(load_config(p.string()).run.seed == 3);
    std::filesystem::remove(p);
}

TEST_CASE("experiment names map to criteria") {
    CHECK(experiment_criteria("front") == std::vector<int>{1});
    CHECK(experiment_criteria("nonlinear-theorem1") == std::vector<int>{8, 9});
    CHECK(experiment_criteria("verify-all").size() == 10);
    CHECK(code_of([] { experiment_criteria("bogus"); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("front experiment writes artifacts and a summary") {
    ExperimentConfig c;
    c.front = {-60.0, 60.0, 1201, 1e-8};
    const auto dir = (std::filesystem::temp_directory_path() / "glfront_test_front").string();
    std::filesystem::remove_all(dir);
    const auto rep = run_experiment(c, "front", dir);
    REQUIRE(rep.criteria.size() == 1);
    CHECK(rep.criteria[0].id == 1);
    CHECK(rep.criteria[0].value("front_residual") <= 1e-8);
    for (const char* f : {"front.csv", "front.svg", "summary.txt"})
        CHECK(std::filesystem::exists(std::filesystem::path(dir) / f));
    const auto lines = summary_lines(rep);
    CHECK(lines.back().first == "all_pass");
    std::filesystem::remove_all(dir);
}

TEST_CASE("module errors carry the experiment name") {
    ExperimentConfig c;
    c.front = {-3.0, 3.0, 31, 1e-8};
    const auto dir = (std::filesystem::temp_directory_path() / "glfront_test_err").string();
    try {
        run_experiment(c, "front", dir);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("front:") != std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("shipped default config matches the built-in defaults") {
    const auto shipped = load_config(std::string(GLF_SOURCE_DIR) + "/configs/default.toml");
    ExperimentConfig c;
    c.run.experiment = "verify-all";
    CHECK(to_toml(shipped) == to_toml(c));
}
