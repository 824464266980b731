// glfront: command line driver over the C API.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glfront/glfront.h"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

struct Options {
    std::string config;
    std::string out;
    std::vector<std::string> sets;
    int jobs = 0;
    long long seed = -1;
    bool quiet = false;
};

int report_error(const char* what, glf_status s) {
    std::fprintf(stderr, "glfront: %s failed (%s): %s\n", what, glf_status_name(s), glf_last_error());
    return kExitError;
}

std::string unquote(std::string s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
    return s;
}

int run(const std::string& experiment, const Options& opt) {
    glf_config* cfg = nullptr;
    glf_status s = opt.config.empty() ? glf_config_default(&cfg) : glf_config_load(opt.config.c_str(), &cfg);
    if (s != GLF_OK) return report_error("loading config", s);
    std::unique_ptr<glf_config, void (*)(glf_config*)> guard(cfg, glf_config_free);

    // precedence: file < environment < --set < dedicated flags
    if ((s = glf_config_apply_env(cfg)) != GLF_OK) return report_error("environment overrides", s);
    for (const auto& kv : opt.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "glfront: --set expects section.key=value, got '%s'\n", kv.c_str());
            return kExitError;
        }
        if ((s = glf_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str())) != GLF_OK)
            return report_error("--set", s);
    }
    if (opt.jobs > 0 && (s = glf_config_set(cfg, "run.jobs", std::to_string(opt.jobs).c_str())) != GLF_OK)
        return report_error("--jobs", s);
    if (opt.seed >= 0 && (s = glf_config_set(cfg, "run.seed", std::to_string(opt.seed).c_str())) != GLF_OK)
        return report_error("--seed", s);
    if (!opt.out.empty() && (s = glf_config_set(cfg, "run.out", opt.out.c_str())) != GLF_OK)
        return report_error("--out", s);
    if ((s = glf_config_set(cfg, "run.experiment", experiment.c_str())) != GLF_OK)
        return report_error("experiment", s);
    if ((s = glf_config_validate(cfg)) != GLF_OK) return report_error("validating config", s);

    char* out_raw = nullptr;
    if ((s = glf_config_get(cfg, "run.out", &out_raw)) != GLF_OK) return report_error("reading run.out", s);
    const std::string out_dir = unquote(out_raw);
    glf_string_free(out_raw);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::fprintf(stderr, "glfront: cannot create '%s': %s\n", out_dir.c_str(), ec.message().c_str());
        return kExitError;
    }
    char* toml = nullptr;
    if ((s = glf_config_to_toml(cfg, &toml)) != GLF_OK) return report_error("serializing config", s);
    {
        std::ofstream f(std::filesystem::path(out_dir) / "effective_config.toml", std::ios::binary);
        f << toml;
    }
    glf_string_free(toml);

    glf_report* rep = nullptr;
    if ((s = glf_run(cfg, experiment.c_str(), out_dir.c_str(), &rep)) != GLF_OK)
        return report_error(experiment.c_str(), s);

    const std::size_t n = glf_report_criterion_count(rep);
    for (std::size_t i = 0; i < n; ++i) {
        glf_criterion c{};
        glf_report_criterion(rep, i, &c);
        std::printf("criterion %2d  %s  %8.2f s  %s\n", c.id, c.pass ? "PASS" : "FAIL", c.seconds, c.title);
        if (c.note[0]) std::printf("    error: %s\n", c.note);
        if (opt.quiet) continue;
        for (std::size_t j = 0; j < c.n_measured; ++j) {
            const char* key = nullptr;
            double v = 0.0;
            glf_report_measurement(rep, i, j, &key, &v);
            std::printf("    %-40s %.6e\n", key, v);
        }
    }
    const bool ok = glf_report_all_pass(rep) != 0;
    std::printf("%s: %s (artifacts in %s)\n", experiment.c_str(), ok ? "all criteria pass" : "some criteria fail",
                out_dir.c_str());
    glf_report_free(rep);
    return ok ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability experiments for the critical Ginzburg-Landau front"};
    app.require_subcommand(1);
    app.set_version_flag("--version", glf_version());

    Options opt;
    std::string chosen;
    for (std::size_t i = 0; i < glf_experiment_count(); ++i) {
        const std::string name = glf_experiment_name(i);
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", opt.config, "TOML configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory (run.out)");
        sub->add_option("--jobs", opt.jobs, "worker threads (run.jobs)")->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "random seed (run.seed)")->check(CLI::NonNegativeNumber);
        sub->add_option("--set", opt.sets, "override section.key=value")->take_all();
        sub->add_flag("-q,--quiet", opt.quiet, "print only the pass/fail lines");
        sub->callback([&chosen, name] { chosen = name; });
    }
    CLI11_PARSE(app, argc, argv);
    return run(chosen, opt);
}
