#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nonlinear.hpp"
#include "semigroup.hpp"

namespace glf {

struct RunConfig {
    std::string experiment = "verify-all";
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::string out = "glfront_out";
};

struct FrontConfig {
    double x_min = -100.0;
    double x_max = 100.0;
    std::size_t n = 4096;
    double tol = 1e-8;
};

struct SpectrumConfig {
    double x_min = -100.0;
    double x_max = 100.0;
    std::size_t n = 2048;
    double front_tol = 1e-8;
    double halfplane_cut = 1e-3;
    double fredholm_eta = 0.1;
    double k_max = 10.0;
    std::size_t k_samples = 401;
};

struct ResolventConfig {
    double x_min = -100.0;
    double x_max = 100.0;
    std::size_t n = 4096;
    double front_tol = 1e-8;
    Interval gamma_range{1e-3, 1e-1};
    std::size_t gamma_samples = 13;
    double gamma_ref = 1e-4;
    double delta = 0.3;            // |gamma| bound for reassembly cases
    std::size_t reassembly_cases = 20;
};

struct SemigroupConfig {
    double x_min = -100.0;
    double x_max = 100.0;
    std::size_t n = 4096;
    double front_tol = 1e-8;
    double dt = 0.005;
    std::vector<double> times{1.0, 10.0};
};

struct PropertiesConfig {
    std::size_t cases = 1000;
};

struct OutputConfig {
    bool csv = true;
    bool svg = true;
};

struct ExperimentConfig {
    RunConfig run;
    FrontConfig front;
    SpectrumConfig spectrum;
    ResolventConfig resolvent;
    ContourSpec contour;
    SemigroupConfig semigroup;
    DecaySetup decay;
    std::vector<std::string> decay_quantities{"p_W1inf_weighted", "p_L1",    "psi_Linf",
                                              "psi_Linf_m10",     "psix_L1", "psix_Linf"};
    Theorem1Setup nonlinear;
    CrossModelSetup crossmodel;
    PropertiesConfig properties;
    OutputConfig output;
};

/// Calls f(section, key, field) for every configurable field. Field types: double, std::size_t, unsigned,
/// std::uint64_t, bool, std::string, Interval, std::vector<double>, std::vector<std::string>, ContourKind.
template <class Cfg, class F>
void visit_config(Cfg& c, F&& f) {
    f("run", "experiment", c.run.experiment);
    f("run", "seed", c.run.seed);
    f("run", "jobs", c.run.jobs);
    f("run", "out", c.run.out);

    f("front", "x_min", c.front.x_min);
    f("front", "x_max", c.front.x_max);
    f("front", "n", c.front.n);
    f("front", "tol", c.front.tol);

    f("spectrum", "x_min", c.spectrum.x_min);
    f("spectrum", "x_max", c.spectrum.x_max);
    f("spectrum", "n", c.spectrum.n);
    f("spectrum", "front_tol", c.spectrum.front_tol);
    f("spectrum", "halfplane_cut", c.spectrum.halfplane_cut);
    f("spectrum", "fredholm_eta", c.spectrum.fredholm_eta);
    f("spectrum", "k_max", c.spectrum.k_max);
    f("spectrum", "k_samples", c.spectrum.k_samples);

    f("resolvent", "x_min", c.resolvent.x_min);
    f("resolvent", "x_max", c.resolvent.x_max);
    f("resolvent", "n", c.resolvent.n);
    f("resolvent", "front_tol", c.resolvent.front_tol);
    f("resolvent", "gamma_range", c.resolvent.gamma_range);
    f("resolvent", "gamma_samples", c.resolvent.gamma_samples);
    f("resolvent", "gamma_ref", c.resolvent.gamma_ref);
    f("resolvent", "delta", c.resolvent.delta);
    f("resolvent", "reassembly_cases", c.resolvent.reassembly_cases);

    f("contour", "kind", c.contour.kind);
    f("contour", "c", c.contour.c);
    f("contour", "delta", c.contour.delta);
    f("contour", "arc_radius_scale", c.contour.arc_radius_scale);
    f("contour", "ray_angle", c.contour.ray_angle);
    f("contour", "left_ray_angle", c.contour.left_ray_angle);
    f("contour", "parabola_shift_scale", c.contour.parabola_shift_scale);
    f("contour", "n_nodes", c.contour.n_nodes);

    f("semigroup", "x_min", c.semigroup.x_min);
    f("semigroup", "x_max", c.semigroup.x_max);
    f("semigroup", "n", c.semigroup.n);
    f("semigroup", "front_tol", c.semigroup.front_tol);
    f("semigroup", "dt", c.semigroup.dt);
    f("semigroup", "times", c.semigroup.times);

    f("decay", "x_min", c.decay.x_min);
    f("decay", "x_max", c.decay.x_max);
    f("decay", "n", c.decay.n);
    f("decay", "dt", c.decay.dt);
    f("decay", "T", c.decay.T);
    f("decay", "window", c.decay.window);
    f("decay", "front_tol", c.decay.front_tol);
    f("decay", "left_extension", c.decay.left_extension);
    f("decay", "quantities", c.decay_quantities);

    f("nonlinear", "epsilon", c.nonlinear.epsilon);
    f("nonlinear", "x_min", c.nonlinear.x_min);
    f("nonlinear", "x_max", c.nonlinear.x_max);
    f("nonlinear", "n", c.nonlinear.n);
    f("nonlinear", "T", c.nonlinear.T);
    f("nonlinear", "window", c.nonlinear.window);
    f("nonlinear", "front_tol", c.nonlinear.front_tol);
    f("nonlinear", "left_extension", c.nonlinear.left_extension);
    f("nonlinear", "dt", c.nonlinear.options.dt);
    f("nonlinear", "sponge_fraction", c.nonlinear.options.sponge_fraction);
    f("nonlinear", "sponge_strength", c.nonlinear.options.sponge_strength);
    f("nonlinear", "guard", c.nonlinear.options.guard);
    f("nonlinear", "max_jump", c.nonlinear.options.max_jump);
    f("nonlinear", "dt_min", c.nonlinear.options.dt_min);
    f("nonlinear", "checkpoint_ratio", c.nonlinear.options.checkpoint_ratio);

    f("crossmodel", "epsilon", c.crossmodel.epsilon);
    f("crossmodel", "x_min", c.crossmodel.x_min);
    f("crossmodel", "x_max", c.crossmodel.x_max);
    f("crossmodel", "n", c.crossmodel.n);
    f("crossmodel", "T", c.crossmodel.T);
    f("crossmodel", "dt", c.crossmodel.dt);
    f("crossmodel", "front_tol", c.crossmodel.front_tol);
    f("crossmodel", "levels", c.crossmodel.levels);

    f("properties", "cases", c.properties.cases);

    f("output", "csv", c.output.csv);
    f("output", "svg", c.output.svg);
}

const std::vector<std::string>& experiment_names();

/// Parses TOML text over the defaults. Unknown sections or keys and ill-typed values raise ConfigInvalid
/// naming the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Sets one field from its textual value ("decay.dt", "0.1"). Strings may be given bare.
void set_config_value(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value);

/// Value of one field rendered as TOML ("run.out" gives "\"glfront_out\"").
std::string get_config_value(const ExperimentConfig& cfg, const std::string& dotted_key);

/// Applies overrides named GLF_<SECTION>_<KEY> (upper case). Any other GLF_ variable is rejected.
void apply_env_overrides(ExperimentConfig& cfg, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> glf_environment();

/// Range and consistency checks; raises ConfigInvalid naming the key.
void validate_config(const ExperimentConfig& cfg);

/// Effective configuration as TOML; parse_config(to_toml(c)) reproduces c.
std::string to_toml(const ExperimentConfig& cfg);

}  // namespace glf
