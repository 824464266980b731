#include "glfront/glfront.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "config.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "front.hpp"
#include "ratefit.hpp"

struct glf_config {
    glf::ExperimentConfig cfg;
};

struct glf_report {
    glf::ExperimentReport rep;
};

struct glf_front {
    std::vector<double> x, q, qprime;
    double residual = 0.0;
};

namespace {

thread_local std::string last_error;

template <class F>
glf_status guarded(F&& f) noexcept {
    try {
        last_error.clear();
        f();
        return GLF_OK;
    } catch (const glf::Error& e) {
        last_error = e.what();
        return static_cast<glf_status>(static_cast<int>(e.code()));
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return GLF_OUT_OF_MEMORY;
    } catch (const std::exception& e) {
        last_error = e.what();
        return GLF_INTERNAL;
    } catch (...) {
        last_error = "unknown exception";
        return GLF_INTERNAL;
    }
}

glf_status null_arg(const char* what) {
    last_error = std::string("InvalidArgument: null ") + what;
    return GLF_INVALID_ARGUMENT;
}

char* dup(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

}  // namespace

extern "C" {

const char* glf_version(void) { return "1.0.0"; }

const char* glf_status_name(glf_status status) {
    switch (status) {
        case GLF_OK: return "Ok";
        case GLF_OUT_OF_MEMORY: return "OutOfMemory";
        case GLF_INTERNAL: return "Internal";
        default:
            if (status >= GLF_INVALID_ARGUMENT && status <= GLF_IO_ERROR)
                return glf::error_code_name(static_cast<glf::ErrorCode>(status));
            return "Unknown";
    }
}

const char* glf_last_error(void) { return last_error.c_str(); }

void glf_string_free(char* s) { std::free(s); }

glf_status glf_config_default(glf_config** out) {
    if (!out) return null_arg("out");
    return guarded([&] { *out = new glf_config{}; });
}

glf_status glf_config_load(const char* path, glf_config** out) {
    if (!path || !out) return null_arg("argument");
    return guarded([&] { *out = new glf_config{glf::load_config(path)}; });
}

glf_status glf_config_parse(const char* toml_text, glf_config** out) {
    if (!toml_text || !out) return null_arg("argument");
    return guarded([&] { *out = new glf_config{glf::parse_config(toml_text)}; });
}

glf_status glf_config_set(glf_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return null_arg("argument");
    return guarded([&] {
        auto copy = cfg->cfg;  // leave cfg untouched on failure
        glf::set_config_value(copy, key, value);
        cfg->cfg = std::move(copy);
    });
}

glf_status glf_config_get(const glf_config* cfg, const char* key, char** value) {
    if (!cfg || !key || !value) return null_arg("argument");
    return guarded([&] { *value = dup(glf::get_config_value(cfg->cfg, key)); });
}

glf_status glf_config_apply_env(glf_config* cfg) {
    if (!cfg) return null_arg("config");
    return guarded([&] {
        auto copy = cfg->cfg;
        glf::apply_env_overrides(copy, glf::glf_environment());
        cfg->cfg = std::move(copy);
    });
}

glf_status glf_config_validate(const glf_config* cfg) {
    if (!cfg) return null_arg("config");
    return guarded([&] { glf::validate_config(cfg->cfg); });
}

glf_status glf_config_to_toml(const glf_config* cfg, char** toml_text) {
    if (!cfg || !toml_text) return null_arg("argument");
    return guarded([&] { *toml_text = dup(glf::to_toml(cfg->cfg)); });
}

void glf_config_free(glf_config* cfg) { delete cfg; }

size_t glf_experiment_count(void) { return glf::experiment_names().size(); }

const char* glf_experiment_name(size_t i) {
    const auto& n = glf::experiment_names();
    return i < n.size() ? n[i].c_str() : nullptr;
}

glf_status glf_run(const glf_config* cfg, const char* experiment, const char* out_dir, glf_report** out) {
    if (!cfg || !experiment || !out_dir || !out) return null_arg("argument");
    return guarded([&] {
        glf::validate_config(cfg->cfg);
        *out = new glf_report{glf::run_experiment(cfg->cfg, experiment, out_dir)};
    });
}

const char* glf_report_experiment(const glf_report* r) { return r ? r->rep.experiment.c_str() : ""; }

int glf_report_all_pass(const glf_report* r) { return r && r->rep.all_pass() ? 1 : 0; }

size_t glf_report_criterion_count(const glf_report* r) { return r ? r->rep.criteria.size() : 0; }

glf_status glf_report_criterion(const glf_report* r, size_t i, glf_criterion* out) {
    if (!r || !out) return null_arg("argument");
    if (i >= r->rep.criteria.size()) {
        last_error = "InvalidArgument: criterion index out of range";
        return GLF_INVALID_ARGUMENT;
    }
    const auto& c = r->rep.criteria[i];
    *out = {c.id, c.pass ? 1 : 0, c.seconds, c.runtime_limit, c.measured.size(), c.title.c_str(), c.note.c_str()};
    return GLF_OK;
}

glf_status glf_report_measurement(const glf_report* r, size_t i, size_t j, const char** key, double* value) {
    if (!r || !key || !value) return null_arg("argument");
    if (i >= r->rep.criteria.size() || j >= r->rep.criteria[i].measured.size()) {
        last_error = "InvalidArgument: measurement index out of range";
        return GLF_INVALID_ARGUMENT;
    }
    const auto& m = r->rep.criteria[i].measured[j];
    *key = m.key.c_str();
    *value = m.value;
    return GLF_OK;
}

size_t glf_report_file_count(const glf_report* r) { return r ? r->rep.files.size() : 0; }

const char* glf_report_file(const glf_report* r, size_t i) {
    return r && i < r->rep.files.size() ? r->rep.files[i].c_str() : nullptr;
}

void glf_report_free(glf_report* r) { delete r; }

glf_status glf_front_solve(double x_min, double x_max, size_t n, double tol, glf_front** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        const auto p = glf::solve_critical_front(x_min, x_max, n, tol);
        auto* f = new glf_front{p.grid.nodes(), p.q, p.qprime, p.residual};
        *out = f;
    });
}

size_t glf_front_size(const glf_front* f) { return f ? f->q.size() : 0; }

glf_status glf_front_data(const glf_front* f, const double** x, const double** q, const double** qprime) {
    if (!f) return null_arg("front");
    if (x) *x = f->x.data();
    if (q) *q = f->q.data();
    if (qprime) *qprime = f->qprime.data();
    return GLF_OK;
}

double glf_front_residual(const glf_front* f) { return f ? f->residual : 0.0; }

void glf_front_free(glf_front* f) { delete f; }

glf_status glf_fit_power_law(const double* t, const double* v, size_t n, double lo, double hi, double* exponent,
                             double* stderr_out) {
    if (!t || !v || !exponent) return null_arg("argument");
    return guarded([&] {
        const auto fit = glf::fit_power_law({t, n}, {v, n}, {lo, hi});
        *exponent = fit.exponent;
        if (stderr_out) *stderr_out = fit.stderr_;
    });
}

}  // extern "C"
