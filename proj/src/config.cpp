#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <type_traits>

#include <fmt/format.h>

#include "errors.hpp"

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

extern char** environ;

namespace glf {

namespace {

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
    fail(ErrorCode::ConfigInvalid, fmt::format("{}: {}", key, why));
}

const char* contour_kind_name(ContourKind k) {
    return k == ContourKind::LeftParabolaRays ? "left_parabola_rays" : "right_arc_rays";
}

double node_double(const toml::node& v, const std::string& key) {
    if (auto d = v.value<double>()) return *d;
    invalid(key, "expected a number");
}

std::int64_t node_int(const toml::node& v, const std::string& key) {
    if (v.is_integer()) return *v.value<std::int64_t>();
    if (v.is_floating_point()) {
        const double d = *v.value<double>();
        if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    invalid(key, "expected an integer");
}

template <class T>
void assign(T& field, const toml::node& v, const std::string& key) {
    if constexpr (std::is_same_v<T, double>) {
        field = node_double(v, key);
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) invalid(key, "expected true or false");
        field = *v.value<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) invalid(key, "expected a string");
        field = *v.value<std::string>();
    } else if constexpr (std::is_same_v<T, int>) {
        field = static_cast<int>(node_int(v, key));
    } else if constexpr (std::is_integral_v<T>) {
        const auto i = node_int(v, key);
        if (i < 0) invalid(key, "must be non-negative");
        field = static_cast<T>(i);
    } else if constexpr (std::is_same_v<T, Interval>) {
        const auto* a = v.as_array();
        if (!a || a->size() != 2) invalid(key, "expected [lo, hi]");
        field = {node_double(*a->get(0), key), node_double(*a->get(1), key)};
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        const auto* a = v.as_array();
        if (!a) invalid(key, "expected an array of numbers");
        field.clear();
        for (const auto& e : *a) field.push_back(node_double(e, key));
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        const auto* a = v.as_array();
        if (!a) invalid(key, "expected an array of strings");
        field.clear();
        for (const auto& e : *a) {
            if (!e.is_string()) invalid(key, "expected an array of strings");
            field.push_back(*e.value<std::string>());
        }
    } else if constexpr (std::is_same_v<T, ContourKind>) {
        const auto s = v.value<std::string>();
        if (s == "left_parabola_rays") field = ContourKind::LeftParabolaRays;
        else if (s == "right_arc_rays") field = ContourKind::RightArcRays;
        else invalid(key, "expected \"left_parabola_rays\" or \"right_arc_rays\"");
    } else {
        static_assert(sizeof(T) == 0, "unsupported config field type");
    }
}

std::string fmt_double(double d) {
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    auto s = fmt::format("{}", d);
    if (s.find_first_of(".en") == std::string::npos) s += ".0";
    return s;
}

std::string fmt_string(const std::string& s) {
    std::ostringstream os;
    os << toml::value<std::string>(s);
    return os.str();
}

template <class T>
std::string render(const T& field) {
    if constexpr (std::is_same_v<T, double>) {
        return fmt_double(field);
    } else if constexpr (std::is_same_v<T, bool>) {
        return field ? "true" : "false";
    } else if constexpr (std::is_same_v<T, std::string>) {
        return fmt_string(field);
    } else if constexpr (std::is_integral_v<T>) {
        return fmt::format("{}", field);
    } else if constexpr (std::is_same_v<T, Interval>) {
        return fmt::format("[{}, {}]", fmt_double(field.lo), fmt_double(field.hi));
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        std::string s = "[";
        for (std::size_t i = 0; i < field.size(); ++i) s += (i ? ", " : "") + fmt_double(field[i]);
        return s + "]";
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        std::string s = "[";
        for (std::size_t i = 0; i < field.size(); ++i) s += (i ? ", " : "") + fmt_string(field[i]);
        return s + "]";
    } else if constexpr (std::is_same_v<T, ContourKind>) {
        return fmt_string(contour_kind_name(field));
    }
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

toml::table parse_toml(const std::string& text, const std::string& origin) {
    try {
        return toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        const auto& src = e.source();
        fail(ErrorCode::ConfigInvalid,
             fmt::format("{}:{}:{}: {}", origin, src.begin.line, src.begin.column, e.description()));
    }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"front",       "spectrum",           "resolvent-probe",
                                                "linear-decay", "nonlinear-theorem1", "verify-all"};
    return names;
}

ExperimentConfig parse_config(const std::string& text) {
    const auto tbl = parse_toml(text, "config");
    ExperimentConfig cfg;
    std::set<std::string> sections, seen;
    visit_config(cfg, [&](const char* sec, const char*, auto&) { sections.insert(sec); });
    for (const auto& [name, node] : tbl) {
        const std::string sec(name.str());
        if (!sections.count(sec)) invalid(sec, "unknown section");
        if (!node.is_table()) invalid(sec, "expected a [section] table");
    }
    visit_config(cfg, [&](const char* sec, const char* key, auto& field) {
        const auto* t = tbl[sec].as_table();
        if (!t) return;
        const std::string dotted = fmt::format("{}.{}", sec, key);
        if (const auto* v = t->get(key)) {
            assign(field, *v, dotted);
            seen.insert(dotted);
        }
    });
    for (const auto& [name, node] : tbl)
        for (const auto& [key, v] : *node.as_table()) {
            const auto dotted = fmt::format("{}.{}", name.str(), key.str());
            if (!seen.count(dotted)) invalid(dotted, "unknown key");
        }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, fmt::format("cannot read config '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void set_config_value(ExperimentConfig& cfg, const std::string& dotted_key, const std::string& value) {
    bool found = false;
    visit_config(cfg, [&](const char* sec, const char* key, auto& field) {
        if (found || dotted_key != fmt::format("{}.{}", sec, key)) return;
        found = true;
        using T = std::decay_t<decltype(field)>;
        // bare strings are accepted for string-valued keys
        std::string text = value;
        if constexpr (std::is_same_v<T, std::string> || std::is_same_v<T, ContourKind>) {
            if (value.empty() || (value.front() != '"' && value.front() != '\'')) text = fmt_string(value);
        }
        const auto tbl = parse_toml("v = " + text, dotted_key);
        assign(field, *tbl.get("v"), dotted_key);
    });
    if (!found) invalid(dotted_key, "unknown key");
    validate_config(cfg);
}

std::string get_config_value(const ExperimentConfig& cfg, const std::string& dotted_key) {
    std::optional<std::string> out;
    visit_config(cfg, [&](const char* sec, const char* key, const auto& field) {
        if (!out && dotted_key == fmt::format("{}.{}", sec, key)) out = render(field);
    });
    if (!out) invalid(dotted_key, "unknown key");
    return *out;
}

std::map<std::string, std::string> glf_environment() {
    std::map<std::string, std::string> out;
    for (char** e = environ; e && *e; ++e) {
        const std::string kv(*e);
        if (kv.rfind("GLF_", 0) != 0) continue;
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return out;
}

void apply_env_overrides(ExperimentConfig& cfg, const std::map<std::string, std::string>& env) {
    std::map<std::string, std::string> names;
    visit_config(cfg, [&](const char* sec, const char* key, auto&) {
        names[upper(fmt::format("GLF_{}_{}", sec, key))] = fmt::format("{}.{}", sec, key);
    });
    for (const auto& [var, value] : env) {
        if (var.rfind("GLF_", 0) != 0) continue;
        const auto it = names.find(var);
        if (it == names.end()) invalid(var, "environment override names no config key");
        set_config_value(cfg, it->second, value);
    }
}

void validate_config(const ExperimentConfig& c) {
    auto check = [](bool ok, const char* key, const char* why) {
        if (!ok) invalid(key, why);
    };
    const auto& names = experiment_names();
    check(std::find(names.begin(), names.end(), c.run.experiment) != names.end(), "run.experiment",
          "unknown experiment");
    check(c.run.jobs >= 1, "run.jobs", "must be at least 1");
    check(!c.run.out.empty(), "run.out", "must not be empty");

    auto grid = [&](const char* sec, double lo, double hi, std::size_t n) {
        check(lo < hi, fmt::format("{}.x_min", sec).c_str(), "must be below x_max");
        check(n >= 3, fmt::format("{}.n", sec).c_str(), "need at least 3 nodes");
    };
    grid("front", c.front.x_min, c.front.x_max, c.front.n);
    grid("spectrum", c.spectrum.x_min, c.spectrum.x_max, c.spectrum.n);
    grid("resolvent", c.resolvent.x_min, c.resolvent.x_max, c.resolvent.n);
    grid("semigroup", c.semigroup.x_min, c.semigroup.x_max, c.semigroup.n);
    grid("decay", c.decay.x_min, c.decay.x_max, c.decay.n);
    grid("nonlinear", c.nonlinear.x_min, c.nonlinear.x_max, c.nonlinear.n);
    grid("crossmodel", c.crossmodel.x_min, c.crossmodel.x_max, c.crossmodel.n);

    check(c.front.tol > 0.0, "front.tol", "must be positive");
    check(c.spectrum.k_samples >= 2, "spectrum.k_samples", "need at least 2");
    check(c.spectrum.k_max > 0.0, "spectrum.k_max", "must be positive");
    check(c.resolvent.gamma_range.lo > 0.0 && c.resolvent.gamma_range.lo < c.resolvent.gamma_range.hi,
          "resolvent.gamma_range", "need 0 < lo < hi");
    check(c.resolvent.gamma_samples >= 3, "resolvent.gamma_samples", "need at least 3");
    check(c.resolvent.gamma_ref > 0.0, "resolvent.gamma_ref", "must be positive");
    check(c.resolvent.delta > 0.0, "resolvent.delta", "must be positive");
    check(c.resolvent.reassembly_cases >= 1, "resolvent.reassembly_cases", "need at least 1");
    try {
        c.contour.validate();
    } catch (const Error& e) {
        invalid("contour", e.what());
    }
    check(c.semigroup.dt > 0.0, "semigroup.dt", "must be positive");
    check(!c.semigroup.times.empty(), "semigroup.times", "need at least one time");
    for (double t : c.semigroup.times) check(t > 0.0, "semigroup.times", "times must be positive");
    check(c.decay.dt > 0.0 && c.decay.T > c.decay.dt, "decay.dt", "need 0 < dt < T");
    check(c.decay.window.lo > 0.0 && c.decay.window.lo < c.decay.window.hi, "decay.window", "need 0 < lo < hi");
    check(c.decay.left_extension >= 0.0, "decay.left_extension", "must be non-negative");
    for (const auto& q : c.decay_quantities) {
        try {
            decay_quantity_from_name(q);
        } catch (const Error&) {
            invalid("decay.quantities", fmt::format("unknown quantity '{}'", q));
        }
    }
    check(c.nonlinear.epsilon > 0.0, "nonlinear.epsilon", "must be positive");
    check(c.nonlinear.options.dt > 0.0 && c.nonlinear.T > c.nonlinear.options.dt, "nonlinear.dt", "need 0 < dt < T");
    check(c.nonlinear.window.lo > 0.0 && c.nonlinear.window.lo < c.nonlinear.window.hi, "nonlinear.window",
          "need 0 < lo < hi");
    check(c.nonlinear.left_extension >= 0.0, "nonlinear.left_extension", "must be non-negative");
    check(c.nonlinear.options.sponge_fraction >= 0.0 && c.nonlinear.options.sponge_fraction < 0.5,
          "nonlinear.sponge_fraction", "must lie in [0, 0.5)");
    check(c.nonlinear.options.sponge_strength >= 0.0, "nonlinear.sponge_strength", "must be non-negative");
    check(c.nonlinear.options.guard > 0.0 && c.nonlinear.options.guard < 1.0, "nonlinear.guard", "must lie in (0, 1)");
    check(c.nonlinear.options.max_jump > 0.0, "nonlinear.max_jump", "must be positive");
    check(c.nonlinear.options.dt_min > 0.0, "nonlinear.dt_min", "must be positive");
    check(c.nonlinear.options.checkpoint_ratio > 1.0, "nonlinear.checkpoint_ratio", "must exceed 1");
    check(c.crossmodel.epsilon > 0.0, "crossmodel.epsilon", "must be positive");
    check(c.crossmodel.dt > 0.0 && c.crossmodel.T > c.crossmodel.dt, "crossmodel.dt", "need 0 < dt < T");
    check(c.crossmodel.levels >= 1 && c.crossmodel.levels <= 4, "crossmodel.levels", "must lie in [1, 4]");
    check(c.properties.cases >= 1, "properties.cases", "need at least 1");
}

std::string to_toml(const ExperimentConfig& cfg) {
    std::string out;
    std::string section;
    visit_config(cfg, [&](const char* sec, const char* key, const auto& field) {
        if (section != sec) {
            if (!section.empty()) out += "\n";
            section = sec;
            out += fmt::format("[{}]\n", sec);
        }
        out += fmt::format("{} = {}\n", key, render(field));
    });
    return out;
}

}  // namespace glf
