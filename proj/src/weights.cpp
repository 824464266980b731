#include "weights.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace glf {

double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double smoothstep_d1(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double v = u * (1.0 - u);
    return 30.0 * v * v;
}

double smoothstep_d2(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
}

namespace {

// Blend s(x) = S((x+1)/2): 0 for x <= -1, 1 for x >= 1.
struct Blend {
    double s, ds, d2s;
};

Blend blend(double x) {
    const double u = 0.5 * (x + 1.0);
    return {smoothstep(u), 0.5 * smoothstep_d1(u), 0.25 * smoothstep_d2(u)};
}

LogWeight exp_log_weight(double lo, double hi, double x) {
    const Blend b = blend(x);
    const double d = hi - lo;
    const double k = lo + d * b.s;
    const double dk = d * b.ds;
    const double d2k = d * b.d2s;
    return {x * k, k + x * dk, 2.0 * dk + x * d2k};
}

LogWeight alg_log_weight(double lo, double hi, double x) {
    const Blend b = blend(x);
    const double d = hi - lo;
    const double r = lo + d * b.s;
    const double dr = d * b.ds;
    const double d2r = d * b.d2s;
    const double q = 1.0 + x * x;
    const double l = std::log(q);
    const double dl = 2.0 * x / q;
    const double d2l = 2.0 * (1.0 - x * x) / (q * q);
    return {0.5 * r * l, 0.5 * (dr * l + r * dl), 0.5 * d2r * l + dr * dl + 0.5 * r * d2l};
}

}  // namespace

LogWeight eval_log_weight(const WeightSpec& spec, double x) {
    switch (spec.kind) {
        case WeightKind::ExpOmega: return exp_log_weight(0.0, 1.0, x);
        case WeightKind::ExpGeneral: return exp_log_weight(spec.minus, spec.plus, x);
        case WeightKind::Alg: return alg_log_weight(spec.minus, spec.plus, x);
        case WeightKind::Product: {
            LogWeight acc;
            for (const auto& f : spec.factors) {
                const LogWeight lw = eval_log_weight(f, x);
                acc.m += lw.m;
                acc.dm += lw.dm;
                acc.d2m += lw.d2m;
            }
            return acc;
        }
    }
    return {};
}

WeightValue eval_weight(const WeightSpec& spec, double x) {
    const LogWeight lw = eval_log_weight(spec, x);
    const double w = std::exp(lw.m);
    return {w, lw.dm * w, (lw.d2m + lw.dm * lw.dm) * w};
}

std::vector<double> weight_values(const WeightSpec& spec, const Grid& g) {
    std::vector<double> out(g.n);
    for (std::size_t i = 0; i < g.n; ++i) out[i] = std::exp(eval_log_weight(spec, g.x(i)).m);
    return out;
}

std::vector<LogWeight> log_weight_values(const WeightSpec& spec, const Grid& g) {
    std::vector<LogWeight> out(g.n);
    for (std::size_t i = 0; i < g.n; ++i) out[i] = eval_log_weight(spec, g.x(i));
    return out;
}

std::string WeightSpec::describe() const {
    switch (kind) {
        case WeightKind::ExpOmega: return "omega";
        case WeightKind::ExpGeneral: return fmt::format("exp({},{})", minus, plus);
        case WeightKind::Alg: return fmt::format("alg({},{})", minus, plus);
        case WeightKind::Product: {
            if (factors.empty()) return "unit";
            std::string s;
            for (std::size_t i = 0; i < factors.size(); ++i) {
                if (i) s += "*";
                s += factors[i].describe();
            }
            return s;
        }
    }
    return "?";
}

const char* norm_kind_name(NormKind k) {
    switch (k) {
        case NormKind::L1: return "L1";
        case NormKind::Linf: return "Linf";
        case NormKind::W11: return "W11";
        case NormKind::W1inf: return "W1inf";
    }
    return "?";
}

namespace {

double base_norm(std::span<const double> a, const Grid& g, bool l1) {
    if (!l1) return a.empty() ? 0.0 : *std::max_element(a.begin(), a.end());
    const double h = g.h();
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i];
    s -= 0.5 * (a.front() + a.back());
    return s * h;
}

}  // namespace

double weighted_norm(std::span<const cplx> f, const Grid& g, std::span<const double> wv, NormKind k) {
    require(f.size() == g.n && wv.size() == g.n, ErrorCode::GridMismatch, "field and weight grids differ");
    const bool l1 = (k == NormKind::L1 || k == NormKind::W11);
    std::vector<double> a(g.n);
    for (std::size_t i = 0; i < g.n; ++i) a[i] = wv[i] * std::abs(f[i]);
    double total = base_norm(a, g, l1);
    if (k == NormKind::W11 || k == NormKind::W1inf) {
        const auto df = differentiate(f, g.h(), 1);
        for (std::size_t i = 0; i < g.n; ++i) a[i] = wv[i] * std::abs(df[i]);
        total += base_norm(a, g, l1);
    }
    return total;
}

double weighted_norm(std::span<const cplx> f, const Grid& g, const WeightSpec& w, NormKind k) {
    require(f.size() == g.n, ErrorCode::GridMismatch, "field length differs from grid size");
    const auto wv = weight_values(w, g);
    return weighted_norm(f, g, wv, k);
}

double weighted_norm(const Field& f, const WeightSpec& w, NormKind k) {
    return weighted_norm(f.values, f.grid, w, k);
}

}  // namespace glf
