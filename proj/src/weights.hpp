#pragma once

#include <span>
#include <string>
#include <vector>

#include "discretization.hpp"

namespace glf {

enum class WeightKind { ExpOmega, ExpGeneral, Alg, Product };

/// Weight w = exp(m). Exact closed forms for |x| >= 1, C2 blend on (-1, 1).
struct WeightSpec {
    WeightKind kind = WeightKind::Product;
    double minus = 0.0;  // eta- or r-
    double plus = 0.0;   // eta+ or r+
    std::vector<WeightSpec> factors;

    static WeightSpec unit() { return {}; }
    static WeightSpec omega() { return {WeightKind::ExpOmega, 0.0, 1.0, {}}; }
    static WeightSpec exp_general(double eta_minus, double eta_plus) {
        return {WeightKind::ExpGeneral, eta_minus, eta_plus, {}};
    }
    static WeightSpec alg(double r_minus, double r_plus) { return {WeightKind::Alg, r_minus, r_plus, {}}; }
    static WeightSpec product(std::vector<WeightSpec> fs) { return {WeightKind::Product, 0.0, 0.0, std::move(fs)}; }

    std::string describe() const;
};

/// Log-weight m and its derivatives.
struct LogWeight {
    double m = 0.0;
    double dm = 0.0;
    double d2m = 0.0;
};

/// Weight value and analytic derivatives.
struct WeightValue {
    double w = 1.0;
    double dw = 0.0;
    double d2w = 0.0;
};

/// Quintic smoothstep S(u) = u^3 (10 - 15u + 6u^2) and derivatives, clamped outside [0,1].
double smoothstep(double u);
double smoothstep_d1(double u);
double smoothstep_d2(double u);

LogWeight eval_log_weight(const WeightSpec& spec, double x);
WeightValue eval_weight(const WeightSpec& spec, double x);

/// Weight samples on every node.
std::vector<double> weight_values(const WeightSpec& spec, const Grid& g);
std::vector<LogWeight> log_weight_values(const WeightSpec& spec, const Grid& g);

enum class NormKind { L1, Linf, W11, W1inf };

const char* norm_kind_name(NormKind k);

double weighted_norm(const Field& f, const WeightSpec& w, NormKind k);
double weighted_norm(std::span<const cplx> f, const Grid& g, const WeightSpec& w, NormKind k);
/// Variant with precomputed weight samples.
double weighted_norm(std::span<const cplx> f, const Grid& g, std::span<const double> wv, NormKind k);

}  // namespace glf
