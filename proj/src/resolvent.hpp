#pragma once

#include <vector>

#include "discretization.hpp"
#include "front.hpp"
#include "operators.hpp"
#include "weights.hpp"

namespace glf {

struct SpatialRates {
    cplx nu_plus;
    cplx nu_minus;
};

/// Roots of nu^2 + 2 nu - lambda, principal branch.
SpatialRates nu_pm(cplx lambda);
/// Roots of nu^2 + 2 nu + c0 - lambda.
SpatialRates nu_pm(cplx lambda, double c0);

/// Odd (Dirichlet half-line) kernel (e^{-g|x-y|} - e^{-g|x+y|}) / (2g).
cplx kernel_G_odd(cplx gamma, double x, double y);
/// Whole-line kernel of (dxx + 2dx + c0 - lambda)^{-1}.
cplx kernel_G_minus(cplx lambda, double x, double c0 = 0.0);

/// (dxx + 2dx + c0 - lambda)^{-1} f by trapezoid quadrature, O(n) recurrences.
std::vector<cplx> convolve_G_minus(cplx lambda, const Grid& g, std::span<const cplx> f, double c0 = 0.0);
/// -(int G_odd(x, y) f(y) dy) over y >= 0, evaluated at x >= 0 (zero for x <= 0).
std::vector<cplx> convolve_G_odd(cplx gamma, const Grid& g, std::span<const cplx> f);

struct PartitionOfUnity {
    std::vector<double> chi_minus;
    std::vector<double> chi_c;
    std::vector<double> chi_plus;

    static PartitionOfUnity on(const Grid& g);
};

/// Exponential continuation beyond the grid.
/// Right: sum amp e^{-rate (x - x_max)}; left: sum amp e^{rate (x - x_min)}.
struct TailTerm {
    cplx amp;
    cplx rate;
};

struct ExtendedField {
    Field field;
    std::vector<TailTerm> left;
    std::vector<TailTerm> right;

    ExtendedField operator-(const ExtendedField& other) const;
};

/// Whole-line norm: grid part plus analytic tails. Infinite when a tail is not integrable.
double whole_line_norm(const ExtendedField& u, const WeightSpec& w, NormKind k);

enum class ResolventKind { Lp, Lpsi };

/// Shared state for resolvent solves of one operator on one grid.
struct ResolventContext {
    ResolventKind kind = ResolventKind::Lpsi;
    FrontProfile front;
    DiscreteOperator op;  // Dirichlet closure
    PartitionOfUnity pou;

    static ResolventContext make(ResolventKind kind, const FrontProfile& front);
    double c0() const { return kind == ResolventKind::Lp ? -2.0 : 0.0; }
};

enum class Component { Whole, Left, Right };

struct Decomposition {
    cplx gamma;
    cplx lambda;
    cplx left_rate;           // far-left spatial rate of the solution
    cplx right_minus_rate;    // decay rate of the left far field to the right
    Field psi_minus;          // left far-field solution (uncut)
    Field psi_plus;           // right far-field solution (uncut, zero for x <= 0)
    Field core_v;
    cplx beta_minus{};        // zero for Lp
    cplx beta_plus{};
    Field left_part;          // chi_- psi^- + beta_- chi_- e^{nu^+ x}  (p^- for Lp)
    Field right_part;         // chi_+ psi^+ + v + beta_+ chi_+ e^{-gamma x}
    Field solution;           // reassembled u
    double residual = 0.0;    // max interior |(L - lambda) u - f| / max |f|

    ExtendedField extended(Component c) const;
};

Decomposition farfield_core_solve(const ResolventContext& ctx, cplx gamma, const Field& f);

/// Direct solve of (L - gamma^2) u = f with Robin closures at the analytic rates.
Field direct_resolvent_solve(const ResolventContext& ctx, cplx gamma, const Field& f);

enum class RayKind { RightCone, ParabolaRight };
enum class ProbeMode { Raw, DifferenceFromLimit };

struct RaySpec {
    RayKind kind = RayKind::RightCone;
    double angle = 0.0;  // RightCone: gamma = s e^{i angle}
    double c = 0.25;     // ParabolaRight: lambda = i s + c s^2
    cplx gamma_at(double s) const;
};

struct ProbeSpec {
    RaySpec ray;
    std::vector<double> samples;
    WeightSpec weight = WeightSpec::unit();
    NormKind norm = NormKind::L1;
    ProbeMode mode = ProbeMode::Raw;
    Component component = Component::Whole;
    double gamma_ref = 1e-4;
    unsigned jobs = 1;
};

struct ProbePoint {
    double abs_gamma;
    cplx gamma;
    double value;
};

std::vector<ProbePoint> resolvent_norm_probe(const ResolventContext& ctx, const Field& f, const ProbeSpec& spec);

}  // namespace glf
