#include "resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>
#include <gsl/gsl_integration.h>

#include "parallel.hpp"

namespace glf {

SpatialRates nu_pm(cplx lambda, double c0) {
    const cplx d = std::sqrt(cplx(1.0 - c0) + lambda);
    return {-1.0 + d, -1.0 - d};
}

SpatialRates nu_pm(cplx lambda) { return nu_pm(lambda, 0.0); }

cplx kernel_G_odd(cplx gamma, double x, double y) {
    require(x >= 0.0 && y >= 0.0, ErrorCode::InvalidArgument, "odd kernel lives on the half-line");
    if (gamma == cplx{}) fail(ErrorCode::GammaAtOrigin, "odd kernel is singular at gamma = 0");
    return (std::exp(-gamma * std::abs(x - y)) - std::exp(-gamma * (x + y))) / (2.0 * gamma);
}

cplx kernel_G_minus(cplx lambda, double x, double c0) {
    const cplx d = std::sqrt(cplx(1.0 - c0) + lambda);
    if (std::abs(d) < 1e-14) fail(ErrorCode::BranchPoint, "lambda sits on the branch point");
    const cplx pref = -1.0 / (2.0 * d);
    return pref * std::exp((x >= 0.0 ? -1.0 - d : -1.0 + d) * x);
}

std::vector<cplx> convolve_G_minus(cplx lambda, const Grid& g, std::span<const cplx> f, double c0) {
    require(f.size() == g.n, ErrorCode::GridMismatch, "field length differs from grid size");
    const cplx d = std::sqrt(cplx(1.0 - c0) + lambda);
    if (std::abs(d) < 1e-14) fail(ErrorCode::BranchPoint, "lambda sits on the branch point");
    const SpatialRates nu = nu_pm(lambda, c0);
    const cplx pref = -1.0 / (2.0 * d);
    const std::size_t n = g.n;
    const auto w = trapezoid_weights(g);
    const cplx em = std::exp(nu.nu_minus * g.h());
    const cplx ep = std::exp(-nu.nu_plus * g.h());
    std::vector<cplx> a(n), out(n);
    cplx acc{};
    for (std::size_t i = 0; i < n; ++i) {
        acc = acc * em + w[i] * f[i];
        a[i] = acc;
    }
    acc = {};
    for (std::size_t i = n; i-- > 0;) {
        out[i] = pref * (a[i] + acc);
        acc = (acc + w[i] * f[i]) * ep;
    }
    return out;
}

namespace {

cplx sinhc(cplx z) {
    if (std::abs(z) < 1e-3) {
        const cplx z2 = z * z;
        return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
    }
    return std::sinh(z) / z;
}

}  // namespace

std::vector<cplx> convolve_G_odd(cplx gamma, const Grid& g, std::span<const cplx> f) {
    require(f.size() == g.n, ErrorCode::GridMismatch, "field length differs from grid size");
    require(gamma.real() >= -1e-14, ErrorCode::InvalidArgument, "odd kernel needs Re gamma >= 0");
    const std::size_t n = g.n;
    const double h = g.h();
    std::vector<cplx> out(n, cplx{});
    std::size_t i0 = 0;
    while (i0 < n && g.x(i0) < 0.0) ++i0;
    if (i0 >= n) return out;
    std::vector<double> w(n, h);
    if (std::abs(g.x(i0)) < 1e-12 * h) w[i0] = 0.5 * h;
    w[n - 1] = 0.5 * h;

    if (std::abs(gamma) * g.x_max <= 20.0) {
        // -[e^{-g x} sum_{y<=x} w f S(y) + S(x) sum_{y>x} w f e^{-g y}],  S(y) = sinh(g y)/g
        auto S = [&](double y) { return y * sinhc(gamma * y); };
        std::vector<cplx> p(n);
        cplx acc{};
        for (std::size_t i = i0; i < n; ++i) {
            acc += w[i] * f[i] * S(g.x(i));
            p[i] = acc;
        }
        acc = {};
        for (std::size_t i = n; i-- > i0;) {
            const double x = g.x(i);
            out[i] = -(std::exp(-gamma * x) * p[i] + S(x) * acc);
            acc += w[i] * f[i] * std::exp(-gamma * x);
        }
        return out;
    }
    // -(1/(2g)) [sum w f e^{-g|x-y|} - e^{-g x} sum w f e^{-g y}]
    const cplx e = std::exp(-gamma * h);
    cplx total{};
    for (std::size_t i = i0; i < n; ++i) total += w[i] * f[i] * std::exp(-gamma * g.x(i));
    std::vector<cplx> a(n);
    cplx acc{};
    for (std::size_t i = i0; i < n; ++i) {
        acc = acc * e + w[i] * f[i];
        a[i] = acc;
    }
    acc = {};
    for (std::size_t i = n; i-- > i0;) {
        out[i] = -(a[i] + acc - std::exp(-gamma * g.x(i)) * total) / (2.0 * gamma);
        acc = (acc + w[i] * f[i]) * e;
    }
    return out;
}

PartitionOfUnity PartitionOfUnity::on(const Grid& g) {
    PartitionOfUnity p;
    p.chi_minus.resize(g.n);
    p.chi_c.resize(g.n);
    p.chi_plus.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        p.chi_plus[i] = smoothstep(x - 2.0);
        p.chi_minus[i] = smoothstep(-x - 2.0);
        p.chi_c[i] = 1.0 - p.chi_plus[i] - p.chi_minus[i];
    }
    return p;
}

ExtendedField ExtendedField::operator-(const ExtendedField& other) const {
    ExtendedField out{field - other.field, left, right};
    for (const auto& t : other.left) out.left.push_back({-t.amp, t.rate});
    for (const auto& t : other.right) out.right.push_back({-t.amp, t.rate});
    return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TailIntegrand {
    const std::vector<TailTerm>* terms;
    const WeightSpec* weight;
    double x0;
    double dir;  // +1 to the right, -1 to the left
    bool derivative;

    double operator()(double s) const {
        cplx v{};
        for (const auto& t : *terms) v += (derivative ? t.rate : cplx(1.0)) * t.amp * std::exp(-t.rate * s);
        return std::abs(v) * std::exp(eval_log_weight(*weight, x0 + dir * s).m);
    }
};

bool active(const std::vector<TailTerm>& terms) {
    for (const auto& t : terms)
        if (t.amp != cplx{}) return true;
    return false;
}

double min_rate(const std::vector<TailTerm>& terms) {
    double r = kInf;
    for (const auto& t : terms)
        if (t.amp != cplx{}) r = std::min(r, t.rate.real());
    return r;
}

double tail_norm(const std::vector<TailTerm>& terms, const WeightSpec& w, double x0, double dir, bool l1,
                 bool derivative) {
    if (!active(terms)) return 0.0;
    const double rate = min_rate(terms);
    const double far = x0 + dir * 1e4;
    const double growth = dir * eval_log_weight(w, far).dm;
    TailIntegrand fn{&terms, &w, x0, dir, derivative};
    if (l1) {
        if (rate <= growth + 1e-14) return kInf;
        // s = e^t - 1 keeps slowly decaying tails resolvable
        const double s_end = 60.0 / (rate - growth);
        auto stretched = [](double t, void* p) {
            const double s = std::expm1(t);
            return (*static_cast<const TailIntegrand*>(p))(s) * (1.0 + s);
        };
        quiet_gsl();
        gsl_integration_workspace* ws = gsl_integration_workspace_alloc(4000);
        gsl_function F{stretched, &fn};
        double result = 0.0, err = 0.0;
        const int status =
            gsl_integration_qag(&F, 0.0, std::log1p(s_end), 0.0, 1e-10, 4000, GSL_INTEG_GAUSS61, ws, &result, &err);
        gsl_integration_workspace_free(ws);
        if (status != 0 && err > 1e-6 * std::abs(result))
            fail(ErrorCode::QuadratureDivergence, fmt::format("tail integral did not converge (status {})", status));
        return result;
    }
    if (rate < growth - 1e-14) return kInf;
    const double s_end = rate > 1e-12 ? std::min(1e9, 60.0 / rate) : 1e9;
    double best = fn(0.0);
    for (double s = 1e-3; s <= s_end; s *= 1.02) best = std::max(best, fn(s));
    return best;
}

}  // namespace

double whole_line_norm(const ExtendedField& u, const WeightSpec& w, NormKind k) {
    const Grid& g = u.field.grid;
    const bool l1 = (k == NormKind::L1 || k == NormKind::W11);
    const bool w1 = (k == NormKind::W11 || k == NormKind::W1inf);
    const auto wv = weight_values(w, g);
    const NormKind base = l1 ? NormKind::L1 : NormKind::Linf;
    auto combine = [&](double grid_part, double lt, double rt) {
        return l1 ? grid_part + lt + rt : std::max({grid_part, lt, rt});
    };
    double total = combine(weighted_norm(u.field.values, g, wv, base),
                           tail_norm(u.left, w, g.x_min, -1.0, l1, false),
                           tail_norm(u.right, w, g.x_max, 1.0, l1, false));
    if (w1) {
        const auto du = differentiate(std::span<const cplx>(u.field.values), g.h(), 1);
        total += combine(weighted_norm(du, g, wv, base), tail_norm(u.left, w, g.x_min, -1.0, l1, true),
                         tail_norm(u.right, w, g.x_max, 1.0, l1, true));
    }
    return total;
}

ResolventContext ResolventContext::make(ResolventKind kind, const FrontProfile& front) {
    ResolventContext ctx;
    ctx.kind = kind;
    ctx.front = front;
    ctx.op = assemble_operator(kind == ResolventKind::Lp ? OperatorKind::Lp : OperatorKind::Lpsi, front, front.grid,
                               BoundaryClosure::dirichlet());
    ctx.pou = PartitionOfUnity::on(front.grid);
    return ctx;
}

namespace {

// (L - lambda) u at interior rows, zero on the boundary rows.
std::vector<cplx> apply_shifted(const DiscreteOperator& op, cplx lambda, std::span<const cplx> u) {
    auto r = op.apply(u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= lambda * u[i];
    r.front() = 0.0;
    r.back() = 0.0;
    return r;
}

}  // namespace

Decomposition farfield_core_solve(const ResolventContext& ctx, cplx gamma, const Field& f) {
    const Grid& g = ctx.op.grid;
    require_same_grid(f.grid, g);
    require(gamma.real() >= -1e-14, ErrorCode::InvalidArgument, "far-field/core solve needs Re gamma >= 0");
    const std::size_t n = g.n;
    const bool psi = ctx.kind == ResolventKind::Lpsi;
    const cplx lambda = gamma * gamma;
    const SpatialRates nu = nu_pm(lambda, ctx.c0());

    std::vector<cplx> fm(n), fp(n);
    for (std::size_t i = 0; i < n; ++i) {
        fm[i] = ctx.pou.chi_minus[i] * f[i];
        fp[i] = ctx.pou.chi_plus[i] * f[i];
    }
    Decomposition d;
    d.gamma = gamma;
    d.lambda = lambda;
    d.left_rate = nu.nu_plus;
    d.right_minus_rate = -nu.nu_minus;
    d.psi_minus = Field(g, convolve_G_minus(lambda, g, fm, ctx.c0()));
    d.psi_plus = Field(g, convolve_G_odd(gamma, g, fp));

    std::vector<cplx> far(n), bm(n, cplx{}), bp(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x(i);
        const double cm = psi ? ctx.pou.chi_minus[i] : 1.0;
        far[i] = cm * d.psi_minus[i] + ctx.pou.chi_plus[i] * d.psi_plus[i];
        if (psi && ctx.pou.chi_minus[i] != 0.0) bm[i] = ctx.pou.chi_minus[i] * std::exp(nu.nu_plus * x);
        bp[i] = ctx.pou.chi_plus[i] != 0.0 ? ctx.pou.chi_plus[i] * std::exp(-gamma * x) : cplx{};
    }
    auto rhs = apply_shifted(ctx.op, lambda, far);
    for (std::size_t i = 1; i + 1 < n; ++i) rhs[i] = f[i] - rhs[i];
    auto cm = apply_shifted(ctx.op, lambda, bm);
    auto cp = apply_shifted(ctx.op, lambda, bp);

    ShiftedSolver a(ctx.op, -lambda, 1.0);
    a.solve_in_place(rhs);
    a.solve_in_place(cp);
    if (psi) {
        a.solve_in_place(cm);
        // rows scaled separately: both entries can sit near the underflow threshold at large |gamma|
        const double s0 = std::max(std::abs(cm[1]), std::abs(cp[1]));
        const double s1 = std::max(std::abs(cm[n - 2]), std::abs(cp[n - 2]));
        if (!(s0 > 0.0 && s1 > 0.0))
            fail(ErrorCode::BorderedSingular, fmt::format("border system singular at gamma = {}+{}i", gamma.real(), gamma.imag()));
        const cplx m00 = cm[1] / s0, m01 = cp[1] / s0, m10 = cm[n - 2] / s1, m11 = cp[n - 2] / s1;
        const cplx r0 = rhs[1] / s0, r1 = rhs[n - 2] / s1;
        const cplx det = m00 * m11 - m01 * m10;
        const double scale = std::max(std::abs(m00 * m11), std::abs(m01 * m10));
        if (!(std::abs(det) > 1e-13 * scale))
            fail(ErrorCode::BorderedSingular, fmt::format("border system singular at gamma = {}+{}i", gamma.real(), gamma.imag()));
        d.beta_minus = (r0 * m11 - m01 * r1) / det;
        d.beta_plus = (m00 * r1 - m10 * r0) / det;
    } else {
        if (!(std::abs(cp[n - 2]) > 1e-300))
            fail(ErrorCode::BorderedSingular, "border system singular");
        d.beta_plus = rhs[n - 2] / cp[n - 2];
    }

    d.core_v = Field(g);
    d.solution = Field(g);
    d.left_part = Field(g);
    d.right_part = Field(g);
    for (std::size_t i = 0; i < n; ++i) {
        d.core_v[i] = rhs[i] - d.beta_plus * cp[i] - (psi ? d.beta_minus * cm[i] : cplx{});
        const cplx border_m = psi ? d.beta_minus * bm[i] : cplx{};
        d.solution[i] = far[i] + d.core_v[i] + border_m + d.beta_plus * bp[i];
        d.left_part[i] = psi ? ctx.pou.chi_minus[i] * d.psi_minus[i] + border_m : d.psi_minus[i];
        d.right_part[i] = ctx.pou.chi_plus[i] * d.psi_plus[i] + d.core_v[i] + d.beta_plus * bp[i];
    }

    auto res = apply_shifted(ctx.op, lambda, d.solution.values);
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) worst = std::max(worst, std::abs(res[i] - f[i]));
    d.residual = worst / std::max(f.max_abs(), 1e-300);
    return d;
}

ExtendedField Decomposition::extended(Component c) const {
    const std::size_t n = solution.size();
    switch (c) {
        case Component::Whole: return {solution, {{solution[0], left_rate}}, {{solution[n - 1], gamma}}};
        case Component::Left: return {left_part, {{left_part[0], left_rate}}, {{left_part[n - 1], right_minus_rate}}};
        case Component::Right: return {right_part, {{right_part[0], left_rate}}, {{right_part[n - 1], gamma}}};
    }
    return {};
}

Field direct_resolvent_solve(const ResolventContext& ctx, cplx gamma, const Field& f) {
    const cplx lambda = gamma * gamma;
    const SpatialRates nu = nu_pm(lambda, ctx.c0());
    const BoundaryClosure bc{BoundarySide::robin(nu.nu_plus), BoundarySide::robin(-gamma)};
    auto op = assemble_from_coefficients(ctx.op.kind, ctx.op.grid, ctx.op.adv, ctx.op.pot, bc);
    ShiftedSolver s(op, -lambda, 1.0);
    return Field(f.grid, s.solve(f.values));
}

cplx RaySpec::gamma_at(double s) const {
    if (kind == RayKind::RightCone) {
        require(std::abs(std::tan(angle)) <= 2.0 + 1e-12 && std::cos(angle) > 0.0, ErrorCode::InvalidArgument,
                "cone ray must satisfy Re gamma >= |Im gamma| / 2");
        return std::polar(s, angle);
    }
    const cplx lambda(c * s * s, s);
    return std::sqrt(lambda);
}

std::vector<ProbePoint> resolvent_norm_probe(const ResolventContext& ctx, const Field& f, const ProbeSpec& spec) {
    std::optional<ExtendedField> ref;
    if (spec.mode == ProbeMode::DifferenceFromLimit)
        ref = farfield_core_solve(ctx, cplx(spec.gamma_ref, 0.0), f).extended(spec.component);
    std::vector<ProbePoint> out(spec.samples.size());
    parallel_for(spec.samples.size(), spec.jobs, [&](std::size_t k) {
        const cplx gamma = spec.ray.gamma_at(spec.samples[k]);
        auto ext = farfield_core_solve(ctx, gamma, f).extended(spec.component);
        if (ref) ext = ext - *ref;
        out[k] = {std::abs(gamma), gamma, whole_line_norm(ext, spec.weight, spec.norm)};
    });
    return out;
}

}  // namespace glf
