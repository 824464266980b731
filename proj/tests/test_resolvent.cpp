#include "doctest.h"

#include <cmath>
#include <random>

#include "errors.hpp"
#include "ratefit.hpp"
#include "resolvent.hpp"

using namespace glf;

namespace {

const FrontProfile& front_100() {
    static const FrontProfile f = solve_critical_front(-100.0, 100.0, 4096, 1e-8);
    return f;
}

Field bump(const Grid& g, double center = 0.0) {
    return Field::sample(g, [center](double x) { return cplx(std::exp(-(x - center) * (x - center))); });
}

double rel_max_diff(std::span<const cplx> a, std::span<const cplx> b) {
    double d = 0.0, m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        m = std::max(m, std::abs(b[i]));
    }
    return d / m;
}

// Error of the G_minus convolution against a periodic ring solve of the limiting operator.
double ring_error(OperatorKind kind, double c0, cplx lambda, std::size_t n) {
    Grid g(-40.0, 40.0, n);
    auto op = assemble_limit_operator(kind, g, BoundaryClosure::periodic());
    auto f = bump(g);
    ShiftedSolver s(op, -lambda, 1.0);
    auto ring = s.solve(f.values);
    auto conv = convolve_G_minus(lambda, g, f.values, c0);
    return rel_max_diff(conv, ring);
}

double half_line_error(cplx gamma, std::size_t n) {
    Grid g(0.0, 60.0, n);
    auto op = assemble_from_coefficients(OperatorKind::LpsiPlus, g, std::vector<double>(n, 0.0),
                                         std::vector<double>(n, 0.0), BoundaryClosure::dirichlet());
    auto f = bump(g, 5.0);
    ShiftedSolver s(op, -gamma * gamma, 1.0);
    auto direct = s.solve(f.values);
    auto conv = convolve_G_odd(gamma, g, f.values);
    return rel_max_diff(conv, direct);
}

}  // namespace

TEST_CASE("spatial rates satisfy Vieta and the principal branch") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 1000; ++k) {
        const cplx lambda(u(rng), u(rng));
        for (double c0 : {0.0, -2.0}) {
            auto r = nu_pm(lambda, c0);
            CHECK(std::abs(r.nu_plus + r.nu_minus + 2.0) < 1e-12 * (1.0 + std::abs(lambda)));
            CHECK(std::abs(r.nu_plus * r.nu_minus - (c0 - lambda)) < 1e-11 * (1.0 + std::abs(lambda)));
            CHECK(r.nu_plus.real() >= r.nu_minus.real());
        }
    }
    auto r0 = nu_pm(cplx(0.0));
    CHECK(std::abs(r0.nu_plus) < 1e-15);
    CHECK(std::abs(r0.nu_minus + 2.0) < 1e-15);
    auto r3 = nu_pm(cplx(3.0));
    CHECK(std::abs(r3.nu_plus - 1.0) < 1e-14);
    CHECK(std::abs(r3.nu_minus + 3.0) < 1e-14);
}

TEST_CASE("odd kernel values") {
    CHECK(std::abs(kernel_G_odd(1.0, 0.0, 3.0)) == 0.0);
    CHECK(std::abs(kernel_G_odd(1.0, 2.0, 1.0) - (std::exp(-1.0) - std::exp(-3.0)) / 2.0) < 1e-15);
    const cplx g(0.3, 0.7);
    for (double x : {0.1, 1.0, 4.0})
        for (double y : {0.2, 2.5})
            CHECK(std::abs(kernel_G_odd(g, x, y) - kernel_G_odd(g, y, x)) < 1e-15);
    CHECK_THROWS_AS(kernel_G_odd(cplx(0.0), 1.0, 1.0), Error);
    try {
        kernel_G_odd(cplx(0.0), 1.0, 1.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GammaAtOrigin);
    }
}

TEST_CASE("odd kernel pointwise bound on a lattice") {
    // |G_odd| <= <y> e^{-Re(gamma)|x - y|} on Re gamma >= |Im gamma| / 2
    for (double th : {0.0, 0.3, 0.7, 1.1}) {
        for (double s : {1e-3, 0.1, 1.0, 5.0}) {
            const cplx g = std::polar(s, th);
            for (double x = 0.0; x <= 30.0; x += 0.75)
                for (double y = 0.0; y <= 30.0; y += 0.75) {
                    const double bound = std::sqrt(1.0 + y * y) * std::exp(-g.real() * std::abs(x - y));
                    CHECK(std::abs(kernel_G_odd(g, x, y)) <= bound * (1.0 + 1e-12));
                }
        }
    }
}

TEST_CASE("left kernel at lambda = 0 and the branch point") {
    // dxx + 2dx: G = -1/2 e^{-2x} for x >= 0, -1/2 for x < 0
    CHECK(std::abs(kernel_G_minus(0.0, 1.5) + 0.5 * std::exp(-3.0)) < 1e-15);
    CHECK(std::abs(kernel_G_minus(0.0, -4.0) + 0.5) < 1e-15);
    // c0 = -2: rates -1 -+ sqrt(3), prefactor -1/(2 sqrt 3)
    const double s3 = std::sqrt(3.0);
    CHECK(std::abs(kernel_G_minus(0.0, 1.0, -2.0) + std::exp(-1.0 - s3) / (2 * s3)) < 1e-15);
    CHECK(std::abs(kernel_G_minus(0.0, -1.0, -2.0) + std::exp(1.0 - s3) / (2 * s3)) < 1e-15);
    CHECK_THROWS_AS(kernel_G_minus(-1.0, 0.5), Error);
    CHECK_THROWS_AS(kernel_G_minus(-3.0, 0.5, -2.0), Error);
}

TEST_CASE("left convolution matches a ring solve at second order") {
    struct Case { OperatorKind kind; double c0; cplx lambda; };
    for (auto c : {Case{OperatorKind::LpsiMinus, 0.0, 2.0}, Case{OperatorKind::LpsiMinus, 0.0, cplx(1.0, 1.0)},
                   Case{OperatorKind::LpMinus, -2.0, cplx(0.5, -2.0)}}) {
        const double e1 = ring_error(c.kind, c.c0, c.lambda, 1601);
        const double e2 = ring_error(c.kind, c.c0, c.lambda, 3201);
        CHECK(e1 < 1e-2);
        CHECK(e1 / e2 > 3.5);
        CHECK(e1 / e2 < 4.5);
    }
}

TEST_CASE("odd convolution matches a Dirichlet half-line solve at second order") {
    for (cplx g : {cplx(1.0), cplx(0.5, 0.4), cplx(2.0, -1.0)}) {
        const double e1 = half_line_error(g, 1201);
        const double e2 = half_line_error(g, 2401);
        CHECK(e1 < 1e-2);
        CHECK(e1 / e2 > 3.5);
        CHECK(e1 / e2 < 4.5);
    }
}

TEST_CASE("partition of unity") {
    Grid g(-20.0, 20.0, 801);
    auto p = PartitionOfUnity::on(g);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        CHECK(std::abs(p.chi_minus[i] + p.chi_c[i] + p.chi_plus[i] - 1.0) < 1e-15);
        CHECK(p.chi_c[i] >= 0.0);
        if (x >= 3.0) CHECK(p.chi_plus[i] == 1.0);
        if (x <= 1.0) CHECK(p.chi_plus[i] == 0.0);
        if (x <= -3.0) CHECK(p.chi_minus[i] == 1.0);
        if (x >= -1.0) CHECK(p.chi_minus[i] == 0.0);
        if (std::abs(x) <= 1.0) CHECK(p.chi_c[i] == 1.0);
    }
}

TEST_CASE("far-field/core reassembly solves the resolvent equation") {
    const auto& fr = front_100();
    auto f = bump(fr.grid);
    for (auto kind : {ResolventKind::Lpsi, ResolventKind::Lp}) {
        auto ctx = ResolventContext::make(kind, fr);
        for (cplx g : {cplx(0.05), cplx(0.0), cplx(0.2, 0.1), cplx(2.0, 1.0)}) {
            auto d = farfield_core_solve(ctx, g, f);
            CHECK(d.residual < 1e-6);
            CHECK(std::isfinite(std::abs(d.beta_minus)));
            CHECK(std::isfinite(std::abs(d.beta_plus)));
            for (auto v : d.core_v.values) CHECK(std::isfinite(std::abs(v)));
            if (kind == ResolventKind::Lp) CHECK(d.beta_minus == cplx{});
        }
    }
}

TEST_CASE("far-field/core agrees with the direct banded solve") {
    const auto& fr = front_100();
    auto f = bump(fr.grid);
    for (auto kind : {ResolventKind::Lpsi, ResolventKind::Lp}) {
        auto ctx = ResolventContext::make(kind, fr);
        for (cplx g : {cplx(0.1), cplx(0.2, 0.1), cplx(1e-3)}) {
            auto d = farfield_core_solve(ctx, g, f);
            auto u = direct_resolvent_solve(ctx, g, f);
            CHECK(rel_max_diff(d.solution.values, u.values) < 1e-6);
        }
    }
}

TEST_CASE("resolvent solve is linear") {
    const auto& fr = front_100();
    auto ctx = ResolventContext::make(ResolventKind::Lpsi, fr);
    auto f1 = bump(fr.grid, -3.0);
    auto f2 = bump(fr.grid, 4.0);
    const cplx a(2.0, -1.0), g(0.3, 0.1);
    auto d1 = farfield_core_solve(ctx, g, f1);
    auto d2 = farfield_core_solve(ctx, g, f2);
    auto d12 = farfield_core_solve(ctx, g, a * f1 + f2);
    auto expect = a * d1.solution + d2.solution;
    CHECK(rel_max_diff(d12.solution.values, expect.values) < 1e-10);
    CHECK(std::abs(d12.beta_plus - (a * d1.beta_plus + d2.beta_plus)) < 1e-10 * std::abs(d12.beta_plus));
}

TEST_CASE("right coefficient is analytic in gamma") {
    const auto& fr = front_100();
    auto f = bump(fr.grid);
    for (auto kind : {ResolventKind::Lpsi, ResolventKind::Lp}) {
        auto ctx = ResolventContext::make(kind, fr);
        const cplx g0(0.1, 0.05);
        const double eps = 1e-4;
        auto beta = [&](cplx g) { return farfield_core_solve(ctx, g, f).beta_plus; };
        const cplx dx = (beta(g0 + eps) - beta(g0 - eps)) / (2 * eps);
        const cplx dy = (beta(g0 + cplx(0, eps)) - beta(g0 - cplx(0, eps))) / (2 * eps);
        const cplx dbar = 0.5 * (dx + cplx(0, 1) * dy);
        CHECK(std::abs(dbar) < 1e-4 * std::abs(dx));
    }
}

TEST_CASE("whole-line norms include the tails") {
    Grid g(-10.0, 10.0, 2001);
    ExtendedField u{Field::sample(g, [](double x) { return cplx(std::exp(-std::abs(x))); }), {}, {}};
    u.left.push_back({std::exp(-10.0), 1.0});
    u.right.push_back({std::exp(-10.0), 1.0});
    CHECK(std::abs(whole_line_norm(u, WeightSpec::unit(), NormKind::L1) - 2.0) < 1e-4);
    CHECK(std::abs(whole_line_norm(u, WeightSpec::unit(), NormKind::Linf) - 1.0) < 1e-12);
    u.right[0].rate = 0.0;
    CHECK(std::isinf(whole_line_norm(u, WeightSpec::unit(), NormKind::L1)));
}

namespace {

double probe_slope(ResolventKind kind, ProbeMode mode, Component c, NormKind nk, const WeightSpec& w) {
    const auto& fr = front_100();
    auto ctx = ResolventContext::make(kind, fr);
    ProbeSpec spec;
    spec.ray = {RayKind::RightCone, 0.0};
    for (int k = 0; k <= 12; ++k) spec.samples.push_back(1e-3 * std::pow(100.0, k / 12.0));
    spec.norm = nk;
    spec.component = c;
    spec.mode = mode;
    spec.weight = w;
    spec.jobs = 2;
    auto pts = resolvent_norm_probe(ctx, bump(fr.grid), spec);
    std::vector<double> t, v;
    for (const auto& p : pts) {
        t.push_back(p.abs_gamma);
        v.push_back(p.value);
    }
    return fit_power_law(t, v, {1e-3, 1e-1}).exponent;
}

}  // namespace

TEST_CASE("resolvent probe slopes") {
    CHECK(std::abs(probe_slope(ResolventKind::Lp, ProbeMode::Raw, Component::Whole, NormKind::L1, WeightSpec::unit()) +
                   1.0) <= 0.1);
    CHECK(std::abs(probe_slope(ResolventKind::Lp, ProbeMode::DifferenceFromLimit, Component::Whole, NormKind::W1inf,
                               WeightSpec::alg(0.0, -1.0)) -
                   1.0) <= 0.1);
    CHECK(std::abs(probe_slope(ResolventKind::Lpsi, ProbeMode::Raw, Component::Left, NormKind::Linf,
                               WeightSpec::unit())) <= 0.1);
}

TEST_CASE("probe rays") {
    RaySpec cone{RayKind::RightCone, 0.3};
    CHECK(std::abs(cone.gamma_at(2.0) - std::polar(2.0, 0.3)) < 1e-15);
    RaySpec para{RayKind::ParabolaRight, 0.0, 0.2};
    const cplx g = para.gamma_at(0.5);
    CHECK(std::abs(g * g - cplx(0.2 * 0.25, 0.5)) < 1e-14);
    const auto& fr = front_100();
    auto ctx = ResolventContext::make(ResolventKind::Lpsi, fr);
    ProbeSpec spec;
    spec.ray = {RayKind::RightCone, 1.5};
    spec.samples = {0.1};
    CHECK_THROWS_AS(resolvent_norm_probe(ctx, bump(fr.grid), spec), Error);
}
