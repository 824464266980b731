#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "errors.hpp"
#include "semigroup.hpp"

using namespace glf;

namespace {

const FrontProfile& front_100() {
    static const FrontProfile f = solve_critical_front(-100.0, 100.0, 4096, 1e-8);
    return f;
}

Field gaussian(const Grid& g) {
    return Field::sample(g, [](double x) { return cplx(std::exp(-x * x)); });
}

double rel_linf(const Field& a, const Field& b) {
    double d = 0.0, m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        m = std::max(m, std::abs(b[i]));
    }
    return d / m;
}

const Field& field_at(const Trajectory& tr, double t) {
    for (std::size_t i = 0; i < tr.times.size(); ++i)
        if (std::abs(tr.times[i] - t) < 1e-9) return tr.fields[i];
    FAIL("checkpoint missing");
    return tr.fields.front();
}

DiscreteOperator laplacian(const Grid& g) {
    return assemble_from_coefficients(OperatorKind::LpsiPlus, g, std::vector<double>(g.n, 0.0),
                                      std::vector<double>(g.n, 0.0), BoundaryClosure::dirichlet());
}

}  // namespace

TEST_CASE("Crank-Nicolson reproduces the heat kernel") {
    Grid g(-200.0, 200.0, 8192);
    const double c = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    auto u0 = Field::sample(g, [c](double x) { return cplx(c * std::exp(-x * x / 4.0)); });
    auto tr = evolve_linear(laplacian(g), u0, 0.01, 10.0, {{"sup", WeightSpec::unit(), NormKind::Linf, 0}});
    const auto& sup = tr.series("sup").values;
    REQUIRE(tr.times.size() > 10);
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const double exact = 1.0 / std::sqrt(4.0 * std::numbers::pi * (1.0 + tr.times[i]));
        CHECK(std::abs(sup[i] - exact) <= 0.01 * exact);
    }
    for (std::size_t i = 1; i < tr.times.size(); ++i) {
        CHECK(tr.times[i] > tr.times[i - 1]);
        CHECK(tr.times[i] <= 1.2 * tr.times[i - 1] + 2 * 0.01);
    }
}

TEST_CASE("left p limit decays at the dispersion floor") {
    Grid g(-50.0, 50.0, 2001);
    auto op = assemble_limit_operator(OperatorKind::LpMinus, g, BoundaryClosure::dirichlet());
    EvolveOptions opt;
    opt.extra_times = {2.5, 5.0};
    auto tr = evolve_linear(op, gaussian(g), 0.01, 5.0, {{"sup", WeightSpec::unit(), NormKind::Linf, 0}}, opt);
    const auto& s = tr.series("sup").values;
    double s25 = 0.0, s5 = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        if (std::abs(tr.times[i] - 2.5) < 1e-9) s25 = s[i];
        if (std::abs(tr.times[i] - 5.0) < 1e-9) s5 = s[i];
    }
    const double rate = std::log(s5 / s25) / 2.5;
    CHECK(rate <= -1.9);
}

TEST_CASE("zero data stays zero") {
    const auto& fr = front_100();
    for (auto kind : {OperatorKind::Lp, OperatorKind::Lpsi}) {
        auto op = assemble_operator(kind, fr, fr.grid, default_closure(kind));
        EvolveOptions opt;
        opt.store_fields = true;
        auto tr = evolve_linear(op, Field(fr.grid), 0.05, 2.0, {{"sup", WeightSpec::unit(), NormKind::Linf, 0}}, opt);
        for (double v : tr.series("sup").values) CHECK(v == 0.0);
        for (const auto& f : tr.fields) CHECK(f.max_abs() == 0.0);
    }
}

TEST_CASE("semigroup composition") {
    Grid g(-60.0, 60.0, 1201);
    auto fr = solve_critical_front(-60.0, 60.0, 1201, 1e-8);
    auto op = assemble_operator(OperatorKind::Lpsi, fr, g, default_closure(OperatorKind::Lpsi));
    const double dt = 0.02;
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> steps(1, 60);
    EvolveOptions keep;
    keep.store_fields = true;
    for (int k = 0; k < 10; ++k) {
        const double t1 = steps(rng) * dt, t2 = steps(rng) * dt;
        auto a = evolve_linear(op, gaussian(g), dt, t1, {}, keep);
        auto b = evolve_linear(op, a.fields.back(), dt, t2, {}, keep);
        auto c = evolve_linear(op, gaussian(g), dt, t1 + t2, {}, keep);
        CHECK(rel_linf(b.fields.back(), c.fields.back()) < 1e-10);
    }
}

TEST_CASE("Trajectory lookup of a missing norm") {
    Trajectory tr;
    CHECK_THROWS_AS(tr.series("nope"), Error);
}

TEST_CASE("contour validation") {
    ContourSpec s;
    CHECK_NOTHROW(s.validate());
    s.c = 0.25;
    CHECK_THROWS_AS(s.validate(), Error);
    s = {};
    s.n_nodes = 32;
    CHECK_THROWS_AS(s.validate(), Error);
    s = {};
    s.left_ray_angle = 0.7 * std::numbers::pi;
    CHECK_THROWS_AS(s.validate(), Error);
    s = {};
    s.ray_angle = 0.4 * std::numbers::pi;
    CHECK_THROWS_AS(s.validate(), Error);

    const auto& fr = front_100();
    auto ctx = ResolventContext::make(ResolventKind::Lpsi, fr);
    ContourSpec arc;
    arc.kind = ContourKind::RightArcRays;
    CHECK_THROWS_AS(contour_apply(ctx, arc, 1.0, gaussian(fr.grid), ContourSplit::WholeResolvent), Error);
}

TEST_CASE("contour nodes integrate the heat semigroup") {
    // exact heat resolvent applied to e^{-y^2} at x, then the inverse Laplace sum
    const double x = 0.7;
    Grid yg(-12.0, 12.0, 4801);
    const auto w = trapezoid_weights(yg);
    auto resolvent = [&](cplx lam) {
        const cplx g = std::sqrt(lam);
        cplx acc{};
        for (std::size_t j = 0; j < yg.n; ++j) {
            const double y = yg.x(j);
            acc += w[j] * (-std::exp(-g * std::abs(x - y)) / (2.0 * g)) * std::exp(-y * y);
        }
        return acc;
    };
    for (auto kind : {ContourKind::RightArcRays, ContourKind::LeftParabolaRays}) {
        for (double t : {1.0, 4.0}) {
            ContourSpec s;
            s.kind = kind;
            cplx sum{};
            for (const auto& nd : contour_nodes(s, t)) sum += nd.weight * std::exp(nd.lambda * t) * resolvent(nd.lambda);
            sum *= -1.0 / (2.0 * std::numbers::pi * cplx(0.0, 1.0));
            const double exact = std::exp(-x * x / (1.0 + 4.0 * t)) / std::sqrt(1.0 + 4.0 * t);
            CHECK(std::abs(sum - exact) <= 1e-3 * exact);
        }
    }
}

TEST_CASE("contour quadrature agrees with time stepping") {
    const auto& fr = front_100();
    const auto f = gaussian(fr.grid);
    for (auto rk : {ResolventKind::Lp, ResolventKind::Lpsi}) {
        const auto kind = rk == ResolventKind::Lp ? OperatorKind::Lp : OperatorKind::Lpsi;
        auto ctx = ResolventContext::make(rk, fr);
        auto op = assemble_operator(kind, fr, fr.grid, default_closure(kind));
        EvolveOptions opt;
        opt.extra_times = {1.0, 10.0};
        opt.store_fields = true;
        auto tr = evolve_linear(op, f, 0.005, 10.0, {}, opt);
        ContourSpec s;
        s.kind = rk == ResolventKind::Lp ? ContourKind::RightArcRays : ContourKind::LeftParabolaRays;
        for (double t : {1.0, 10.0}) {
            auto r = contour_apply(ctx, s, t, f, ContourSplit::WholeResolvent, 2);
            CHECK(rel_linf(r.u, field_at(tr, t)) <= 1e-3);
            CHECK(r.doubling_change <= 1e-4);
        }
    }
}

TEST_CASE("contour independence and split") {
    const auto& fr = front_100();
    const auto f = gaussian(fr.grid);
    auto ctx = ResolventContext::make(ResolventKind::Lp, fr);
    ContourSpec a, b;
    b.arc_radius_scale = 2.0;
    b.ray_angle = 0.7 * std::numbers::pi;
    auto ua = contour_apply(ctx, a, 2.0, f, ContourSplit::WholeResolvent, 2);
    auto ub = contour_apply(ctx, b, 2.0, f, ContourSplit::WholeResolvent, 2);
    CHECK(rel_linf(ua.u, ub.u) <= 1e-3);
    auto us = contour_apply(ctx, a, 2.0, f, ContourSplit::LeftRightSplit, 2);
    CHECK(rel_linf(us.u, ua.u) <= 1e-3);

    auto cpsi = ResolventContext::make(ResolventKind::Lpsi, fr);
    ContourSpec p1, p2;
    p1.kind = p2.kind = ContourKind::LeftParabolaRays;
    p2.c = 0.15;
    p2.parabola_shift_scale = 2.0;
    auto v1 = contour_apply(cpsi, p1, 3.0, f, ContourSplit::WholeResolvent, 2);
    auto v2 = contour_apply(cpsi, p2, 3.0, f, ContourSplit::WholeResolvent, 2);
    CHECK(rel_linf(v1.u, v2.u) <= 1e-3);
}

TEST_CASE("decay report bookkeeping") {
    std::vector<double> t, v;
    for (double s = 1.0; s <= 300.0; s *= 1.2) {
        t.push_back(s);
        v.push_back(3.0 * std::pow(s, -1.5));
    }
    auto r = make_decay_report(DecayQuantity::PW1infWeighted, t, v, {20.0, 200.0});
    CHECK(r.pass);
    CHECK(std::abs(r.exponent + 1.5) < 1e-12);
    CHECK(r.quantity == "p_W1inf_weighted");
    auto bad = make_decay_report(DecayQuantity::PsiLinf, t, v, {20.0, 200.0});
    CHECK_FALSE(bad.pass);
    try {
        make_decay_report(DecayQuantity::PL1, t, v, {20.0, 25.0});
        FAIL("expected FitWindowTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FitWindowTooShort);
    }
    for (auto q : all_decay_quantities()) CHECK(decay_quantity_from_name(decay_quantity_name(q)) == q);
    CHECK_THROWS_AS(decay_quantity_from_name("psi_L2"), Error);
}

TEST_CASE("linear p decay exponents and domain insensitivity") {
    DecaySetup s;
    const std::vector<DecayQuantity> qs{DecayQuantity::PW1infWeighted, DecayQuantity::PL1, DecayQuantity::PsiLinfM10};
    auto reps = linear_decay_suite(qs, s);
    for (const auto& r : reps) CHECK_MESSAGE(r.pass, r.quantity, " exponent ", r.exponent);
    DecaySetup big = s;
    big.x_min = -400.0;
    big.x_max = 400.0;
    big.n = 16384;
    auto wide = linear_decay_suite({DecayQuantity::PW1infWeighted, DecayQuantity::PL1}, big);
    for (std::size_t i = 0; i < wide.size(); ++i) CHECK(std::abs(wide[i].exponent - reps[i].exponent) <= 0.05);
}

TEST_CASE("small-time smoothing") {
    auto fr = solve_critical_front(-50.0, 50.0, 2048, 1e-8);
    for (auto kind : {OperatorKind::Lp, OperatorKind::Lpsi}) {
        auto r = small_time_suite(kind, fr);
        CHECK(r.sup_slope >= -0.6);
        CHECK(r.w1_constant <= 3.0);
        CHECK(std::abs(r.w1_constant_refined - r.w1_constant) <= 0.1 * r.w1_constant);
        CHECK(r.zero_max == 0.0);
        CHECK(r.pass);
    }
}
