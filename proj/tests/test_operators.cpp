#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "operators.hpp"

using namespace glf;

namespace {

const FrontProfile& front_100() {
    static const FrontProfile f = solve_critical_front(-100.0, 100.0, 4096, 1e-8);
    return f;
}

double interior_residual(const DiscreteOperator& op, const std::vector<cplx>& u, std::size_t margin) {
    auto r = op.apply(u);
    double worst = 0.0;
    for (std::size_t i = margin; i + margin < r.size(); ++i) worst = std::max(worst, std::abs(r[i]));
    return worst;
}

// The weight blend is C2 with a third-derivative jump at x = +-1; stencils touching it are first order.
std::pair<double, double> split_residual(const DiscreteOperator& op, const std::vector<cplx>& u) {
    auto r = op.apply(u);
    const double h = op.grid.h();
    double smooth = 0.0, kink = 0.0;
    for (std::size_t i = 2; i + 2 < r.size(); ++i) {
        const double x = op.grid.x(i);
        const bool near = std::abs(std::abs(x) - 1.0) <= 1.5 * h;
        (near ? kink : smooth) = std::max(near ? kink : smooth, std::abs(r[i]));
    }
    return {smooth, kink};
}

}  // namespace

TEST_CASE("limiting right operators are pure Laplacians") {
    Grid g(-5.0, 5.0, 101);
    for (auto k : {OperatorKind::LpsiPlus, OperatorKind::LpPlus}) {
        auto op = assemble_limit_operator(k, g, BoundaryClosure::dirichlet());
        for (std::size_t i = 1; i + 1 < g.n; ++i) {
            CHECK(op.adv[i] == 0.0);
            CHECK(op.pot[i] == 0.0);
            CHECK(op.matrix.get(i, i - 1) == op.matrix.get(i, i + 1));
        }
    }
}

TEST_CASE("left psi limit kills constants") {
    Grid g(-5.0, 5.0, 101);
    auto op = assemble_limit_operator(OperatorKind::LpsiMinus, g, BoundaryClosure::dirichlet());
    std::vector<cplx> one(g.n, 1.0);
    CHECK(interior_residual(op, one, 1) < 1e-10);
}

TEST_CASE("weighted operators annihilate the translation and gauge modes") {
    auto residual = [](std::size_t n, OperatorKind kind) {
        auto f = solve_front(Grid(-60.0, 60.0, n), 1e-9);
        auto op = assemble_operator(kind, f, f.grid, BoundaryClosure::dirichlet());
        std::vector<cplx> u(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double w = eval_weight(WeightSpec::omega(), f.grid.x(i)).w;
            u[i] = w * (kind == OperatorKind::Lpsi ? f.q[i] : f.qprime[i]);
        }
        return split_residual(op, u);
    };
    for (auto kind : {OperatorKind::Lpsi, OperatorKind::Lp}) {
        const auto [s1, k1] = residual(2401, kind);
        const auto [s2, k2] = residual(4801, kind);
        CHECK(s1 < 5e-2);
        CHECK(s1 / s2 > 3.5);
        CHECK(k1 / k2 > 1.7);
    }
}

TEST_CASE("assembled coefficients approach the limits at the ends") {
    const auto& f = front_100();
    for (auto kind : {OperatorKind::Lp, OperatorKind::Lpsi}) {
        auto op = assemble_operator(kind, f, f.grid, BoundaryClosure::dirichlet());
        CHECK(op.left_deviation < 1e-12);
        CHECK(op.right_deviation < 1e-12);
        CHECK(op.adv.front() == doctest::Approx(2.0));
        CHECK(op.adv.back() == doctest::Approx(0.0));
        CHECK(op.pot.back() == doctest::Approx(0.0).epsilon(1e-12));
    }
    auto lp = assemble_operator(OperatorKind::Lp, f, f.grid, BoundaryClosure::dirichlet());
    CHECK(lp.pot.front() == doctest::Approx(-2.0));
    CHECK_THROWS_AS(assemble_operator(OperatorKind::Lp, f, Grid(-100.0, 100.0, 2048), BoundaryClosure::dirichlet()),
                    Error);
}

TEST_CASE("dispersion curves") {
    CHECK(dispersion(DispersionCurve::SigmaPlus, 1.0) == cplx(-1.0, 0.0));
    CHECK(dispersion(DispersionCurve::SigmaPMinus, 0.0) == cplx(-2.0, 0.0));
    CHECK(dispersion(DispersionCurve::SigmaPsiMinus, 1.0) == cplx(-1.0, 2.0));
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> K(-10.0, 10.0);
    for (int t = 0; t < 1000; ++t) {
        const double k = K(rng);
        for (auto c : {DispersionCurve::SigmaPlus, DispersionCurve::SigmaPMinus, DispersionCurve::SigmaPsiMinus})
            CHECK(dispersion(c, -k) == std::conj(dispersion(c, k)));
    }
}

TEST_CASE("Fredholm indices") {
    CHECK(fredholm_index(OperatorKind::Lpsi, 0.1) == -2);
    CHECK(fredholm_index(OperatorKind::Lp, 0.1) == -1);
    try {
        fredholm_index(OperatorKind::Lpsi, 0.0);
        FAIL("expected DegenerateRoot");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateRoot);
    }
}

TEST_CASE("ring eigenvalues of the left psi limit sit on its dispersion curve") {
    auto deviation = [](std::size_t n) {
        const double period = 40.0;
        const double h = period / static_cast<double>(n);
        Grid g(0.0, period - h, n);
        auto op = assemble_limit_operator(OperatorKind::LpsiMinus, g, BoundaryClosure::periodic());
        auto ev = eigenvalues(op);
        double worst = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double k = 2.0 * std::numbers::pi * (static_cast<double>(j) - static_cast<double>(n / 2)) / period;
            if (std::abs(k) > 2.0) continue;
            const cplx target = dispersion(DispersionCurve::SigmaPsiMinus, k);
            double best = 1e300;
            for (const cplx& e : ev) best = std::min(best, std::abs(e - target));
            worst = std::max(worst, best);
        }
        return worst;
    };
    const double d1 = deviation(400);
    const double d2 = deviation(800);
    CHECK(d1 < 0.05);
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("periodic shifted solve matches a dense product check") {
    Grid g(0.0, 9.9, 100);
    std::vector<double> adv(g.n), pot(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        adv[i] = std::sin(g.x(i));
        pot[i] = -1.0 + 0.3 * std::cos(2.0 * g.x(i));
    }
    auto op = assemble_from_coefficients(OperatorKind::Lpsi, g, adv, pot, BoundaryClosure::periodic());
    ShiftedSolver s(op, cplx(1.0, 0.5), cplx(-0.05, 0.0));
    std::vector<cplx> rhs(g.n);
    for (std::size_t i = 0; i < g.n; ++i) rhs[i] = cplx(std::cos(0.7 * i), std::sin(0.2 * i));
    auto u = s.solve(rhs);
    auto lu = op.apply(u);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i)
        worst = std::max(worst, std::abs(cplx(1.0, 0.5) * u[i] - 0.05 * lu[i] - rhs[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("Robin closure reproduces exponential boundary data") {
    Grid g(0.0, 10.0, 201);
    const cplx nu(-0.7, 0.3);
    auto op = assemble_limit_operator(OperatorKind::LpsiMinus, g,
                                      {BoundarySide::robin(nu), BoundarySide::robin(nu)});
    std::vector<cplx> u(g.n);
    for (std::size_t i = 0; i < g.n; ++i) u[i] = std::exp(nu * g.x(i));
    auto r = op.apply(u);
    const double h = g.h();
    for (std::size_t i : {std::size_t{0}, g.n - 1}) {
        const cplx exact = (nu * nu + 2.0 * nu) * u[i];
        CHECK(std::abs(r[i] - exact) < 0.5 * h * h * std::abs(u[i]));
    }
    auto neu = assemble_limit_operator(OperatorKind::LpsiPlus, g, {BoundarySide::neumann(), BoundarySide::neumann()});
    std::vector<cplx> c(g.n, 3.0);
    CHECK(interior_residual(neu, c, 0) < 1e-12);
}

TEST_CASE("weighted spectra on a modest grid stay in the left half-plane") {
    auto f = solve_front(Grid(-50.0, 50.0, 512), 1e-9);
    for (auto kind : {OperatorKind::Lp, OperatorKind::Lpsi}) {
        auto op = assemble_operator(kind, f, f.grid, BoundaryClosure::dirichlet());
        CHECK(eigen_scan(op, 1e-3).empty());
    }
}
