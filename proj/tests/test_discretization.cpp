#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "discretization.hpp"

using namespace glf;

TEST_CASE("grid spacing and locate") {
    Grid g(-1.0, 1.0, 5);
    CHECK(g.h() == doctest::Approx(0.5));
    CHECK(g.x(4) == doctest::Approx(1.0));
    CHECK(g.locate(-0.1) == 1);
    CHECK(g.locate(5.0) == 3);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 2), Error);
}

TEST_CASE("differentiate is exact on affine and quadratic fields") {
    Grid g(-2.0, 3.0, 41);
    auto lin = Field::sample(g, [](double x) { return cplx(2.0 * x - 1.0, x); });
    auto d1 = differentiate(lin, 1);
    for (std::size_t i = 0; i < g.n; ++i) {
        CHECK(std::abs(d1[i] - cplx(2.0, 1.0)) < 1e-12);
    }
    auto sq = Field::sample(g, [](double x) { return cplx(x * x, 0.0); });
    auto d2 = differentiate(sq, 2);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(std::abs(d2[i] - 2.0) < 1e-9);
}

TEST_CASE("first derivative of sin converges at second order") {
    auto err = [](std::size_t n) {
        Grid g(-std::numbers::pi, std::numbers::pi, n);
        auto f = Field::sample(g, [](double x) { return std::sin(x); });
        auto d = differentiate(f, 1);
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(d[i] - std::cos(g.x(i))));
        return std::pair{g.h(), e};
    };
    auto [h1, e1] = err(1024);
    auto [h2, e2] = err(2048);
    const double slope = std::log(e1 / e2) / std::log(h1 / h2);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.02));
    CHECK(e1 / (h1 * h1) == doctest::Approx(0.33332893231051974).epsilon(1e-3));
}

TEST_CASE("differentiate is linear") {
    Grid g(0.0, 1.0, 33);
    auto f = Field::sample(g, [](double x) { return cplx(std::exp(x), x * x); });
    auto h = Field::sample(g, [](double x) { return cplx(std::cos(3 * x), 1.0); });
    const cplx a(0.3, -1.2), b(2.0, 0.5);
    auto lhs = differentiate(a * f + b * h, 2);
    auto rhs = a * differentiate(f, 2) + b * differentiate(h, 2);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(std::abs(lhs[i] - rhs[i]) < 1e-9 * (1.0 + std::abs(rhs[i])));
}

TEST_CASE("identity solve returns the rhs") {
    BandedMatrix a(6, 1, 1);
    for (std::size_t i = 0; i < 6; ++i) a.set(i, i, 1.0);
    std::vector<cplx> rhs{1.0, cplx(2, 1), 3.0, -4.0, 0.0, cplx(0, 7)};
    auto u = solve_banded(a, std::span<const cplx>(rhs));
    for (std::size_t i = 0; i < 6; ++i) CHECK(u[i] == rhs[i]);
}

TEST_CASE("Dirichlet (dxx - 1) u = -sin on [0, pi] gives sin/2") {
    Grid g(0.0, std::numbers::pi, 401);
    const double h = g.h();
    BandedMatrix a(g.n, 1, 1);
    std::vector<cplx> rhs(g.n);
    a.set_identity_row(0);
    a.set_identity_row(g.n - 1);
    for (std::size_t i = 1; i + 1 < g.n; ++i) {
        a.set(i, i - 1, 1.0 / (h * h));
        a.set(i, i, -2.0 / (h * h) - 1.0);
        a.set(i, i + 1, 1.0 / (h * h));
        rhs[i] = -std::sin(g.x(i));
    }
    auto u = solve_banded(a, std::span<const cplx>(rhs));
    double e = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) e = std::max(e, std::abs(u[i] - 0.5 * std::sin(g.x(i))));
    CHECK(e < 0.1 * h * h);
}

TEST_CASE("tridiagonal solve matches dense reference") {
    const std::size_t n = 40;
    BandedMatrix a(n, 1, 1);
    std::vector<cplx> b(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double i = static_cast<double>(k);
        a.set(k, k, cplx(4.0 + std::sin(i), std::cos(0.5 * i)));
        if (k > 0) a.set(k, k - 1, cplx(std::cos(1.3 * i), -0.5));
        if (k + 1 < n) a.set(k, k + 1, cplx(0.7 * std::sin(0.9 * i), 0.25 * i / n));
        b[k] = cplx(std::cos(0.3 * i), std::sin(0.7 * i));
    }
    auto x = solve_banded(a, std::span<const cplx>(b));
    const std::vector<std::tuple<std::size_t, double, double>> ref{
        {0, 0.23529411764705882, -0.058823529411764705},
        {7, -0.024033618520003387, -0.264208480759312},
        {19, 0.11277988351320062, 0.22554793977271637},
        {33, -0.12685341977405573, -0.22739356702283453},
        {39, 0.11248171678664332, 0.12705349566241322},
    };
    for (auto [i, re, im] : ref) CHECK(std::abs(x[i] - cplx(re, im)) < 1e-12);
}

TEST_CASE("random well-conditioned banded systems reproduce the rhs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 20 + static_cast<std::size_t>(trial);
        BandedMatrix a(n, 2, 2);
        std::vector<cplx> rhs(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= std::min(n - 1, i + 2); ++j)
                a.set(i, j, cplx(U(rng), U(rng)));
            a.set(i, i, cplx(6.0 + U(rng), U(rng)));
            rhs[i] = cplx(U(rng), U(rng));
        }
        auto u = solve_banded(a, std::span<const cplx>(rhs));
        auto back = a.multiply(u);
        double r = 0.0, s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r = std::max(r, std::abs(back[i] - rhs[i]));
            s = std::max(s, std::abs(rhs[i]));
        }
        CHECK(r <= 1e-10 * s);
    }
}

TEST_CASE("singular matrix is rejected") {
    BandedMatrix a(4, 1, 1);
    for (std::size_t i = 0; i < 4; ++i) a.set(i, i, 1.0);
    a.set(2, 2, 0.0);
    a.set(2, 1, 0.0);
    try {
        BandedLU lu(a);
        FAIL("expected SingularMatrix");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularMatrix);
    }
}

TEST_CASE("grid mismatch is reported") {
    Field a(Grid(0.0, 1.0, 5));
    Field b(Grid(0.0, 2.0, 5));
    CHECK_THROWS_AS(a + b, Error);
}
