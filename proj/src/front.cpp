#include "front.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <gsl/gsl_fit.h>
#include <gsl/gsl_multifit.h>

namespace glf {

double wake_decay_rate(double speed) { return 0.5 * (-speed + std::sqrt(speed * speed + 8.0)); }

double FrontProfile::q_at(double x) const {
    const std::size_t i = grid.locate(x);
    const double t = std::clamp((x - grid.x(i)) / grid.h(), 0.0, 1.0);
    return (1.0 - t) * q[i] + t * q[i + 1];
}

double front_residual(const Grid& grid, const std::vector<double>& q, double speed) {
    const double h = grid.h();
    double r = 0.0;
    for (std::size_t k = 1; k + 1 < grid.n; ++k) {
        const double v = (q[k + 1] - 2.0 * q[k] + q[k - 1]) / (h * h) + speed * (q[k + 1] - q[k - 1]) / (2.0 * h) +
                         q[k] - q[k] * q[k] * q[k];
        r = std::max(r, std::abs(v));
    }
    return r;
}

// Row layout: row 0 is the left Robin closure, node k <= i goes to row k, the phase row
// sits at i+1 and node k > i goes to row k+1. No right closure: both decay modes there are admissible.
FrontProfile solve_front(const Grid& grid, double tol, const FrontOptions& opts) {
    require(tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");
    require(opts.phase_x > grid.x_min && opts.phase_x < grid.x_max, ErrorCode::InvalidArgument,
            "phase point outside the grid");
    const std::size_t n = grid.n;
    require(n >= 5, ErrorCode::InvalidArgument, "front solve needs at least 5 nodes");
    const double h = grid.h();
    const double c = opts.speed;
    const double mu = wake_decay_rate(c);
    const std::size_t ip = grid.locate(opts.phase_x);
    const double theta = (opts.phase_x - grid.x(ip)) / h;

    std::vector<double> q(n);
    for (std::size_t k = 0; k < n; ++k) q[k] = 0.5 * (1.0 - std::tanh((grid.x(k) - opts.phase_x) / (2.0 * std::sqrt(2.0))));

    const double lo = 1.0 / (h * h) - c / (2.0 * h);
    const double up = 1.0 / (h * h) + c / (2.0 * h);
    std::vector<cplx> rhs(n);
    int it = 0;
    bool converged = false;
    for (; it < opts.max_iterations; ++it) {
        BandedMatrix jac(n, 2, 2);
        rhs[0] = -((-3.0 * q[0] + 4.0 * q[1] - q[2]) / (2.0 * h) - mu * (q[0] - 1.0));
        jac.set(0, 0, -3.0 / (2.0 * h) - mu);
        jac.set(0, 1, 4.0 / (2.0 * h));
        jac.set(0, 2, -1.0 / (2.0 * h));
        for (std::size_t k = 1; k + 1 < n; ++k) {
            const std::size_t r = k <= ip ? k : k + 1;
            rhs[r] = -(lo * q[k - 1] + up * q[k + 1] + (-2.0 / (h * h) + 1.0) * q[k] - q[k] * q[k] * q[k]);
            jac.set(r, k - 1, lo);
            jac.set(r, k, -2.0 / (h * h) + 1.0 - 3.0 * q[k] * q[k]);
            jac.set(r, k + 1, up);
        }
        rhs[ip + 1] = -((1.0 - theta) * q[ip] + theta * q[ip + 1] - 0.5);
        jac.set(ip + 1, ip, 1.0 - theta);
        jac.set(ip + 1, ip + 1, theta);

        const auto dq = solve_banded(jac, std::span<const cplx>(rhs));
        double step = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            q[k] += dq[k].real();
            step = std::max(step, std::abs(dq[k].real()));
        }
        if (step < 1e-13 || (step < 1e-10 && front_residual(grid, q, c) < 1e-2 * tol)) {
            converged = true;
            ++it;
            break;
        }
    }
    const double res = front_residual(grid, q, c);
    if (!converged || res > tol)
        fail(ErrorCode::NonConvergence, fmt::format("front Newton stalled after {} iterations, residual {:.3e}", it, res));
    if (opts.check_domain) {
        const double left = std::abs(1.0 - q.front());
        const double right = std::abs(q.back());
        if (left > 10.0 * tol || right > 10.0 * tol)
            fail(ErrorCode::DomainTooSmall,
                 fmt::format("boundary states off by {:.3e} (left) and {:.3e} (right)", left, right));
    }

    FrontProfile out;
    out.grid = grid;
    out.q = std::move(q);
    out.qprime = differentiate(std::span<const double>(out.q), h, 1);
    out.speed = c;
    out.residual = res;
    out.iterations = it;
    return out;
}

FrontProfile solve_critical_front(double x_min, double x_max, std::size_t n, double tol) {
    require(x_min < -10.0 && x_max > 10.0, ErrorCode::InvalidArgument, "front domain must contain [-10, 10]");
    require(n >= 512, ErrorCode::InvalidArgument, "front grid needs at least 512 nodes");
    return solve_front(Grid(x_min, x_max, n), tol);
}

Interval default_edge_window(const Grid& g) { return {g.x_max / 4.0, g.x_max / 2.0}; }

Interval default_wake_window(const Grid& g) { return {std::max(-40.0, 0.5 * g.x_min), -10.0}; }

namespace {

struct WindowData {
    std::vector<double> x;
    std::vector<double> y;
};

WindowData collect(const Grid& g, const std::vector<double>& q, Interval w) {
    WindowData d;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = g.x(i);
        if (x >= w.lo && x <= w.hi) {
            d.x.push_back(x);
            d.y.push_back(q[i]);
        }
    }
    return d;
}

void check_window(const Grid& g, Interval w, bool right) {
    require(w.lo < w.hi && w.lo >= g.x_min && w.hi <= g.x_max, ErrorCode::InvalidArgument,
            fmt::format("fit window [{}, {}] outside the grid", w.lo, w.hi));
    require(right ? w.lo >= 10.0 : w.hi <= -10.0, ErrorCode::InvalidArgument,
            fmt::format("fit window [{}, {}] must satisfy |x| >= 10", w.lo, w.hi));
}

double rms(const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return std::sqrt(s / static_cast<double>(v.size()));
}

// Relative Gauss-Newton fit of q = (a + b x) exp(k x); returns k.
double fit_edge_rate(const WindowData& d, double a0, double b0) {
    const std::size_t m = d.x.size();
    double a = a0, b = b0, k = -1.0;
    gsl_matrix* jac = gsl_matrix_alloc(m, 3);
    gsl_vector* r = gsl_vector_alloc(m);
    gsl_vector* step = gsl_vector_alloc(3);
    gsl_matrix* cov = gsl_matrix_alloc(3, 3);
    gsl_multifit_linear_workspace* ws = gsl_multifit_linear_alloc(m, 3);
    for (int it = 0; it < 50; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            const double x = d.x[i];
            const double e = std::exp(k * x) / d.y[i];
            gsl_matrix_set(jac, i, 0, e);
            gsl_matrix_set(jac, i, 1, x * e);
            gsl_matrix_set(jac, i, 2, x * (a + b * x) * e);
            gsl_vector_set(r, i, 1.0 - (a + b * x) * e);
        }
        double chisq = 0.0;
        gsl_multifit_linear(jac, r, step, cov, &chisq, ws);
        a += gsl_vector_get(step, 0);
        b += gsl_vector_get(step, 1);
        k += gsl_vector_get(step, 2);
        if (std::abs(gsl_vector_get(step, 2)) < 1e-14) break;
    }
    gsl_multifit_linear_free(ws);
    gsl_matrix_free(cov);
    gsl_vector_free(step);
    gsl_vector_free(r);
    gsl_matrix_free(jac);
    return k;
}

}  // namespace

AsymptoticsReport fit_front_asymptotics(const Grid& grid, const std::vector<double>& q, Interval edge_window,
                                        Interval wake_window, const FitOptions& opts) {
    require(q.size() == grid.n, ErrorCode::GridMismatch, "profile length differs from grid size");
    check_window(grid, edge_window, true);
    check_window(grid, wake_window, false);
    AsymptoticsReport rep;
    rep.edge_window = edge_window;
    rep.wake_window = wake_window;

    // Leading edge: q e^{x} = a + b x.
    WindowData edge = collect(grid, q, edge_window);
    require(edge.x.size() >= 5, ErrorCode::FitWindowTooShort, "edge window holds fewer than 5 nodes");
    for (double v : edge.y)
        if (!(v > 0.0)) fail(ErrorCode::WindowTooNoisy, "non-positive values in the edge window");
    std::vector<double> ye(edge.x.size());
    for (std::size_t i = 0; i < ye.size(); ++i) ye[i] = edge.y[i] * std::exp(edge.x[i]);
    double c0, c1, c00, c01, c11, sumsq;
    gsl_fit_linear(edge.x.data(), 1, ye.data(), 1, ye.size(), &c0, &c1, &c00, &c01, &c11, &sumsq);
    rep.a = c0;
    rep.b = c1;
    std::vector<double> res(ye.size());
    for (std::size_t i = 0; i < ye.size(); ++i) res[i] = ye[i] - (c0 + c1 * edge.x[i]);
    rep.edge_residual = rms(res) / std::max(rms(ye), 1e-300);
    if (rep.edge_residual > opts.noise_threshold)
        fail(ErrorCode::WindowTooNoisy, fmt::format("edge fit residual {:.3e}", rep.edge_residual));
    rep.edge_rate = fit_edge_rate(edge, rep.a, rep.b);

    // Wake: log(1 - q) = log c1 + rate x.
    WindowData wake = collect(grid, q, wake_window);
    require(wake.x.size() >= 5, ErrorCode::FitWindowTooShort, "wake window holds fewer than 5 nodes");
    std::vector<double> yw(wake.x.size());
    for (std::size_t i = 0; i < yw.size(); ++i) {
        const double d = 1.0 - wake.y[i];
        if (!(d > 0.0)) fail(ErrorCode::WindowTooNoisy, "wake window reaches the rounding floor");
        yw[i] = std::log(d);
    }
    gsl_fit_linear(wake.x.data(), 1, yw.data(), 1, yw.size(), &c0, &c1, &c00, &c01, &c11, &sumsq);
    rep.c1 = std::exp(c0);
    rep.wake_rate = c1;
    rep.wake_residual = std::sqrt(sumsq / static_cast<double>(yw.size()));
    if (rep.wake_residual > opts.noise_threshold)
        fail(ErrorCode::WindowTooNoisy, fmt::format("wake fit residual {:.3e}", rep.wake_residual));
    return rep;
}

AsymptoticsReport fit_front_asymptotics(const FrontProfile& profile, Interval edge_window, Interval wake_window,
                                        const FitOptions& opts) {
    return fit_front_asymptotics(profile.grid, profile.q, edge_window, wake_window, opts);
}

}  // namespace glf
