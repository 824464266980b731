#pragma once

#include <optional>
#include <vector>

#include "discretization.hpp"

namespace glf {

struct AsymptoticsReport {
    double a = 0.0;   // leading edge q ~ (a + b x) e^{-x}
    double b = 0.0;
    double c1 = 0.0;  // wake 1 - q ~ c1 e^{wake_rate x}
    double edge_rate = 0.0;
    double wake_rate = 0.0;
    double edge_residual = 0.0;
    double wake_residual = 0.0;
    Interval edge_window;
    Interval wake_window;
};

struct FrontProfile {
    Grid grid;
    std::vector<double> q;
    std::vector<double> qprime;
    std::optional<AsymptoticsReport> asymptotics;
    double speed = 2.0;
    double residual = 0.0;  // discrete ODE residual, max over interior nodes
    int iterations = 0;

    /// Linear interpolation of q at x (clamped to the grid).
    double q_at(double x) const;
};

struct FrontOptions {
    double speed = 2.0;
    double phase_x = 0.0;  // q(phase_x) = 1/2
    int max_iterations = 50;
    bool check_domain = true;
};

/// Newton solve of q'' + c q' + q - q^3 = 0 with q(-inf) = 1, q(+inf) = 0.
FrontProfile solve_front(const Grid& grid, double tol, const FrontOptions& opts = {});
FrontProfile solve_critical_front(double x_min, double x_max, std::size_t n, double tol);

/// Max over interior nodes of |q'' + c q' + q - q^3| with central stencils.
double front_residual(const Grid& grid, const std::vector<double>& q, double speed);

/// Positive spatial rate of the linearization about q = 1.
double wake_decay_rate(double speed);

struct FitOptions {
    double noise_threshold = 0.05;
};

AsymptoticsReport fit_front_asymptotics(const Grid& grid, const std::vector<double>& q, Interval edge_window,
                                        Interval wake_window, const FitOptions& opts = {});
AsymptoticsReport fit_front_asymptotics(const FrontProfile& profile, Interval edge_window, Interval wake_window,
                                        const FitOptions& opts = {});

Interval default_edge_window(const Grid& g);
Interval default_wake_window(const Grid& g);

}  // namespace glf
