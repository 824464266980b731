#pragma once

#include <cstddef>
#include <span>

#include "discretization.hpp"

namespace glf {

struct FitResult {
    double exponent = 0.0;
    double intercept = 0.0;  // log of the prefactor
    double stderr_ = 0.0;
    Interval window;
    std::size_t n_points = 0;
};

/// OLS of log(value) against log(t) over points with t inside the window.
FitResult fit_power_law(std::span<const double> times, std::span<const double> values, Interval window);

}  // namespace glf
