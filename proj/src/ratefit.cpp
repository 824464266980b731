#include "ratefit.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>
#include <gsl/gsl_fit.h>

namespace glf {

FitResult fit_power_law(std::span<const double> times, std::span<const double> values, Interval window) {
    require(times.size() == values.size(), ErrorCode::InvalidArgument, "times and values differ in length");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < window.lo || times[i] > window.hi) continue;
        if (!(values[i] > 0.0))
            fail(ErrorCode::NonPositiveValue, fmt::format("value {} at t = {}", values[i], times[i]));
        require(times[i] > 0.0, ErrorCode::NonPositiveValue, "non-positive time in fit window");
        lx.push_back(std::log(times[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 5)
        fail(ErrorCode::TooFewPoints, fmt::format("{} points in window [{}, {}]", lx.size(), window.lo, window.hi));
    double c0, c1, c00, c01, c11, sumsq;
    gsl_fit_linear(lx.data(), 1, ly.data(), 1, lx.size(), &c0, &c1, &c00, &c01, &c11, &sumsq);
    FitResult r;
    r.exponent = c1;
    r.intercept = c0;
    r.stderr_ = std::sqrt(std::max(c11, 0.0));
    r.window = window;
    r.n_points = lx.size();
    return r;
}

}  // namespace glf
