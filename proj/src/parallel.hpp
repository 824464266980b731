#pragma once

#include <cstddef>
#include <functional>

namespace glf {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

/// Disables the GSL abort-on-error handler (idempotent, thread-safe).
void quiet_gsl();

}  // namespace glf
