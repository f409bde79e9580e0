#pragma once

#include <functional>
#include <limits>
#include <span>

namespace aoi::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod integral of f over [a, b]; b may be +infinity.
/// `breaks` are interior points where f has kinks or jumps; the interval
/// is split there so each piece is smooth.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breaks = {}, double rel_tol = 1e-10);

inline constexpr double infinity = std::numeric_limits<double>::infinity();

}  // namespace aoi::quad
