#pragma once

// Reference computations kept independent of the library's numerics.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
inline double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
    }
    return d;
}

/// M/M/1/1 with dropping: 1/lambda + 2/mu - 1/(lambda + mu).
inline double mm11_dropping(double lambda, double mu) { return 1 / lambda + 2 / mu - 1 / (lambda + mu); }

/// M/M/1/1 with preemption in service: 1/lambda + 1/mu.
inline double mm11_preemption(double lambda, double mu) { return 1 / lambda + 1 / mu; }

/// Dropping with exponential interarrivals of rate lambda and any service S: the
/// walk is a Poisson process, so E[K] = 1 + lambda E[S] and the crossing sum is
/// lambda E[S^2] / 2.
inline double poisson_expected_arrivals(double lambda, double es) { return 1 + lambda * es; }
inline double poisson_crossing_sum(double lambda, double es2) { return lambda * es2 / 2; }

/// Exact dropping age for exponential interarrivals (M/G/1/1):
/// E[(Y + S)^2] / (2 E[Y + S]) + E[S].
inline double mg11_dropping(double lambda, double es, double es2) {
    const double m = 1 / lambda;
    return (2 * m * m + 2 * m * es + es2) / (2 * (m + es)) + es;
}

}  // namespace oracle
