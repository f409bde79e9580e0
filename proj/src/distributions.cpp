#include "aoi/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "aoi/errors.hpp"
#include "aoi/quadrature.hpp"

namespace aoi {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }
bool nonnegative_finite(double x) { return std::isfinite(x) && x >= 0.0; }

void require(bool ok, std::string_view what) {
    if (!ok) throw InvalidDistribution(std::string(what));
}

void validate(const DistributionSpec::Kind& kind) {
    std::visit(overloaded{
                   [](const Exponential& d) { require(positive_finite(d.rate), "exponential rate must be > 0"); },
                   [](const ShiftedExponential& d) {
                       require(positive_finite(d.rate), "shifted_exponential rate must be > 0");
                       require(nonnegative_finite(d.shift), "shifted_exponential shift must be >= 0");
                   },
                   [](const Deterministic& d) {
                       require(nonnegative_finite(d.value), "deterministic value must be >= 0");
                   },
                   [](const Uniform& d) {
                       require(nonnegative_finite(d.lower), "uniform lower must be >= 0");
                       require(std::isfinite(d.upper) && d.upper > d.lower, "uniform upper must exceed lower");
                   },
                   [](const Rayleigh& d) { require(positive_finite(d.scale), "rayleigh scale must be > 0"); },
                   [](const Erlang& d) {
                       require(d.shape >= 1, "erlang shape must be a positive integer");
                       require(positive_finite(d.rate), "erlang rate must be > 0");
                   },
                   [](const Hyperexponential& d) {
                       require(d.weights.size() >= 2, "hyperexponential needs two or more phases");
                       require(d.weights.size() == d.rates.size(),
                               "hyperexponential weights and rates differ in length");
                       double total = 0.0;
                       for (std::size_t i = 0; i < d.weights.size(); ++i) {
                           require(std::isfinite(d.weights[i]) && d.weights[i] > 0.0,
                                   "hyperexponential weights must be > 0");
                           require(positive_finite(d.rates[i]), "hyperexponential rates must be > 0");
                           total += d.weights[i];
                       }
                       require(std::abs(total - 1.0) <= 1e-12, "hyperexponential weights must sum to 1");
                   },
               },
               kind);
}

// e^{-rx} sum_{n<k} (rx)^n / n!
double erlang_ccdf(int shape, double rate, double x) {
    if (x <= 0.0) return 1.0;
    const double rx = rate * x;
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < shape; ++n) {
        term *= rx / n;
        sum += term;
    }
    return std::exp(-rx) * sum;
}

double bisect_quantile(const DistributionSpec& dist, double p) {
    double lo = support(dist).lower;
    double hi = std::max(lo + 1.0, 2.0 * mean(dist));
    while (cdf(dist, hi) < p) hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(dist, mid) >= p)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace

DistributionSpec::DistributionSpec(Kind kind) : kind_(std::move(kind)) { validate(kind_); }

std::string_view DistributionSpec::kind_name() const noexcept {
    return std::visit(overloaded{
                          [](const Exponential&) { return std::string_view{"exponential"}; },
                          [](const ShiftedExponential&) { return std::string_view{"shifted_exponential"}; },
                          [](const Deterministic&) { return std::string_view{"deterministic"}; },
                          [](const Uniform&) { return std::string_view{"uniform"}; },
                          [](const Rayleigh&) { return std::string_view{"rayleigh"}; },
                          [](const Erlang&) { return std::string_view{"erlang"}; },
                          [](const Hyperexponential&) { return std::string_view{"hyperexponential"}; },
                      },
                      kind_);
}

double sample(const DistributionSpec& dist, Rng& rng) {
    // Inverse transform throughout; -log(1-u) with u in [0,1) is finite.
    auto unit_exp = [&rng] { return -std::log1p(-uniform01(rng)); };
    return std::visit(overloaded{
                          [&](const Exponential& d) { return unit_exp() / d.rate; },
                          [&](const ShiftedExponential& d) { return d.shift + unit_exp() / d.rate; },
                          [](const Deterministic& d) { return d.value; },
                          [&](const Uniform& d) { return d.lower + (d.upper - d.lower) * uniform01(rng); },
                          [&](const Rayleigh& d) { return d.scale * std::sqrt(2.0 * unit_exp()); },
                          [&](const Erlang& d) {
                              double total = 0.0;
                              for (int i = 0; i < d.shape; ++i) total += unit_exp();
                              return total / d.rate;
                          },
                          [&](const Hyperexponential& d) {
                              const double u = uniform01(rng);
                              double acc = 0.0;
                              std::size_t phase = d.weights.size() - 1;
                              for (std::size_t i = 0; i < d.weights.size(); ++i) {
                                  acc += d.weights[i];
                                  if (u < acc) {
                                      phase = i;
                                      break;
                                  }
                              }
                              return unit_exp() / d.rates[phase];
                          },
                      },
                      dist.kind());
}

double mean(const DistributionSpec& dist) {
    return std::visit(overloaded{
                          [](const Exponential& d) { return 1.0 / d.rate; },
                          [](const ShiftedExponential& d) { return d.shift + 1.0 / d.rate; },
                          [](const Deterministic& d) { return d.value; },
                          [](const Uniform& d) { return 0.5 * (d.lower + d.upper); },
                          [](const Rayleigh& d) { return d.scale * std::sqrt(std::numbers::pi / 2.0); },
                          [](const Erlang& d) { return d.shape / d.rate; },
                          [](const Hyperexponential& d) {
                              double m = 0.0;
                              for (std::size_t i = 0; i < d.weights.size(); ++i) m += d.weights[i] / d.rates[i];
                              return m;
                          },
                      },
                      dist.kind());
}

double second_moment(const DistributionSpec& dist) {
    return std::visit(overloaded{
                          [](const Exponential& d) { return 2.0 / (d.rate * d.rate); },
                          [](const ShiftedExponential& d) {
                              const double m = 1.0 / d.rate;
                              return d.shift * d.shift + 2.0 * d.shift * m + 2.0 * m * m;
                          },
                          [](const Deterministic& d) { return d.value * d.value; },
                          [](const Uniform& d) {
                              return (d.lower * d.lower + d.lower * d.upper + d.upper * d.upper) / 3.0;
                          },
                          [](const Rayleigh& d) { return 2.0 * d.scale * d.scale; },
                          [](const Erlang& d) { return d.shape * (d.shape + 1.0) / (d.rate * d.rate); },
                          [](const Hyperexponential& d) {
                              double m2 = 0.0;
                              for (std::size_t i = 0; i < d.weights.size(); ++i)
                                  m2 += 2.0 * d.weights[i] / (d.rates[i] * d.rates[i]);
                              return m2;
                          },
                      },
                      dist.kind());
}

double variance(const DistributionSpec& dist) {
    const double m = mean(dist);
    return std::max(0.0, second_moment(dist) - m * m);
}

double ccdf(const DistributionSpec& dist, double x) {
    if (x < 0.0) return 1.0;
    return std::visit(overloaded{
                          [x](const Exponential& d) { return std::exp(-d.rate * x); },
                          [x](const ShiftedExponential& d) {
                              return x <= d.shift ? 1.0 : std::exp(-d.rate * (x - d.shift));
                          },
                          [x](const Deterministic& d) { return x < d.value ? 1.0 : 0.0; },
                          [x](const Uniform& d) {
                              if (x <= d.lower) return 1.0;
                              if (x >= d.upper) return 0.0;
                              return (d.upper - x) / (d.upper - d.lower);
                          },
                          [x](const Rayleigh& d) { return std::exp(-x * x / (2.0 * d.scale * d.scale)); },
                          [x](const Erlang& d) { return erlang_ccdf(d.shape, d.rate, x); },
                          [x](const Hyperexponential& d) {
                              double s = 0.0;
                              for (std::size_t i = 0; i < d.weights.size(); ++i)
                                  s += d.weights[i] * std::exp(-d.rates[i] * x);
                              return s;
                          },
                      },
                      dist.kind());
}

double cdf(const DistributionSpec& dist, double x) { return 1.0 - ccdf(dist, x); }

double survival_inclusive(const DistributionSpec& dist, double x) {
    if (const auto* d = std::get_if<Deterministic>(&dist.kind())) return x <= d->value ? 1.0 : 0.0;
    return ccdf(dist, x);
}

bool has_density(const DistributionSpec& dist) { return !dist.is<Deterministic>(); }

double density(const DistributionSpec& dist, double x) {
    if (x < 0.0) return 0.0;
    return std::visit(overloaded{
                          [x](const Exponential& d) { return d.rate * std::exp(-d.rate * x); },
                          [x](const ShiftedExponential& d) {
                              return x < d.shift ? 0.0 : d.rate * std::exp(-d.rate * (x - d.shift));
                          },
                          [](const Deterministic&) -> double {
                              throw InvalidArgument("deterministic law has no density");
                          },
                          [x](const Uniform& d) {
                              return (x < d.lower || x > d.upper) ? 0.0 : 1.0 / (d.upper - d.lower);
                          },
                          [x](const Rayleigh& d) {
                              const double s2 = d.scale * d.scale;
                              return x / s2 * std::exp(-x * x / (2.0 * s2));
                          },
                          [x](const Erlang& d) {
                              // r (rx)^{k-1} e^{-rx} / (k-1)!
                              const double rx = d.rate * x;
                              if (rx == 0.0) return d.shape == 1 ? d.rate : 0.0;
                              return d.rate * std::exp((d.shape - 1) * std::log(rx) - rx - std::lgamma(d.shape));
                          },
                          [x](const Hyperexponential& d) {
                              double f = 0.0;
                              for (std::size_t i = 0; i < d.weights.size(); ++i)
                                  f += d.weights[i] * d.rates[i] * std::exp(-d.rates[i] * x);
                              return f;
                          },
                      },
                      dist.kind());
}

Support support(const DistributionSpec& dist) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(overloaded{
                          [](const ShiftedExponential& d) { return Support{d.shift, inf}; },
                          [](const Deterministic& d) { return Support{d.value, d.value}; },
                          [](const Uniform& d) { return Support{d.lower, d.upper}; },
                          [](const auto&) { return Support{0.0, inf}; },
                      },
                      dist.kind());
}

std::vector<double> breakpoints(const DistributionSpec& dist) {
    return std::visit(overloaded{
                          [](const ShiftedExponential& d) { return std::vector<double>{d.shift}; },
                          [](const Deterministic& d) { return std::vector<double>{d.value}; },
                          [](const Uniform& d) { return std::vector<double>{d.lower, d.upper}; },
                          [](const auto&) { return std::vector<double>{}; },
                      },
                      dist.kind());
}

double quantile(const DistributionSpec& dist, double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile level must lie in (0, 1)");
    return std::visit(overloaded{
                          [p](const Exponential& d) { return -std::log1p(-p) / d.rate; },
                          [p](const ShiftedExponential& d) { return d.shift - std::log1p(-p) / d.rate; },
                          [](const Deterministic& d) { return d.value; },
                          [p](const Uniform& d) { return d.lower + p * (d.upper - d.lower); },
                          [p](const Rayleigh& d) { return d.scale * std::sqrt(-2.0 * std::log1p(-p)); },
                          [&](const auto&) { return bisect_quantile(dist, p); },
                      },
                      dist.kind());
}

double expect(const DistributionSpec& dist, const std::function<double(double)>& g,
              std::span<const double> extra_breaks, double rel_tol) {
    if (const auto* d = std::get_if<Deterministic>(&dist.kind())) return g(d->value);
    const Support sup = support(dist);
    std::vector<double> breaks = breakpoints(dist);
    breaks.insert(breaks.end(), extra_breaks.begin(), extra_breaks.end());
    auto integrand = [&](double x) {
        const double f = density(dist, x);
        return f == 0.0 ? 0.0 : g(x) * f;
    };
    return quad::integrate(integrand, sup.lower, sup.upper, breaks, rel_tol).value;
}

double laplace(const DistributionSpec& dist, double s) {
    if (!(s >= 0.0)) throw InvalidArgument("laplace argument must be >= 0");
    if (s == 0.0) return 1.0;
    return std::visit(overloaded{
                          [s](const Exponential& d) { return d.rate / (d.rate + s); },
                          [s](const ShiftedExponential& d) {
                              return std::exp(-s * d.shift) * d.rate / (d.rate + s);
                          },
                          [s](const Deterministic& d) { return std::exp(-s * d.value); },
                          [s](const Erlang& d) { return std::pow(d.rate / (d.rate + s), d.shape); },
                          [s](const Hyperexponential& d) {
                              double t = 0.0;
                              for (std::size_t i = 0; i < d.weights.size(); ++i)
                                  t += d.weights[i] * d.rates[i] / (d.rates[i] + s);
                              return t;
                          },
                          [&](const auto&) {
                              return expect(dist, [s](double x) { return std::exp(-s * x); }, {}, 1e-9);
                          },
                      },
                      dist.kind());
}

double mean_residual_life(const DistributionSpec& dist, double t, double rel_tol) {
    const double tail_prob = ccdf(dist, t);
    if (!(tail_prob > 0.0)) throw TailEmpty("ccdf is zero at t = " + std::to_string(t));
    const Support sup = support(dist);
    const double start = std::max(t, 0.0);
    const std::vector<double> breaks = breakpoints(dist);
    const double upper = std::isfinite(sup.upper) ? sup.upper : quad::infinity;
    auto tail = quad::integrate([&](double x) { return ccdf(dist, x); }, start, upper, breaks, rel_tol);
    return tail.value / tail_prob + (start - t);
}

std::string_view to_string(MrlVerdict verdict) noexcept {
    switch (verdict) {
        case MrlVerdict::DMRL: return "DMRL";
        case MrlVerdict::IMRL: return "IMRL";
        case MrlVerdict::ConstantMRL: return "ConstantMRL";
        case MrlVerdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

std::vector<std::pair<double, double>> mrl_grid(const DistributionSpec& dist, const MrlGridSpec& grid) {
    if (grid.points < 2) throw InvalidArgument("MRL grid needs at least two points");
    const double cap = quantile(dist, grid.quantile_cap);
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.points);
    for (std::size_t i = 0; i < grid.points; ++i) {
        const double t = cap * static_cast<double>(i) / static_cast<double>(grid.points - 1);
        // A point mass sitting on the cap leaves an empty tail there.
        if (!(ccdf(dist, t) > 0.0)) continue;
        out.emplace_back(t, mean_residual_life(dist, t));
    }
    return out;
}

MrlClassification classify_mrl(const DistributionSpec& dist, const MrlGridSpec& grid, double tol) {
    MrlClassification result;
    result.tolerance = tol;
    result.grid = mrl_grid(dist, grid);
    if (result.grid.size() < 2) return result;

    double lo = result.grid.front().second;
    double hi = lo;
    bool nonincreasing = true;
    bool nondecreasing = true;
    for (std::size_t i = 1; i < result.grid.size(); ++i) {
        const double m = result.grid[i].second;
        const double diff = m - result.grid[i - 1].second;
        lo = std::min(lo, m);
        hi = std::max(hi, m);
        nonincreasing = nonincreasing && diff <= tol;
        nondecreasing = nondecreasing && diff >= -tol;
    }
    if (hi - lo <= tol)
        result.verdict = MrlVerdict::ConstantMRL;
    else if (nonincreasing)
        result.verdict = MrlVerdict::DMRL;
    else if (nondecreasing)
        result.verdict = MrlVerdict::IMRL;
    return result;
}

bool check_nbue(const DistributionSpec& dist, const MrlGridSpec& grid, double tol) {
    const double m = mean(dist);
    const auto samples = mrl_grid(dist, grid);
    return std::all_of(samples.begin(), samples.end(),
                       [&](const auto& point) { return point.second <= m + tol; });
}

}  // namespace aoi
