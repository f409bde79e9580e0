#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "aoi/random.hpp"

namespace aoi {

struct Exponential {
    double rate;
    bool operator==(const Exponential&) const = default;
};

struct ShiftedExponential {
    double rate;
    double shift;
    bool operator==(const ShiftedExponential&) const = default;
};

struct Deterministic {
    double value;
    bool operator==(const Deterministic&) const = default;
};

struct Uniform {
    double lower;
    double upper;
    bool operator==(const Uniform&) const = default;
};

/// Density x/scale^2 * exp(-x^2 / (2 scale^2)).
struct Rayleigh {
    double scale;
    bool operator==(const Rayleigh&) const = default;
};

struct Erlang {
    int shape;
    double rate;
    bool operator==(const Erlang&) const = default;
};

/// Mixture of exponentials; phase i is chosen with probability weights[i].
struct Hyperexponential {
    std::vector<double> weights;
    std::vector<double> rates;
    bool operator==(const Hyperexponential&) const = default;
};

/// A validated law of a nonnegative random variable (interarrival or service time).
class DistributionSpec {
public:
    using Kind = std::variant<Exponential, ShiftedExponential, Deterministic, Uniform, Rayleigh,
                              Erlang, Hyperexponential>;

    /// Throws InvalidDistribution when a parameter is out of range.
    explicit DistributionSpec(Kind kind);

    static DistributionSpec exponential(double rate) { return DistributionSpec{Exponential{rate}}; }
    static DistributionSpec shifted_exponential(double rate, double shift) {
        return DistributionSpec{ShiftedExponential{rate, shift}};
    }
    static DistributionSpec deterministic(double value) {
        return DistributionSpec{Deterministic{value}};
    }
    static DistributionSpec uniform(double lower, double upper) {
        return DistributionSpec{Uniform{lower, upper}};
    }
    static DistributionSpec rayleigh(double scale) { return DistributionSpec{Rayleigh{scale}}; }
    static DistributionSpec erlang(int shape, double rate) {
        return DistributionSpec{Erlang{shape, rate}};
    }
    static DistributionSpec hyperexponential(std::vector<double> weights, std::vector<double> rates) {
        return DistributionSpec{Hyperexponential{std::move(weights), std::move(rates)}};
    }

    const Kind& kind() const noexcept { return kind_; }

    template <typename T>
    bool is() const noexcept {
        return std::holds_alternative<T>(kind_);
    }

    template <typename T>
    const T& as() const {
        return std::get<T>(kind_);
    }

    /// snake_case name used in the JSON form, e.g. "shifted_exponential".
    std::string_view kind_name() const noexcept;

    bool operator==(const DistributionSpec&) const = default;

private:
    Kind kind_;
};

struct Support {
    double lower;
    double upper;  // +infinity for unbounded laws
};

double sample(const DistributionSpec& dist, Rng& rng);

double mean(const DistributionSpec& dist);
double second_moment(const DistributionSpec& dist);
double variance(const DistributionSpec& dist);

/// Pr(X > x). Point masses use the strict convention: ccdf(Deterministic(v), v) = 0.
double ccdf(const DistributionSpec& dist, double x);
/// Pr(X <= x).
double cdf(const DistributionSpec& dist, double x);
/// Pr(X >= x); differs from ccdf only at a point mass.
double survival_inclusive(const DistributionSpec& dist, double x);

/// False only for Deterministic.
bool has_density(const DistributionSpec& dist);
double density(const DistributionSpec& dist, double x);

Support support(const DistributionSpec& dist);
/// Points where the density or ccdf is not smooth (shift, atom, interval ends).
std::vector<double> breakpoints(const DistributionSpec& dist);

/// Smallest x with cdf(x) >= p, for p in (0, 1).
double quantile(const DistributionSpec& dist, double p);

/// E[exp(-s X)] for s >= 0. Closed form where one exists, quadrature otherwise.
double laplace(const DistributionSpec& dist, double s);

/// E[g(X)] by quadrature against the density, or g at the atom for Deterministic.
/// `extra_breaks` lists kinks of g so the integrator can split there.
double expect(const DistributionSpec& dist, const std::function<double(double)>& g,
              std::span<const double> extra_breaks = {}, double rel_tol = 1e-10);

/// m(t) = E[X - t | X > t], via quadrature of the tail integral of the ccdf.
/// Throws TailEmpty when ccdf(t) = 0.
double mean_residual_life(const DistributionSpec& dist, double t, double rel_tol = 1e-8);

enum class MrlVerdict { DMRL, IMRL, ConstantMRL, Inconclusive };

std::string_view to_string(MrlVerdict verdict) noexcept;

/// Evenly spaced grid on [0, q] with q the `quantile_cap` quantile.
struct MrlGridSpec {
    std::size_t points = 201;
    double quantile_cap = 0.999;
};

struct MrlClassification {
    MrlVerdict verdict = MrlVerdict::Inconclusive;
    std::vector<std::pair<double, double>> grid;  // (t, m(t))
    double tolerance = 0.0;
};

inline constexpr double kDefaultMrlTolerance = 1e-6;

MrlClassification classify_mrl(const DistributionSpec& dist, const MrlGridSpec& grid = {},
                               double tol = kDefaultMrlTolerance);

/// True iff m(t) <= E[X] + tol on every grid point.
bool check_nbue(const DistributionSpec& dist, const MrlGridSpec& grid = {},
                double tol = kDefaultMrlTolerance);

/// Sampled (t, m(t)) on the grid; points with an empty tail are skipped.
std::vector<std::pair<double, double>> mrl_grid(const DistributionSpec& dist, const MrlGridSpec& grid);

}  // namespace aoi
