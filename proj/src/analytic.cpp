#include "aoi/analytic.hpp"

#include <array>
#include <cmath>
#include <string>

#include "aoi/detail/moments.hpp"
#include "aoi/detail/parallel.hpp"
#include "aoi/errors.hpp"

namespace aoi {
namespace {

constexpr std::size_t kChunks = 64;

// Per-replicate totals along one path of the partial-sum walk.
struct WalkTotals {
    double arrivals = 0.0;     // sum_k Pr(A_k < S | path)
    double arrivals_sq = 0.0;  // sum_k (2k - 1) Pr(A_k < S | path)
    double crossing = 0.0;     // sum_k A_k Pr(A_k < S | path)
};

// k = 1 is the successful arrival itself (A_1 = 0, I_1 = 1). Terms for k >= 2
// condition on the path only through A_k, with S integrated out by its ccdf.
WalkTotals walk_once(const DistributionSpec& y, const DistributionSpec& s, double eps, Rng& rng) {
    WalkTotals t{1.0, 1.0, 0.0};
    double partial = 0.0;
    for (std::uint64_t k = 2;; ++k) {
        if (k > kMaxWalkTerms)
            throw TruncationNotReached("partial-sum walk still above tolerance after " +
                                       std::to_string(kMaxWalkTerms) + " terms");
        partial += sample(y, rng);
        const double w = ccdf(s, partial);
        if (w == 0.0) break;
        const double odd = static_cast<double>(2 * k - 1);
        t.arrivals += w;
        t.arrivals_sq += odd * w;
        t.crossing += partial * w;
        if (w <= eps * t.arrivals && partial * w <= eps * t.crossing && odd * w <= eps * t.arrivals_sq) break;
    }
    return t;
}

ValueWithCi mean_ci(const detail::CoMoments<3>& m, std::size_t i) {
    return {m.mean[i], kNormalQuantile95 * m.std_error(i)};
}

// Delta method for mean[num] / mean[den].
ValueWithCi ratio_ci(const detail::CoMoments<3>& m, std::size_t num, std::size_t den) {
    const double r = m.mean[num] / m.mean[den];
    if (m.n < 2) return {r, 0.0};
    const double var = (m.covariance(num, num) - 2.0 * r * m.covariance(num, den) +
                        r * r * m.covariance(den, den)) /
                       (m.mean[den] * m.mean[den] * static_cast<double>(m.n));
    return {r, kNormalQuantile95 * std::sqrt(std::max(0.0, var))};
}

double renewal_term(const DistributionSpec& y) { return second_moment(y) / (2.0 * mean(y)); }

void require_positive_mean(const DistributionSpec& y) {
    if (!(mean(y) > 0.0)) throw InvalidArgument("interarrival mean must be > 0");
}

}  // namespace

void EstimatorOptions::validate() const {
    if (mc_samples < 10'000) throw InvalidArgument("mc_samples must be >= 10000");
    auto in_range = [](double x) { return x > 0.0 && x < 1e-2; };
    if (!in_range(k_truncation_epsilon)) throw InvalidArgument("k_truncation_epsilon must lie in (0, 1e-2)");
    if (!in_range(quadrature_rel_tol)) throw InvalidArgument("quadrature_rel_tol must lie in (0, 1e-2)");
}

DroppingSums dropping_sums(const DistributionSpec& interarrival, const DistributionSpec& service,
                           const EstimatorOptions& opts) {
    opts.validate();
    require_positive_mean(interarrival);
    DroppingSums out;

    if (!opts.force_generic && interarrival.is<Exponential>() && service.is<Exponential>()) {
        const double lambda = interarrival.as<Exponential>().rate;
        const double mu = service.as<Exponential>().rate;
        const double p = mu / (lambda + mu);  // K is geometric
        out.expected_arrivals = {1.0 / p, 0.0};
        out.expected_arrivals_sq = {(2.0 - p) / (p * p), 0.0};
        out.crossing_sum = {lambda / (mu * mu), 0.0};
        out.crossing_ratio = {out.crossing_sum.value / out.expected_arrivals.value, 0.0};
        out.closed_form = true;
        return out;
    }

    // A deterministic walk has zero variance; one path is the exact answer.
    const std::uint64_t replicates = interarrival.is<Deterministic>() ? 1 : opts.mc_samples;
    const std::size_t chunks = std::min<std::uint64_t>(kChunks, replicates);
    const double eps = opts.k_truncation_epsilon;

    auto parts = detail::run_chunks<detail::CoMoments<3>>(chunks, opts.threads, [&](std::size_t c) {
        Rng rng = make_rng(derive_seed(opts.seed, c));
        detail::CoMoments<3> acc;
        const std::size_t n = detail::chunk_size(replicates, chunks, c);
        for (std::size_t r = 0; r < n; ++r) {
            const auto t = walk_once(interarrival, service, eps, rng);
            acc.add({t.crossing, t.arrivals, t.arrivals_sq});
        }
        return acc;
    });
    detail::CoMoments<3> all;
    for (const auto& p : parts) all.merge(p);

    out.crossing_sum = mean_ci(all, 0);
    out.expected_arrivals = mean_ci(all, 1);
    out.expected_arrivals_sq = mean_ci(all, 2);
    out.crossing_ratio = ratio_ci(all, 0, 1);
    out.replicates = all.n;
    return out;
}

AgeEstimate exact_age_dropping(const DistributionSpec& interarrival, const DistributionSpec& service,
                               const EstimatorOptions& opts) {
    const auto sums = dropping_sums(interarrival, service, opts);
    AgeEstimate est;
    est.method = EstimateMethod::Analytic;
    est.value = renewal_term(interarrival) + sums.crossing_ratio.value + mean(service);
    est.ci_half_width = sums.crossing_ratio.ci_half_width;
    est.cycles_used = sums.replicates;
    return est;
}

KMoments moments_of_K_dropping(const DistributionSpec& interarrival, const DistributionSpec& service,
                               const EstimatorOptions& opts) {
    const auto sums = dropping_sums(interarrival, service, opts);
    return {sums.expected_arrivals, sums.expected_arrivals_sq};
}

KPmf k_pmf(const DistributionSpec& interarrival, const DistributionSpec& service, std::uint64_t k_max,
           const EstimatorOptions& opts) {
    opts.validate();
    if (k_max < 1) throw InvalidArgument("k_max must be >= 1");
    if (k_max > kMaxWalkTerms) throw InvalidArgument("k_max exceeds the walk term cap");
    require_positive_mean(interarrival);

    const std::uint64_t replicates = interarrival.is<Deterministic>() ? 1 : opts.mc_samples;
    const std::size_t chunks = std::min<std::uint64_t>(kChunks, replicates);
    const std::size_t dim = k_max + 1;  // Pr(K = 1..k_max) and the tail

    auto parts = detail::run_chunks<detail::VectorMoments>(chunks, opts.threads, [&](std::size_t c) {
        Rng rng = make_rng(derive_seed(opts.seed, c));
        detail::VectorMoments acc(dim);
        std::vector<double> survive(dim + 1, 0.0);  // Pr(K >= k | path), k = 1..k_max+1
        std::vector<double> row(dim, 0.0);
        const std::size_t n = detail::chunk_size(replicates, chunks, c);
        for (std::size_t r = 0; r < n; ++r) {
            std::fill(survive.begin(), survive.end(), 0.0);
            survive[1] = 1.0;
            double partial = 0.0;
            for (std::size_t k = 2; k <= k_max + 1; ++k) {
                partial += sample(interarrival, rng);
                survive[k] = ccdf(service, partial);
                if (survive[k] == 0.0) break;
            }
            for (std::size_t k = 1; k <= k_max; ++k) row[k - 1] = survive[k] - survive[k + 1];
            row[k_max] = survive[k_max + 1];
            acc.add(row);
        }
        return acc;
    });
    detail::VectorMoments all(dim);
    for (const auto& p : parts) all.merge(p);

    KPmf out;
    for (std::size_t k = 0; k < k_max; ++k) {
        out.probabilities.push_back(all.mean[k]);
        out.ci_half_widths.push_back(kNormalQuantile95 * all.std_error(k));
    }
    out.tail_mass = all.mean[k_max];
    return out;
}

double success_probability(const DistributionSpec& interarrival, const DistributionSpec& service,
                           const EstimatorOptions& opts) {
    // Pr(S <= Y) = E[F_S(Y)]; F_S includes any atom of S, so ties count as delivered.
    const auto breaks = breakpoints(service);
    return expect(interarrival, [&](double y) { return cdf(service, y); }, breaks, opts.quadrature_rel_tol);
}

double preempted_interarrival_mass(const DistributionSpec& interarrival, const DistributionSpec& service,
                                   const EstimatorOptions& opts) {
    const auto breaks = breakpoints(service);
    return expect(interarrival, [&](double y) { return y * ccdf(service, y); }, breaks,
                  opts.quadrature_rel_tol);
}

double conditional_mean_service(const DistributionSpec& interarrival, const DistributionSpec& service,
                                const EstimatorOptions& opts) {
    const double p = success_probability(interarrival, service, opts);
    if (!(p > 0.0)) throw ZeroSuccessProbability("Pr(S <= Y) = 0, no update is ever delivered");
    // E[S; S <= Y] = E[S Pr(Y >= S | S)].
    const auto breaks = breakpoints(interarrival);
    const double joint = expect(service, [&](double s) { return s * survival_inclusive(interarrival, s); },
                                breaks, opts.quadrature_rel_tol);
    return joint / p;
}

AgeEstimate exact_age_preemption(const DistributionSpec& interarrival, const DistributionSpec& service,
                                 const EstimatorOptions& opts) {
    opts.validate();
    require_positive_mean(interarrival);
    const double p = success_probability(interarrival, service, opts);
    if (!(p > 0.0)) throw ZeroSuccessProbability("Pr(S <= Y) = 0, no update is ever delivered");

    const double mass = preempted_interarrival_mass(interarrival, service, opts);
    const double denominator =
        opts.preemption_denominator == PreemptionDenominator::SuccessProbability ? p : 1.0 - p;
    const double middle = denominator > 0.0 ? mass / denominator : 0.0;

    AgeEstimate est;
    est.method = EstimateMethod::Analytic;
    est.value = renewal_term(interarrival) + middle + conditional_mean_service(interarrival, service, opts);
    est.ci_half_width = 0.0;  // quadrature only
    est.cycles_used = 0;
    return est;
}

AgeEstimate exact_age(Discipline discipline, const DistributionSpec& interarrival,
                      const DistributionSpec& service, const EstimatorOptions& opts) {
    return discipline == Discipline::Dropping ? exact_age_dropping(interarrival, service, opts)
                                              : exact_age_preemption(interarrival, service, opts);
}

}  // namespace aoi
