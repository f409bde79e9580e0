#pragma once

#include <cstdint>
#include <vector>

#include "aoi/distributions.hpp"
#include "aoi/types.hpp"

namespace aoi {

/// Which denominator the preemption middle term uses.
///
/// `SuccessProbability` divides E[Y F_S^c(Y)] by Pr(S <= Y), which is what the
/// renewal derivation gives and what the simulator reproduces.
/// `PrintedCcdfMean` divides by E[F_S^c(Y)] instead and is kept only for comparison.
enum class PreemptionDenominator { SuccessProbability, PrintedCcdfMean };

struct EstimatorOptions {
    std::uint64_t mc_samples = 1'000'000;
    double k_truncation_epsilon = 1e-8;
    double quadrature_rel_tol = 1e-9;
    std::uint64_t seed = 1;
    /// Skip closed-form shortcuts (both laws exponential) and run the generic estimator.
    bool force_generic = false;
    PreemptionDenominator preemption_denominator = PreemptionDenominator::SuccessProbability;
    /// Worker threads for Monte Carlo replicates; 0 picks the hardware concurrency.
    /// Results do not depend on this value.
    unsigned threads = 0;

    /// Throws InvalidArgument unless mc_samples >= 1e4 and tolerances lie in (0, 1e-2).
    void validate() const;
};

/// Maximum number of walk terms before TruncationNotReached.
inline constexpr std::uint64_t kMaxWalkTerms = 10'000;

struct ValueWithCi {
    double value = 0.0;
    double ci_half_width = 0.0;
};

struct KMoments {
    ValueWithCi first;   // E[K]
    ValueWithCi second;  // E[K^2]
};

struct KPmf {
    std::vector<double> probabilities;  // Pr(K = k) for k = 1..k_max
    std::vector<double> ci_half_widths;
    double tail_mass = 0.0;  // Pr(K > k_max)
};

/// Sums behind the exact dropping age, estimated along sample paths of the
/// partial sums A_k = Y_1 + ... + Y_{k-1}:
///   expected_arrivals = sum_k Pr(A_k < S) = E[K]
///   crossing_sum      = sum_k E[A_k F_S^c(A_k)]
struct DroppingSums {
    ValueWithCi expected_arrivals;
    ValueWithCi expected_arrivals_sq;
    ValueWithCi crossing_sum;
    ValueWithCi crossing_ratio;  // crossing_sum / expected_arrivals
    std::uint64_t replicates = 0;
    bool closed_form = false;
};

DroppingSums dropping_sums(const DistributionSpec& interarrival, const DistributionSpec& service,
                           const EstimatorOptions& opts);

/// Exact average age under dropping:
///   E[Y^2]/(2E[Y]) + sum_k E[A_k F_S^c(A_k)] / E[K] + E[S].
/// Throws TruncationNotReached if a walk does not settle within kMaxWalkTerms.
AgeEstimate exact_age_dropping(const DistributionSpec& interarrival, const DistributionSpec& service,
                               const EstimatorOptions& opts = {});

KMoments moments_of_K_dropping(const DistributionSpec& interarrival, const DistributionSpec& service,
                               const EstimatorOptions& opts = {});

/// Monte Carlo estimate of Pr(K = k), k = 1..k_max, under dropping.
KPmf k_pmf(const DistributionSpec& interarrival, const DistributionSpec& service, std::uint64_t k_max,
           const EstimatorOptions& opts = {});

/// Pr(S <= Y): an arrival whose service ends no later than the next arrival is delivered.
double success_probability(const DistributionSpec& interarrival, const DistributionSpec& service,
                           const EstimatorOptions& opts = {});

/// E[S | S <= Y]. Throws ZeroSuccessProbability when Pr(S <= Y) = 0.
double conditional_mean_service(const DistributionSpec& interarrival, const DistributionSpec& service,
                                const EstimatorOptions& opts = {});

/// E[Y F_S^c(Y)] = E[Y; S > Y], the mass of interarrivals that end a service attempt.
double preempted_interarrival_mass(const DistributionSpec& interarrival, const DistributionSpec& service,
                                   const EstimatorOptions& opts = {});

/// Exact average age under preemption in service:
///   E[Y^2]/(2E[Y]) + E[Y F_S^c(Y)] / Pr(S <= Y) + E[S | S <= Y].
/// Throws ZeroSuccessProbability when no update can complete.
AgeEstimate exact_age_preemption(const DistributionSpec& interarrival, const DistributionSpec& service,
                                 const EstimatorOptions& opts = {});

AgeEstimate exact_age(Discipline discipline, const DistributionSpec& interarrival,
                      const DistributionSpec& service, const EstimatorOptions& opts = {});

}  // namespace aoi
