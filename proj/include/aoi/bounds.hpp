#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/distributions.hpp"

namespace aoi {

enum class BoundKind { CorollaryOneDropping, GM11, MM11, MG11Ordering, CorollaryTwoPreemption, MM11Exact };

/// When a reported value is guaranteed to dominate the exact age.
///  - Unconditional: always an upper bound.
///  - RequiresDMRLandNBUE: upper bound once Y is DMRL and S is NBUE.
///  - ReversedUnderIMRL: Y is IMRL (S NBUE); the value is expected to be a lower bound.
///  - ConditionsUnmet: the classifier could not establish either case.
enum class Applicability { Unconditional, RequiresDMRLandNBUE, ReversedUnderIMRL, ConditionsUnmet };

std::string_view to_string(BoundKind kind) noexcept;
std::string_view to_string(Applicability applicability) noexcept;

struct BoundReport {
    double value = 0.0;
    double ci_half_width = 0.0;  // nonzero only when the inputs were Monte Carlo estimates
    BoundKind kind = BoundKind::CorollaryOneDropping;
    Applicability applicability = Applicability::Unconditional;
    std::vector<std::pair<std::string, double>> inputs;
};

/// E[Y^2]/(2E[Y]) + E[Y] (E[K^2]/(2E[K]) - 1/2) + E[S], for any Y and S under dropping.
BoundReport ub_dropping_general(const DistributionSpec& interarrival, const DistributionSpec& service,
                                const KMoments& k_moments);

/// Dropping with exponential service of rate mu, where K is geometric with
/// p = 1 - E[exp(-mu Y)]:  E[Y^2]/(2E[Y]) + E[Y] (1/p - 1) + 1/mu.
BoundReport ub_dropping_gm(const DistributionSpec& interarrival, double service_rate);

struct MM11Ages {
    BoundReport exact;  // 1/lambda + 2/mu - 1/(lambda + mu)
    BoundReport bound;  // 1/lambda + 2/mu
};

MM11Ages mm11(double arrival_rate, double service_rate);

/// Age of the M/G/1/1 dropping system whose exponential interarrivals share the
/// mean of Y: E[(Y_e + S)^2] / (2 E[Y_e + S]) + E[S]. Depends on Y only through its mean.
/// The report is labelled RequiresDMRLandNBUE; use `label_ordering` to classify.
BoundReport mg11_ordering_bound(double mean_interarrival, const DistributionSpec& service);

Applicability ordering_applicability(MrlVerdict interarrival_verdict, bool service_nbue) noexcept;

/// Classifies Y and S and sets the applicability of an MG11Ordering report.
void label_ordering(BoundReport& report, const DistributionSpec& interarrival,
                    const DistributionSpec& service);

/// E[Y^2]/(2E[Y]) + E[Y] (1 - p)/p + E[S | S <= Y] with p = Pr(S <= Y).
/// Throws ZeroSuccessProbability when p = 0.
BoundReport ub_preemption(const DistributionSpec& interarrival, const DistributionSpec& service,
                          const EstimatorOptions& opts = {});

}  // namespace aoi
