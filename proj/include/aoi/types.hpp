#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace aoi {

enum class Discipline { Dropping, PreemptionInService };

/// "dropping" or "preemption".
std::string_view to_string(Discipline discipline) noexcept;
/// Accepts "dropping", "preemption" and "preemption_in_service"; throws InvalidArgument otherwise.
Discipline parse_discipline(std::string_view text);

enum class EstimateMethod { Simulation, Analytic, Bound };

std::string_view to_string(EstimateMethod method) noexcept;

/// Point estimate of the time-average age with a 95% confidence half-width.
struct AgeEstimate {
    double value = 0.0;
    double ci_half_width = 0.0;
    std::uint64_t cycles_used = 0;  // cycles or Monte Carlo replicates behind the value
    EstimateMethod method = EstimateMethod::Simulation;
};

/// Cycle-count weighted combination of independent estimates.
AgeEstimate merge_estimates(std::span<const AgeEstimate> parts);

inline constexpr double kNormalQuantile95 = 1.959963984540054;

}  // namespace aoi
