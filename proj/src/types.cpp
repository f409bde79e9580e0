#include "aoi/types.hpp"

#include <cmath>

#include "aoi/errors.hpp"

namespace aoi {

std::string_view to_string(Discipline discipline) noexcept {
    return discipline == Discipline::Dropping ? "dropping" : "preemption";
}

Discipline parse_discipline(std::string_view text) {
    if (text == "dropping") return Discipline::Dropping;
    if (text == "preemption" || text == "preemption_in_service") return Discipline::PreemptionInService;
    throw InvalidArgument("unknown discipline \"" + std::string(text) + "\"");
}

std::string_view to_string(EstimateMethod method) noexcept {
    switch (method) {
        case EstimateMethod::Simulation: return "simulation";
        case EstimateMethod::Analytic: return "analytic";
        case EstimateMethod::Bound: return "bound";
    }
    return "simulation";
}

AgeEstimate merge_estimates(std::span<const AgeEstimate> parts) {
    if (parts.empty()) throw InvalidArgument("nothing to merge");
    double total = 0.0;
    for (const auto& p : parts) total += static_cast<double>(p.cycles_used);
    if (!(total > 0.0)) throw InvalidArgument("merged estimates carry no cycles");
    AgeEstimate out;
    out.method = parts.front().method;
    double var = 0.0;
    for (const auto& p : parts) {
        const double w = static_cast<double>(p.cycles_used) / total;
        out.value += w * p.value;
        var += w * w * p.ci_half_width * p.ci_half_width;
        out.cycles_used += p.cycles_used;
    }
    out.ci_half_width = std::sqrt(var);
    return out;
}

}  // namespace aoi
