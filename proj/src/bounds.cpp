#include "aoi/bounds.hpp"

#include <cmath>

#include "aoi/errors.hpp"

namespace aoi {
namespace {

double renewal_term(const DistributionSpec& y) { return second_moment(y) / (2.0 * mean(y)); }

void require_positive_mean(const DistributionSpec& y) {
    if (!(mean(y) > 0.0)) throw InvalidArgument("interarrival mean must be > 0");
}

}  // namespace

std::string_view to_string(BoundKind kind) noexcept {
    switch (kind) {
        case BoundKind::CorollaryOneDropping: return "corollary1";
        case BoundKind::GM11: return "gm11";
        case BoundKind::MM11: return "mm11";
        case BoundKind::MG11Ordering: return "mg11";
        case BoundKind::CorollaryTwoPreemption: return "corollary2";
        case BoundKind::MM11Exact: return "mm11_exact";
    }
    return "corollary1";
}

std::string_view to_string(Applicability applicability) noexcept {
    switch (applicability) {
        case Applicability::Unconditional: return "unconditional";
        case Applicability::RequiresDMRLandNBUE: return "requires_dmrl_nbue";
        case Applicability::ReversedUnderIMRL: return "reversed_under_imrl";
        case Applicability::ConditionsUnmet: return "conditions_unmet";
    }
    return "conditions_unmet";
}

BoundReport ub_dropping_general(const DistributionSpec& interarrival, const DistributionSpec& service,
                                const KMoments& k) {
    require_positive_mean(interarrival);
    const double ey = mean(interarrival);
    const double ratio = k.second.value / k.first.value;

    BoundReport r;
    r.kind = BoundKind::CorollaryOneDropping;
    r.value = renewal_term(interarrival) + ey * (0.5 * ratio - 0.5) + mean(service);
    // Marginal CIs only; adding relative errors is conservative for a positively correlated ratio.
    const double rel = k.second.ci_half_width / k.second.value + k.first.ci_half_width / k.first.value;
    r.ci_half_width = 0.5 * ey * ratio * rel;
    r.inputs = {{"mean_k", k.first.value}, {"second_moment_k", k.second.value}};
    return r;
}

BoundReport ub_dropping_gm(const DistributionSpec& interarrival, double service_rate) {
    require_positive_mean(interarrival);
    if (!(service_rate > 0.0)) throw InvalidArgument("service rate must be > 0");
    const double p = 1.0 - laplace(interarrival, service_rate);

    BoundReport r;
    r.kind = BoundKind::GM11;
    r.value = renewal_term(interarrival) + mean(interarrival) * (1.0 / p - 1.0) + 1.0 / service_rate;
    r.inputs = {{"service_rate", service_rate}, {"success_probability", p}};
    return r;
}

MM11Ages mm11(double arrival_rate, double service_rate) {
    if (!(arrival_rate > 0.0) || !(service_rate > 0.0)) throw InvalidArgument("rates must be > 0");
    const double base = 1.0 / arrival_rate + 2.0 / service_rate;
    std::vector<std::pair<std::string, double>> inputs{{"arrival_rate", arrival_rate},
                                                       {"service_rate", service_rate}};
    MM11Ages out;
    out.exact = {base - 1.0 / (arrival_rate + service_rate), 0.0, BoundKind::MM11Exact,
                 Applicability::Unconditional, inputs};
    out.bound = {base, 0.0, BoundKind::MM11, Applicability::Unconditional, inputs};
    return out;
}

BoundReport mg11_ordering_bound(double mean_interarrival, const DistributionSpec& service) {
    if (!(mean_interarrival > 0.0)) throw InvalidArgument("mean interarrival must be > 0");
    const double m = mean_interarrival;
    const double es = mean(service);
    const double es2 = second_moment(service);

    BoundReport r;
    r.kind = BoundKind::MG11Ordering;
    r.applicability = Applicability::RequiresDMRLandNBUE;
    r.value = (2.0 * m * m + 2.0 * m * es + es2) / (2.0 * (m + es)) + es;
    r.inputs = {{"mean_interarrival", m}};
    return r;
}

Applicability ordering_applicability(MrlVerdict interarrival_verdict, bool service_nbue) noexcept {
    if (!service_nbue) return Applicability::ConditionsUnmet;
    switch (interarrival_verdict) {
        case MrlVerdict::DMRL:
        case MrlVerdict::ConstantMRL: return Applicability::RequiresDMRLandNBUE;
        case MrlVerdict::IMRL: return Applicability::ReversedUnderIMRL;
        case MrlVerdict::Inconclusive: return Applicability::ConditionsUnmet;
    }
    return Applicability::ConditionsUnmet;
}

void label_ordering(BoundReport& report, const DistributionSpec& interarrival,
                    const DistributionSpec& service) {
    report.applicability =
        ordering_applicability(classify_mrl(interarrival).verdict, check_nbue(service));
}

BoundReport ub_preemption(const DistributionSpec& interarrival, const DistributionSpec& service,
                          const EstimatorOptions& opts) {
    require_positive_mean(interarrival);
    const double p = success_probability(interarrival, service, opts);
    if (!(p > 0.0)) throw ZeroSuccessProbability("Pr(S <= Y) = 0, no update is ever delivered");

    BoundReport r;
    r.kind = BoundKind::CorollaryTwoPreemption;
    r.value = renewal_term(interarrival) + mean(interarrival) * (1.0 - p) / p +
              conditional_mean_service(interarrival, service, opts);
    r.inputs = {{"success_probability", p}};
    return r;
}

}  // namespace aoi
