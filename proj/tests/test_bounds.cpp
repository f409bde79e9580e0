#include <doctest.h>

#include <cmath>
#include <vector>

#include "aoi/bounds.hpp"
#include "aoi/errors.hpp"
#include "oracles.hpp"

using namespace aoi;

namespace {

EstimatorOptions mc(std::uint64_t seed = 1) {
    EstimatorOptions o;
    o.mc_samples = 100'000;
    o.seed = seed;
    return o;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("M/M/1/1 exact age and bound") {
    const auto mm = mm11(1.0, 1.0);
    CHECK(mm.exact.value == doctest::Approx(2.5));
    CHECK(mm.bound.value == doctest::Approx(3.0));
    CHECK(mm.exact.kind == BoundKind::MM11Exact);
    CHECK(mm.bound.kind == BoundKind::MM11);
    CHECK(mm.bound.applicability == Applicability::Unconditional);
    CHECK_THROWS_AS(mm11(0.0, 1.0), InvalidArgument);
}

TEST_CASE("general dropping bound reduces to the M/M/1/1 bound") {
    const auto y = DistributionSpec::exponential(1.0);
    const auto s = DistributionSpec::exponential(1.0);
    const auto b = ub_dropping_general(y, s, moments_of_K_dropping(y, s, mc()));
    CHECK(b.value == doctest::Approx(3.0));
    CHECK(ub_dropping_gm(y, 1.0).value == doctest::Approx(3.0));
    CHECK(b.kind == BoundKind::CorollaryOneDropping);
}

TEST_CASE("bounds specialize exactly") {
    const double mu = 1.3;
    for (const auto& y : {DistributionSpec::uniform(0.0, 2.0), DistributionSpec::rayleigh(0.7),
                          DistributionSpec::deterministic(0.9), DistributionSpec::exponential(0.6)}) {
        CAPTURE(y.kind_name());
        // With exponential service K is geometric with p = 1 - E[exp(-mu Y)].
        const double p = 1 - laplace(y, mu);
        const KMoments geometric{{1 / p, 0.0}, {(2 - p) / (p * p), 0.0}};
        const auto general = ub_dropping_general(y, DistributionSpec::exponential(mu), geometric);
        CHECK(std::abs(general.value - ub_dropping_gm(y, mu).value) <= 1e-12 * general.value);
    }
    const auto gm = ub_dropping_gm(DistributionSpec::exponential(0.6), mu);
    CHECK(std::abs(gm.value - mm11(0.6, mu).bound.value) <= 1e-12 * gm.value);
}

TEST_CASE("geometric bound for exponential service") {
    // Deterministic Y = 1 with mu = 1: p = 1 - e^{-1}.
    const double p = 1 - std::exp(-1.0);
    const auto b = ub_dropping_gm(DistributionSpec::deterministic(1.0), 1.0);
    CHECK(b.value == doctest::Approx(0.5 + (1 / p - 1) + 1.0));
    CHECK(b.kind == BoundKind::GM11);
    CHECK_THROWS_AS(ub_dropping_gm(DistributionSpec::deterministic(1.0), 0.0), InvalidArgument);
}

TEST_CASE("general dropping bound is tight for deterministic interarrivals") {
    const auto y = DistributionSpec::deterministic(1.0);
    for (const auto& s : {DistributionSpec::deterministic(2.5), DistributionSpec::uniform(0.0, 3.0),
                          DistributionSpec::exponential(0.7)}) {
        CAPTURE(s.kind_name());
        const auto k = moments_of_K_dropping(y, s, mc());
        const auto b = ub_dropping_general(y, s, k);
        const auto e = exact_age_dropping(y, s, mc());
        CHECK(std::abs(b.value - e.value) <= 3 * (b.ci_half_width + e.ci_half_width) + 1e-12);
    }
}

TEST_CASE("bounds dominate the exact age across families") {
    const std::vector<DistributionSpec> ys = {DistributionSpec::exponential(1.2),
                                              DistributionSpec::uniform(0.0, 1.5),
                                              DistributionSpec::hyperexponential({0.4, 0.6}, {0.5, 3.0})};
    const std::vector<DistributionSpec> ss = {DistributionSpec::exponential(1.0), DistributionSpec::rayleigh(0.6),
                                              DistributionSpec::shifted_exponential(2.0, 0.2)};
    for (const auto& y : ys)
        for (const auto& s : ss) {
            CAPTURE(y.kind_name());
            CAPTURE(s.kind_name());
            const auto e = exact_age_dropping(y, s, mc());
            const auto c1 = ub_dropping_general(y, s, moments_of_K_dropping(y, s, mc()));
            CHECK(c1.value >= e.value - 3 * (e.ci_half_width + c1.ci_half_width));
            if (s.is<Exponential>()) CHECK(ub_dropping_gm(y, s.as<Exponential>().rate).value >= e.value - 3 * e.ci_half_width);

            const auto pe = exact_age_preemption(y, s);
            const auto c2 = ub_preemption(y, s);
            CHECK(c2.value >= pe.value - 1e-9);
            CHECK(c2.kind == BoundKind::CorollaryTwoPreemption);
        }
}

TEST_CASE("preemption bound is tight when every update is delivered") {
    const auto y = DistributionSpec::deterministic(2.0);
    const auto s = DistributionSpec::deterministic(1.0);
    CHECK(ub_preemption(y, s).value == doctest::Approx(exact_age_preemption(y, s).value));
    CHECK_THROWS_AS(ub_preemption(DistributionSpec::deterministic(1.0), DistributionSpec::deterministic(2.0)),
                    ZeroSuccessProbability);
}

TEST_CASE("ordering bound is exact for exponential interarrivals") {
    const auto s = DistributionSpec::rayleigh(0.5);
    const double lambda = 0.8;
    const auto b = mg11_ordering_bound(1 / lambda, s);
    CHECK(b.value == doctest::Approx(oracle::mg11_dropping(lambda, mean(s), second_moment(s))));
    CHECK(b.kind == BoundKind::MG11Ordering);
}

TEST_CASE("ordering bound labels follow the mrl classes") {
    const auto nbue = DistributionSpec::shifted_exponential(1.0, 0.1);
    auto label = [&](const DistributionSpec& y, const DistributionSpec& s) {
        auto b = mg11_ordering_bound(mean(y), s);
        label_ordering(b, y, s);
        return b.applicability;
    };
    CHECK(label(DistributionSpec::shifted_exponential(1.0, 0.5), nbue) == Applicability::RequiresDMRLandNBUE);
    CHECK(label(DistributionSpec::exponential(1.0), nbue) == Applicability::RequiresDMRLandNBUE);
    CHECK(label(DistributionSpec::hyperexponential({0.5, 0.5}, {0.5, 2.0}), nbue) ==
          Applicability::ReversedUnderIMRL);
    CHECK(label(DistributionSpec::shifted_exponential(1.0, 0.5), DistributionSpec::hyperexponential({0.5, 0.5}, {0.5, 2.0})) ==
          Applicability::ConditionsUnmet);

    CHECK(ordering_applicability(MrlVerdict::DMRL, true) == Applicability::RequiresDMRLandNBUE);
    CHECK(ordering_applicability(MrlVerdict::ConstantMRL, true) == Applicability::RequiresDMRLandNBUE);
    CHECK(ordering_applicability(MrlVerdict::IMRL, true) == Applicability::ReversedUnderIMRL);
    CHECK(ordering_applicability(MrlVerdict::Inconclusive, true) == Applicability::ConditionsUnmet);
    CHECK(ordering_applicability(MrlVerdict::DMRL, false) == Applicability::ConditionsUnmet);
}

TEST_CASE("ordering bound holds for DMRL and reverses for IMRL") {
    const auto s = DistributionSpec::shifted_exponential(1.0, 0.1);
    const auto dmrl = DistributionSpec::shifted_exponential(1.0, 1.0);
    const auto e1 = exact_age_dropping(dmrl, s, mc());
    CHECK(e1.value <= mg11_ordering_bound(mean(dmrl), s).value + 3 * e1.ci_half_width);

    const auto imrl = DistributionSpec::hyperexponential({0.5, 0.5}, {0.5, 2.0});
    const auto e2 = exact_age_dropping(imrl, s, mc());
    CHECK(e2.value >= mg11_ordering_bound(mean(imrl), s).value - 3 * e2.ci_half_width);
}

TEST_CASE("bound reports list their inputs") {
    const auto y = DistributionSpec::uniform(0.0, 2.0);
    const auto s = DistributionSpec::rayleigh(0.5);
    const auto b = ub_preemption(y, s);
    CHECK_FALSE(b.inputs.empty());
    for (const auto& [name, value] : b.inputs) {
        CHECK_FALSE(name.empty());
        CHECK(std::isfinite(value));
    }
    CHECK(to_string(BoundKind::CorollaryOneDropping) == "corollary1");
    CHECK(to_string(Applicability::ReversedUnderIMRL) == "reversed_under_imrl");
}

}  // TEST_SUITE
