// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Pass --verbose for the per-point numbers behind each line.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "aoi/analytic.hpp"
#include "aoi/bounds.hpp"
#include "aoi/errors.hpp"
#include "aoi/experiments.hpp"
#include "aoi/sim.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace aoi;

namespace {

bool verbose = false;

struct Criterion {
    int id;
    std::string title;
    bool pass = true;
    std::vector<std::string> failures;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            failures.push_back(what);
        }
        if (verbose) std::cout << "    " << (ok ? "ok   " : "FAIL ") << what << '\n';
    }
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

int report(const Criterion& c) {
    std::cout << (c.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.title << '\n';
    if (!c.pass && !verbose)
        for (const auto& f : c.failures) std::cout << "    " << f << '\n';
    std::cout.flush();
    return c.pass ? 0 : 1;
}

SimResult simulate(const DistributionSpec& y, const DistributionSpec& s, Discipline d, std::uint64_t cycles,
                   std::uint64_t seed) {
    return run_simulation({.interarrival = y, .service = s, .discipline = d, .target_cycles = cycles, .seed = seed});
}

const double kRates[] = {0.5, 1.0, 2.0};

Criterion mm11_dropping() {
    Criterion c{1, "M/M/1/1 dropping: simulation within 2%, exact estimator within 0.5% of the closed form"};
    EstimatorOptions o;
    o.force_generic = true;  // exercise the Monte Carlo walk, not the closed-form shortcut
    std::uint64_t seed = 100;
    for (double l : kRates)
        for (double m : kRates) {
            const double truth = oracle::mm11_dropping(l, m);
            const auto sim = simulate(DistributionSpec::exponential(l), DistributionSpec::exponential(m),
                                      Discipline::Dropping, 100'000, ++seed);
            o.seed = seed;
            const auto ex = exact_age_dropping(DistributionSpec::exponential(l), DistributionSpec::exponential(m), o);
            const double es = std::abs(sim.estimate.value / truth - 1);
            const double ee = std::abs(ex.value / truth - 1);
            c.check(es <= 0.02, fmt("lambda=%g mu=%g closed=%.6f sim=%.6f (%.3f%%)", l, m, truth,
                                    sim.estimate.value, 100 * es));
            c.check(ee <= 0.005, fmt("lambda=%g mu=%g closed=%.6f exact=%.6f (%.4f%%)", l, m, truth, ex.value,
                                     100 * ee));
        }
    return c;
}

Criterion mm11_preemption() {
    Criterion c{2, "M/M/1/1 preemption: exact equals 1/lambda + 1/mu, simulation within 2%"};
    std::uint64_t seed = 200;
    for (double l : kRates)
        for (double m : kRates) {
            const double truth = oracle::mm11_preemption(l, m);
            const auto ex = exact_age_preemption(DistributionSpec::exponential(l), DistributionSpec::exponential(m));
            const auto sim = simulate(DistributionSpec::exponential(l), DistributionSpec::exponential(m),
                                      Discipline::PreemptionInService, 100'000, ++seed);
            const double es = std::abs(sim.estimate.value / truth - 1);
            c.check(std::abs(ex.value / truth - 1) <= 1e-8,
                    fmt("lambda=%g mu=%g closed=%.10f exact=%.10f", l, m, truth, ex.value));
            c.check(es <= 0.02, fmt("lambda=%g mu=%g closed=%.6f sim=%.6f (%.3f%%)", l, m, truth,
                                    sim.estimate.value, 100 * es));
        }
    return c;
}

Criterion bound_domination() {
    Criterion c{3, "bounds dominate the exact age and are tight for deterministic interarrivals"};
    EstimatorOptions o;
    o.mc_samples = 200'000;
    const std::vector<std::pair<std::string, DistributionSpec>> families = {
        {"shifted_exponential", DistributionSpec::shifted_exponential(2.0, 0.5)},
        {"uniform", DistributionSpec::uniform(0.0, 2.0)},
        {"hyperexponential", DistributionSpec::hyperexponential({0.5, 0.5}, {0.5, 2.0})},
    };
    const double frequencies[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    const auto drop_service = DistributionSpec::exponential(1.0);
    const auto pre_service = DistributionSpec::shifted_exponential(2.0, 0.1);
    std::uint64_t seed = 300;
    for (const auto& [name, base] : families)
        for (double f : frequencies) {
            const auto y = with_parameter(base, "frequency", f);
            o.seed = ++seed;
            const auto ex = exact_age_dropping(y, drop_service, o);
            const auto dominates = [&](const BoundReport& b) {
                const double slack = 3 * (ex.ci_half_width + b.ci_half_width);
                c.check(b.value >= ex.value - slack, fmt("dropping %s f=%g %s=%.5f exact=%.5f +- %.5f", name.c_str(),
                                                         f, std::string(to_string(b.kind)).c_str(), b.value,
                                                         ex.value, ex.ci_half_width));
            };
            dominates(ub_dropping_general(y, drop_service, moments_of_K_dropping(y, drop_service, o)));
            dominates(ub_dropping_gm(y, 1.0));
            auto mg = mg11_ordering_bound(mean(y), drop_service);
            label_ordering(mg, y, drop_service);
            if (mg.applicability == Applicability::RequiresDMRLandNBUE) dominates(mg);

            const auto pe = exact_age_preemption(y, pre_service, o);
            const auto c2 = ub_preemption(y, pre_service, o);
            c.check(c2.value >= pe.value - 3 * pe.ci_half_width - 1e-12,
                    fmt("preemption %s f=%g corollary2=%.6f exact=%.6f", name.c_str(), f, c2.value, pe.value));
        }

    const auto det = DistributionSpec::deterministic(1.0);
    for (const auto& s : {DistributionSpec::exponential(1.0), DistributionSpec::uniform(0.0, 3.0),
                          DistributionSpec::rayleigh(1.0), DistributionSpec::deterministic(2.5)}) {
        o.seed = ++seed;
        const auto ex = exact_age_dropping(det, s, o);
        const auto b = ub_dropping_general(det, s, moments_of_K_dropping(det, s, o));
        c.check(std::abs(b.value - ex.value) <= 3 * (ex.ci_half_width + b.ci_half_width) + 1e-9,
                fmt("deterministic Y, %s service: corollary1=%.6f exact=%.6f", std::string(s.kind_name()).c_str(),
                    b.value, ex.value));
    }
    const auto y2 = DistributionSpec::deterministic(2.0);
    const auto s1 = DistributionSpec::deterministic(1.0);
    const double e2 = exact_age_preemption(y2, s1).value;
    const double b2 = ub_preemption(y2, s1).value;
    c.check(std::abs(e2 - b2) <= 1e-12, fmt("D(2)/D(1) preemption: corollary2=%.12f exact=%.12f", b2, e2));
    return c;
}

Criterion ordering() {
    Criterion c{4, "ordering bound: holds for DMRL interarrivals, reverses for IMRL (tolerance 3 CI)"};
    EstimatorOptions o;
    o.mc_samples = 400'000;
    const auto s = DistributionSpec::shifted_exponential(1.0, 0.1);
    c.check(check_nbue(s), "service shifted_exponential(1, 0.1) is NBUE");
    std::uint64_t seed = 400;
    for (double shift : {0.0, 0.5, 1.0, 2.0}) {
        const auto y = DistributionSpec::shifted_exponential(1.0, shift);
        const auto v = classify_mrl(y).verdict;
        c.check(v == MrlVerdict::DMRL || v == MrlVerdict::ConstantMRL,
                fmt("shift=%g interarrival verdict %s", shift, std::string(to_string(v)).c_str()));
        o.seed = ++seed;
        const auto ex = exact_age_dropping(y, s, o);
        const double bound = mg11_ordering_bound(mean(y), s).value;
        c.check(ex.value <= bound + 3 * ex.ci_half_width,
                fmt("shift=%g exact=%.6f +- %.6f mg11=%.6f", shift, ex.value, ex.ci_half_width, bound));
    }
    const auto h = DistributionSpec::hyperexponential({0.5, 0.5}, {0.5, 2.0});
    for (double f : {0.25, 0.5, 1.0, 2.0}) {
        const auto y = with_parameter(h, "frequency", f);
        const auto v = classify_mrl(y).verdict;
        c.check(v == MrlVerdict::IMRL, fmt("hyperexponential f=%g verdict %s", f, std::string(to_string(v)).c_str()));
        o.seed = ++seed;
        const auto ex = exact_age_dropping(y, s, o);
        const double bound = mg11_ordering_bound(mean(y), s).value;
        c.check(ex.value >= bound - 3 * ex.ci_half_width,
                fmt("hyperexponential f=%g exact=%.6f +- %.6f mg11=%.6f (now a lower bound)", f, ex.value,
                    ex.ci_half_width, bound));
    }
    return c;
}

Criterion non_monotone() {
    Criterion c{5, "preemption rate sweep with shifted-exponential service decreases, then rises beyond 3 CI"};
    const auto result = run_sweep(preset_sweep("preemption_shifted_exponential"));
    const auto sim = result.series(EstimatorKind::Simulate);
    c.check(sim.size() >= 3, fmt("%zu simulated points", sim.size()));
    if (sim.size() < 3) return c;
    std::vector<double> values;
    for (const auto& [x, row] : sim) values.push_back(*row.value);
    const auto min_idx = interior_minimum(values);
    c.check(min_idx.has_value(), "simulated series has an interior minimum");
    if (!min_idx) return c;
    const auto& [x1, r1] = sim[*min_idx];
    const auto& [x2, r2] = sim.back();
    c.check(*r1.value + 3 * *r1.ci < *r2.value - 3 * *r2.ci,
            fmt("rising side: age(%g)=%.4f +- %.4f < age(%g)=%.4f +- %.4f", x1, *r1.value, *r1.ci, x2, *r2.value,
                *r2.ci));
    const auto& [x0, r0] = sim.front();
    c.check(*r1.value + 3 * *r1.ci < *r0.value - 3 * *r0.ci,
            fmt("falling side: age(%g)=%.4f > age(%g)=%.4f", x0, *r0.value, x1, *r1.value));
    return c;
}

// Randomized (Y, S, discipline, seed) configurations shared by criteria 6 and 7.
struct RandomCase {
    DistributionSpec y;
    DistributionSpec s;
    Discipline discipline;
    std::uint64_t seed;
    SimResult result;
};

DistributionSpec random_law(Rng& rng, double target_mean) {
    auto u = [&] { return uniform01(rng); };
    switch (static_cast<int>(u() * 6)) {
        case 0: return DistributionSpec::exponential(1 / target_mean);
        case 1: {
            const double shift = target_mean * 0.8 * u();
            return DistributionSpec::shifted_exponential(1 / (target_mean - shift), shift);
        }
        case 2: {
            const double half = target_mean * (0.1 + 0.9 * u());
            return DistributionSpec::uniform(target_mean - half, target_mean + half);
        }
        case 3: return DistributionSpec::rayleigh(target_mean / std::sqrt(std::numbers::pi / 2));
        case 4: {
            const int k = 1 + static_cast<int>(u() * 4);
            return DistributionSpec::erlang(k, k / target_mean);
        }
        default: {
            const double w = 0.2 + 0.6 * u();
            const DistributionSpec h = DistributionSpec::hyperexponential({w, 1 - w}, {0.5, 4.0});
            return with_parameter(h, "mean", target_mean);
        }
    }
}

std::vector<RandomCase> random_suite() {
    std::vector<RandomCase> cases;
    Rng rng = make_rng(20240601);
    while (cases.size() < 200) {
        const auto d = cases.size() % 2 ? Discipline::PreemptionInService : Discipline::Dropping;
        const double ey = 0.5 + 1.5 * uniform01(rng);
        const double load = d == Discipline::Dropping ? 0.1 + 2.9 * uniform01(rng) : 0.1 + 0.9 * uniform01(rng);
        auto y = random_law(rng, ey);
        auto s = random_law(rng, ey * load);
        const std::uint64_t seed = rng();
        try {
            auto r = simulate(y, s, d, 20'000, seed);
            cases.push_back({std::move(y), std::move(s), d, seed, std::move(r)});
        } catch (const DivergentAge&) {
            // Overloaded draw; replace it.
        }
    }
    return cases;
}

Criterion wald(const std::vector<RandomCase>& cases) {
    Criterion c{6, "Wald identity E[G] = E[K] E[Y] within 3 standard errors in >= 195 of 200 random configurations"};
    int within = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& k = cases[i];
        const auto w = wald_check(k.result.cycles, mean(k.y));
        const bool ok = w.within(3.0);
        within += ok;
        if (verbose || !ok)
            std::cout << "    " << (ok ? "ok   " : "miss ")
                      << fmt("#%zu %s Y=%s S=%s diff=%.5f se=%.5f", i, std::string(to_string(k.discipline)).c_str(),
                             std::string(k.y.kind_name()).c_str(), std::string(k.s.kind_name()).c_str(), w.difference,
                             w.std_error)
                      << '\n';
    }
    c.check(within >= 195, fmt("%d of %zu within 3 SE", within, cases.size()));
    return c;
}

Criterion geometric_k(const std::vector<RandomCase>& cases) {
    Criterion c{7, "preemption: E[K] p = 1 within 3 CI on the random suite; K is geometric in the M/M case"};
    int checked = 0, tight = 0;
    for (const auto& k : cases) {
        if (k.discipline != Discipline::PreemptionInService) continue;
        const auto st = cycle_statistics(k.result.cycles, k.discipline);
        const double p = success_probability(k.y, k.s);
        const double product = st.arrivals.mean * p;
        // Standard error under the geometric law being tested; the sample one is
        // zero when p is so close to 1 that every cycle has K = 1.
        const double se = std::sqrt((1 - p) / (p * p) / static_cast<double>(st.cycles));
        const double ci = kNormalQuantile95 * se * p;
        ++checked;
        tight += std::abs(product - 1) <= 3 * se * p;
        c.check(std::abs(product - 1) <= 3 * ci,
                fmt("Y=%s S=%s E[K]=%.5f p=%.5f product=%.5f ci=%.5f", std::string(k.y.kind_name()).c_str(),
                    std::string(k.s.kind_name()).c_str(), st.arrivals.mean, p, product, ci));
    }
    if (verbose) std::cout << "    " << tight << " of " << checked << " also within 3 SE\n";

    // Simulated cycle lengths in arrivals against geometric(p), p = mu / (lambda + mu).
    const double l = 1.0, m = 1.5, p = m / (l + m);
    const auto r = simulate(DistributionSpec::exponential(l), DistributionSpec::exponential(m),
                            Discipline::PreemptionInService, 100'000, 700);
    std::vector<double> counts(8, 0.0);
    for (const auto& cyc : r.cycles)
        if (cyc.arrivals <= counts.size()) counts[cyc.arrivals - 1] += 1;
    const double n = static_cast<double>(r.cycles.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double truth = std::pow(1 - p, static_cast<double>(i)) * p;
        const double est = counts[i] / n;
        const double ci = kNormalQuantile95 * std::sqrt(truth * (1 - truth) / n);
        c.check(std::abs(est - truth) <= 3 * ci, fmt("simulated Pr(K=%zu)=%.5f geometric=%.5f ci=%.5f", i + 1, est,
                                                     truth, ci));
    }

    // The dropping walk gives the same law for M/M: Pr(K >= k) = (lambda / (lambda + mu))^{k-1}.
    const auto pmf = k_pmf(DistributionSpec::exponential(l), DistributionSpec::exponential(m), 8);
    for (std::size_t i = 0; i < pmf.probabilities.size(); ++i) {
        const double truth = std::pow(1 - p, static_cast<double>(i)) * p;
        c.check(std::abs(pmf.probabilities[i] - truth) <= 3 * pmf.ci_half_widths[i],
                fmt("k_pmf Pr(K=%zu)=%.5f geometric=%.5f ci=%.5f", i + 1, pmf.probabilities[i], truth,
                    pmf.ci_half_widths[i]));
    }
    return c;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Criterion determinism() {
    Criterion c{8, "fixed seeds give byte-identical CSV output (library and command line)"};
    const auto dir = std::filesystem::temp_directory_path();
    auto spec = preset_sweep("dropping_rate");
    spec.grid = {0.3, 1.0, 3.0};
    std::vector<std::uint64_t> hashes;
    for (unsigned threads : {1u, 4u, 1u}) {
        spec.options.threads = threads;
        const auto path = dir / ("aoi_acceptance_" + std::to_string(hashes.size()) + ".csv");
        emit_csv(run_sweep(spec), path);
        hashes.push_back(fnv1a(slurp(path)));
        std::filesystem::remove(path);
    }
    c.check(hashes[0] == hashes[1] && hashes[1] == hashes[2],
            fmt("library sweep hashes %016llx %016llx %016llx", (unsigned long long)hashes[0],
                (unsigned long long)hashes[1], (unsigned long long)hashes[2]));

    std::vector<std::uint64_t> cli_hashes;
    for (int i = 0; i < 2; ++i) {
        const auto path = dir / ("aoi_acceptance_cli_" + std::to_string(i) + ".csv");
        std::ostringstream out, err;
        const int code = cli::run({"sweep", "--preset", "preemption_uniform_rayleigh", "--csv", path.string()}, out, err);
        c.check(code == 0, fmt("cli sweep exit code %d %s", code, err.str().c_str()));
        cli_hashes.push_back(fnv1a(slurp(path)));
        std::filesystem::remove(path);
    }
    c.check(cli_hashes[0] == cli_hashes[1], fmt("cli sweep hashes %016llx %016llx",
                                                (unsigned long long)cli_hashes[0], (unsigned long long)cli_hashes[1]));
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--verbose") verbose = true;

    int failed = 0;
    auto run = [&](const std::function<Criterion()>& f) {
        try {
            failed += report(f());
        } catch (const std::exception& e) {
            std::cout << "FAIL (exception) " << e.what() << '\n';
            ++failed;
        }
    };
    run(mm11_dropping);
    run(mm11_preemption);
    run(bound_domination);
    run(ordering);
    run(non_monotone);
    const auto cases = random_suite();
    run([&] { return wald(cases); });
    run([&] { return geometric_k(cases); });
    run(determinism);
    std::cout << (failed ? "acceptance: " + std::to_string(failed) + " criteria failed" : "acceptance: all criteria passed")
              << '\n';
    return failed ? 1 : 0;
}
