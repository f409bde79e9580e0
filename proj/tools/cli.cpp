#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aoi/analytic.hpp"
#include "aoi/bounds.hpp"
#include "aoi/errors.hpp"
#include "aoi/experiments.hpp"
#include "aoi/format.hpp"
#include "aoi/json_io.hpp"
#include "aoi/sim.hpp"

namespace aoi::cli {
namespace {

using nlohmann::json;

/// Bad flag values; reported with the flag name and exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string pm(double value, double ci) {
    std::ostringstream s;
    s << std::setprecision(10) << value << " ± " << std::setprecision(4);
    if (std::isfinite(ci))
        s << ci;
    else
        s << "inf";
    return s.str();
}

// Values given on the command line win, then the config file, then AOI_SEED
// (seed only), then built-in defaults.
class Settings {
public:
    void load_config(const std::string& path) {
        if (path.empty()) return;
        std::ifstream in(path);
        if (!in) throw UsageError("--config: cannot open " + path);
        try {
            config_ = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError("--config: " + std::string(e.what()));
        }
        if (!config_.is_object()) throw UsageError("--config: expected a JSON object");
    }

    template <class T>
    T pick(const CLI::Option* flag, const T& flag_value, const char* key, const T& fallback) const {
        if (flag && flag->count() > 0) return flag_value;
        if (config_.contains(key)) {
            try {
                return config_.at(key).get<T>();
            } catch (const json::exception&) {
                throw UsageError(std::string("--config: field \"") + key + "\" has the wrong type");
            }
        }
        return fallback;
    }

    std::uint64_t seed(const CLI::Option* flag, std::uint64_t flag_value) const {
        std::uint64_t fallback = 1;
        if (const char* env = std::getenv("AOI_SEED")) {
            try {
                fallback = std::stoull(env);
            } catch (const std::exception&) {
                throw UsageError("AOI_SEED must be an unsigned integer");
            }
        }
        return pick<std::uint64_t>(flag, flag_value, "seed", fallback);
    }

private:
    json config_ = json::object();
};

DistributionSpec distribution_flag(const std::string& flag, const std::string& text) {
    try {
        return parse_distribution(text);
    } catch (const Error& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

// Flags shared by the estimator subcommands.
struct ModelFlags {
    std::string discipline = "dropping";
    std::string interarrival;
    std::string service;

    void attach(CLI::App* app, bool with_discipline = true) {
        if (with_discipline)
            app->add_option("--discipline", discipline, "dropping | preemption")
                ->check(CLI::IsMember({"dropping", "preemption", "preemption_in_service"}));
        app->add_option("--interarrival", interarrival, "interarrival law as JSON or @file")->required();
        app->add_option("--service", service, "service law as JSON or @file")->required();
    }

    Discipline parsed_discipline() const { return parse_discipline(discipline); }
    DistributionSpec y() const { return distribution_flag("--interarrival", interarrival); }
    DistributionSpec s() const { return distribution_flag("--service", service); }
};

struct McFlags {
    std::uint64_t mc_samples = 1'000'000;
    std::uint64_t seed = 1;
    double epsilon = 1e-8;
    double quad_tol = 1e-9;
    unsigned threads = 0;
    CLI::Option* mc_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* eps_opt = nullptr;
    CLI::Option* tol_opt = nullptr;
    CLI::Option* threads_opt = nullptr;

    void attach(CLI::App* app) {
        mc_opt = app->add_option("--mc-samples", mc_samples, "Monte Carlo replicates");
        seed_opt = app->add_option("--seed", seed, "64-bit seed");
        eps_opt = app->add_option("--epsilon", epsilon, "relative tail tolerance of the walk truncation");
        tol_opt = app->add_option("--quad-tol", quad_tol, "quadrature relative tolerance");
        threads_opt = app->add_option("--threads", threads, "worker threads (0 = all cores)");
    }

    EstimatorOptions resolve(const Settings& settings) const {
        EstimatorOptions o;
        o.mc_samples = settings.pick<std::uint64_t>(mc_opt, mc_samples, "mc_samples", o.mc_samples);
        o.seed = settings.seed(seed_opt, seed);
        o.k_truncation_epsilon = settings.pick(eps_opt, epsilon, "k_truncation_epsilon", o.k_truncation_epsilon);
        o.quadrature_rel_tol = settings.pick(tol_opt, quad_tol, "quadrature_rel_tol", o.quadrature_rel_tol);
        o.threads = settings.pick<unsigned>(threads_opt, threads, "threads", 0u);
        if (o.mc_samples < 10'000) throw UsageError("--mc-samples: must be >= 10000 (InvalidArgument)");
        auto in_range = [](double x) { return x > 0.0 && x < 1e-2; };
        if (!in_range(o.k_truncation_epsilon)) throw UsageError("--epsilon: must lie in (0, 1e-2) (InvalidArgument)");
        if (!in_range(o.quadrature_rel_tol)) throw UsageError("--quad-tol: must lie in (0, 1e-2) (InvalidArgument)");
        return o;
    }
};

json estimate_json(const AgeEstimate& e) {
    return {{"value", e.value},
            {"ci_half_width", number_or_null(e.ci_half_width)},
            {"cycles_used", e.cycles_used},
            {"method", std::string(to_string(e.method))}};
}

json bound_json(const BoundReport& b) {
    json inputs = json::object();
    for (const auto& [k, v] : b.inputs) inputs[k] = v;
    return {{"kind", std::string(to_string(b.kind))},
            {"value", b.value},
            {"ci_half_width", b.ci_half_width},
            {"applicability", std::string(to_string(b.applicability))},
            {"inputs", inputs}};
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Average age of information for G/G/1/1 systems", "aoi"};
    app.require_subcommand(1);

    std::string config_path;
    bool as_json = false;
    app.add_option("--config", config_path, "JSON file with default option values");
    app.add_flag("--json", as_json, "machine-readable output");

    // simulate
    auto* sim = app.add_subcommand("simulate", "discrete-event simulation");
    ModelFlags sim_model;
    sim_model.attach(sim);
    std::uint64_t cycles = 100'000, sim_seed = 1, max_events = 0;
    std::string trace_path;
    auto* cycles_opt = sim->add_option("--cycles", cycles, "successful deliveries to measure");
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "64-bit seed");
    sim->add_option("--max-events", max_events, "arrival budget (default 1000 x cycles)");
    sim->add_option("--trace", trace_path, "write an event trace CSV");

    // exact
    auto* exact = app.add_subcommand("exact", "exact age (Monte Carlo walk or quadrature)");
    ModelFlags exact_model;
    exact_model.attach(exact);
    McFlags exact_mc;
    exact_mc.attach(exact);
    bool force_generic = false, printed_denominator = false;
    exact->add_flag("--force-generic", force_generic, "skip closed-form shortcuts");
    exact->add_flag("--printed-denominator", printed_denominator,
                    "preemption: divide by E[ccdf_S(Y)] instead of Pr(S <= Y), for comparison");

    // bound
    auto* bound = app.add_subcommand("bound", "upper bounds");
    ModelFlags bound_model;
    bound_model.attach(bound);
    McFlags bound_mc;
    bound_mc.attach(bound);
    std::string bound_kind = "all";
    bound->add_option("--kind", bound_kind, "corollary1 | gm11 | mm11 | mg11 | corollary2 | all")
        ->check(CLI::IsMember({"all", "corollary1", "gm11", "mm11", "mg11", "corollary2"}));

    // sweep
    auto* sweep = app.add_subcommand("sweep", "parameter sweep");
    std::string spec_path, preset, csv_path, svg_path;
    std::uint64_t sweep_seed = 1;
    bool list_presets = false;
    auto* spec_opt = sweep->add_option("--spec", spec_path, "sweep spec JSON file");
    auto* preset_opt = sweep->add_option("--preset", preset, "built-in sweep");
    spec_opt->excludes(preset_opt);
    auto* sweep_seed_opt = sweep->add_option("--seed", sweep_seed, "override the spec seed");
    sweep->add_option("--csv", csv_path, "write results as CSV");
    sweep->add_option("--svg", svg_path, "write an SVG chart");
    sweep->add_flag("--list-presets", list_presets, "print built-in sweep names");

    // check-properties
    auto* props = app.add_subcommand("check-properties", "MRL classification and NBUE check");
    std::string dist_text;
    std::size_t points = 201;
    double cap = 0.999, tol = kDefaultMrlTolerance;
    props->add_option("--dist", dist_text, "law as JSON or @file")->required();
    props->add_option("--points", points, "grid points");
    props->add_option("--cap", cap, "quantile cap of the grid");
    props->add_option("--tol", tol, "absolute tolerance on MRL differences");

    // kpmf
    auto* kpmf = app.add_subcommand("kpmf", "distribution of arrivals per cycle (dropping)");
    ModelFlags kpmf_model;
    kpmf_model.attach(kpmf, false);
    McFlags kpmf_mc;
    kpmf_mc.attach(kpmf);
    std::uint64_t k_max = 20;
    kpmf->add_option("--k-max", k_max, "largest k reported");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::string command;
    for (auto* sub : app.get_subcommands()) command = sub->get_name();

    try {
        Settings settings;
        settings.load_config(config_path);

        if (sim->parsed()) {
            SimConfig config{.interarrival = sim_model.y(),
                             .service = sim_model.s(),
                             .discipline = sim_model.parsed_discipline(),
                             .target_cycles = settings.pick<std::uint64_t>(cycles_opt, cycles, "cycles", 100'000),
                             .seed = settings.seed(sim_seed_opt, sim_seed),
                             .max_events = max_events};
            if (config.target_cycles < 1) throw UsageError("--cycles: must be >= 1");
            if (max_events != 0 && max_events < config.target_cycles)
                throw UsageError("--max-events: must be >= --cycles");

            std::ofstream trace_file;
            std::optional<TraceCsvWriter> writer;
            TraceSink sink;
            if (!trace_path.empty()) {
                trace_file.open(trace_path, std::ios::binary);
                if (!trace_file) throw IoError("cannot write " + trace_path);
                writer.emplace(trace_file);
                writer->header();
                sink = [&writer](const TraceEvent& ev) { (*writer)(ev); };
            }
            const auto result = run_simulation(config, sink);
            const bool have_stats = result.cycles.size() >= 2;
            CycleStatistics stats;
            if (have_stats) stats = cycle_statistics(result.cycles, config.discipline);
            if (as_json) {
                json j{{"command", "simulate"},
                       {"discipline", std::string(to_string(config.discipline))},
                       {"interarrival", to_json(config.interarrival)},
                       {"service", to_json(config.service)},
                       {"seed", config.seed},
                       {"estimate", estimate_json(result.estimate)},
                       {"direct_average", result.direct_average}};
                if (have_stats) {
                    j["statistics"] = {
                        {"mean_effective_interarrival", stats.effective_interarrival.mean},
                        {"second_moment_effective_interarrival", stats.effective_interarrival_sq.mean},
                        {"mean_arrivals", stats.arrivals.mean},
                        {"second_moment_arrivals", stats.arrivals_sq.mean},
                        {"mean_wait", stats.wait.mean},
                        {"mean_busy", stats.busy.mean},
                        {"success_probability", stats.success_probability ? json(*stats.success_probability)
                                                                          : json(nullptr)}};
                }
                print_json(out, j);
            } else {
                out << "discipline    " << to_string(config.discipline) << '\n'
                    << "age           " << pm(result.estimate.value, result.estimate.ci_half_width)
                    << "  (simulation, " << result.estimate.cycles_used << " cycles)\n";
                if (have_stats) {
                    out << "E[G]          " << stats.effective_interarrival.mean << '\n'
                        << "E[K]          " << stats.arrivals.mean << '\n'
                        << "E[W]          " << stats.wait.mean << '\n'
                        << "E[busy]       " << stats.busy.mean << '\n';
                    if (stats.success_probability)
                        out << "p (1/E[K])    " << *stats.success_probability << '\n';
                }
            }
            return kExitOk;
        }

        if (exact->parsed()) {
            auto opts = exact_mc.resolve(settings);
            opts.force_generic = force_generic;
            if (printed_denominator) opts.preemption_denominator = PreemptionDenominator::PrintedCcdfMean;
            const auto y = exact_model.y();
            const auto s = exact_model.s();
            const auto discipline = exact_model.parsed_discipline();
            const auto est = exact_age(discipline, y, s, opts);
            json terms = json::object();
            if (discipline == Discipline::Dropping) {
                const auto sums = dropping_sums(y, s, opts);
                terms = {{"mean_arrivals", sums.expected_arrivals.value},
                         {"crossing_sum", sums.crossing_sum.value},
                         {"closed_form", sums.closed_form}};
            } else {
                terms = {{"success_probability", success_probability(y, s, opts)},
                         {"conditional_mean_service", conditional_mean_service(y, s, opts)},
                         {"denominator", printed_denominator ? "printed_ccdf_mean" : "success_probability"}};
            }
            if (as_json) {
                print_json(out, {{"command", "exact"},
                                 {"discipline", std::string(to_string(discipline))},
                                 {"interarrival", to_json(y)},
                                 {"service", to_json(s)},
                                 {"seed", opts.seed},
                                 {"estimate", estimate_json(est)},
                                 {"terms", terms}});
            } else {
                out << "discipline    " << to_string(discipline) << '\n'
                    << "age           " << pm(est.value, est.ci_half_width) << "  (" << to_string(est.method)
                    << ")\n";
                for (const auto& [k, v] : terms.items())
                    out << std::left << std::setw(26) << k << (v.is_string() ? v.get<std::string>() : v.dump())
                        << '\n';
            }
            return kExitOk;
        }

        if (bound->parsed()) {
            const auto opts = bound_mc.resolve(settings);
            const auto y = bound_model.y();
            const auto s = bound_model.s();
            const auto discipline = bound_model.parsed_discipline();
            auto wanted = [&](std::string_view k) { return bound_kind == "all" || bound_kind == k; };
            std::vector<BoundReport> reports;
            if (discipline == Discipline::Dropping) {
                if (wanted("corollary1")) reports.push_back(ub_dropping_general(y, s, moments_of_K_dropping(y, s, opts)));
                if (wanted("gm11") && s.is<Exponential>()) reports.push_back(ub_dropping_gm(y, s.as<Exponential>().rate));
                if (wanted("mm11") && y.is<Exponential>() && s.is<Exponential>()) {
                    auto mm = mm11(y.as<Exponential>().rate, s.as<Exponential>().rate);
                    reports.push_back(mm.exact);
                    reports.push_back(mm.bound);
                }
                if (wanted("mg11")) {
                    auto r = mg11_ordering_bound(mean(y), s);
                    label_ordering(r, y, s);
                    reports.push_back(r);
                }
            } else if (wanted("corollary2")) {
                reports.push_back(ub_preemption(y, s, opts));
            }
            if (reports.empty())
                throw UsageError("--kind: " + bound_kind + " does not apply to this discipline and these laws");
            if (as_json) {
                json arr = json::array();
                for (const auto& r : reports) arr.push_back(bound_json(r));
                print_json(out, {{"command", "bound"},
                                 {"discipline", std::string(to_string(discipline))},
                                 {"interarrival", to_json(y)},
                                 {"service", to_json(s)},
                                 {"bounds", arr}});
            } else {
                for (const auto& r : reports)
                    out << std::left << std::setw(12) << to_string(r.kind) << pm(r.value, r.ci_half_width) << "  "
                        << to_string(r.applicability) << '\n';
            }
            return kExitOk;
        }

        if (sweep->parsed()) {
            if (list_presets) {
                for (const auto& n : preset_names()) out << n << '\n';
                return kExitOk;
            }
            if (spec_path.empty() && preset.empty()) throw UsageError("sweep: give --spec or --preset");
            SweepSpec spec = [&] {
                try {
                    return spec_path.empty() ? preset_sweep(preset) : load_sweep(spec_path);
                } catch (const InvalidArgument& e) {
                    throw UsageError(std::string(spec_path.empty() ? "--preset: " : "--spec: ") + e.what());
                } catch (const InvalidDistribution& e) {
                    throw UsageError(std::string("--spec: ") + e.what());
                } catch (const IoError& e) {
                    throw UsageError(std::string("--spec: ") + e.what());
                }
            }();
            // A sweep spec carries its own seed; only the flag overrides it.
            if (sweep_seed_opt->count() > 0) spec.seed = sweep_seed;
            const auto result = run_sweep(spec);
            if (!csv_path.empty()) emit_csv(result, csv_path);
            if (!svg_path.empty()) emit_chart(result, svg_path, spec.name, spec.parameter);
            if (as_json) {
                json rows = json::array();
                for (const auto& r : result.rows)
                    rows.push_back({{"param", r.param},
                                    {"estimator", std::string(to_string(r.estimator))},
                                    {"value", r.value ? number_or_null(*r.value) : json(nullptr)},
                                    {"ci", r.ci ? number_or_null(*r.ci) : json(nullptr)},
                                    {"applicability", r.applicability}});
                print_json(out, {{"command", "sweep"}, {"name", spec.name}, {"seed", spec.seed}, {"rows", rows}});
            } else {
                out << to_csv(result);
            }
            return kExitOk;
        }

        if (props->parsed()) {
            const auto d = distribution_flag("--dist", dist_text);
            if (points < 2) throw UsageError("--points: must be >= 2");
            if (!(cap > 0.0 && cap < 1.0)) throw UsageError("--cap: must lie in (0, 1)");
            const MrlGridSpec grid{points, cap};
            const auto cls = classify_mrl(d, grid, tol);
            const bool nbue = check_nbue(d, grid, tol);
            if (as_json) {
                json g = json::array();
                for (const auto& [t, m] : cls.grid) g.push_back({t, m});
                print_json(out, {{"command", "check-properties"},
                                 {"dist", to_json(d)},
                                 {"mean", mean(d)},
                                 {"second_moment", second_moment(d)},
                                 {"verdict", std::string(to_string(cls.verdict))},
                                 {"nbue", nbue},
                                 {"tolerance", tol},
                                 {"grid", g}});
            } else {
                out << "kind          " << d.kind_name() << '\n'
                    << "mean          " << mean(d) << '\n'
                    << "second moment " << second_moment(d) << '\n'
                    << "mrl verdict   " << to_string(cls.verdict) << '\n'
                    << "NBUE          " << (nbue ? "true" : "false") << '\n';
            }
            return kExitOk;
        }

        if (kpmf->parsed()) {
            const auto opts = kpmf_mc.resolve(settings);
            const auto pmf = k_pmf(kpmf_model.y(), kpmf_model.s(), k_max, opts);
            if (as_json) {
                print_json(out, {{"command", "kpmf"},
                                 {"pmf", pmf.probabilities},
                                 {"ci", pmf.ci_half_widths},
                                 {"tail_mass", pmf.tail_mass}});
            } else {
                out << "k  Pr(K=k)\n";
                for (std::size_t k = 0; k < pmf.probabilities.size(); ++k)
                    out << k + 1 << "  " << pm(pmf.probabilities[k], pmf.ci_half_widths[k]) << '\n';
                out << "tail  " << pmf.tail_mass << '\n';
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        const bool usage = e.name() == "InvalidDistribution" || e.name() == "InvalidArgument";
        if (as_json && !usage)
            print_json(out, {{"command", command}, {"error", {{"name", e.name()}, {"message", e.what()}}}});
        err << e.what() << '\n';
        return usage ? kExitUsage : kExitDomain;
    }
    return kExitUsage;
}

}  // namespace aoi::cli
