#include "aoi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aoi/bounds.hpp"
#include "aoi/errors.hpp"
#include "aoi/format.hpp"
#include "aoi/json_io.hpp"
#include "aoi/sim.hpp"

namespace aoi {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::string_view kCsvHeader = "param,estimator,value,ci,applicability";

bool dropping_only(EstimatorKind k) {
    return k == EstimatorKind::Corollary1 || k == EstimatorKind::GM11 || k == EstimatorKind::MG11;
}

DistributionSpec rescale(const DistributionSpec& d, double factor) {
    return std::visit(overloaded{
                          [&](const Exponential& x) { return DistributionSpec::exponential(x.rate / factor); },
                          [&](const ShiftedExponential& x) {
                              return DistributionSpec::shifted_exponential(x.rate / factor, x.shift * factor);
                          },
                          [&](const Deterministic& x) { return DistributionSpec::deterministic(x.value * factor); },
                          [&](const Uniform& x) {
                              return DistributionSpec::uniform(x.lower * factor, x.upper * factor);
                          },
                          [&](const Rayleigh& x) { return DistributionSpec::rayleigh(x.scale * factor); },
                          [&](const Erlang& x) { return DistributionSpec::erlang(x.shape, x.rate / factor); },
                          [&](const Hyperexponential& x) {
                              auto rates = x.rates;
                              for (double& r : rates) r /= factor;
                              return DistributionSpec::hyperexponential(x.weights, rates);
                          },
                      },
                      d.kind());
}

struct PointEvaluator {
    const SweepSpec& spec;
    double param;
    std::uint64_t point_seed;
    DistributionSpec interarrival;
    std::optional<DroppingSums> sums;

    EstimatorOptions mc_options() const {
        EstimatorOptions o = spec.options;
        o.seed = derive_seed(point_seed, 1);
        return o;
    }

    const DroppingSums& dropping() {
        if (!sums) sums = dropping_sums(interarrival, spec.service, mc_options());
        return *sums;
    }

    SweepRow evaluate(EstimatorKind kind) {
        SweepRow row;
        row.param = param;
        row.estimator = kind;
        row.applicability = "estimate";
        try {
            switch (kind) {
                case EstimatorKind::Simulate: {
                    SimConfig config{.interarrival = interarrival,
                                     .service = spec.service,
                                     .discipline = spec.discipline,
                                     .target_cycles = spec.sim_cycles,
                                     .seed = derive_seed(point_seed, 0)};
                    const auto est = run_simulation(config).estimate;
                    row.value = est.value;
                    row.ci = est.ci_half_width;
                    break;
                }
                case EstimatorKind::Exact: {
                    if (spec.discipline == Discipline::Dropping) {
                        const auto& s = dropping();
                        row.value = second_moment(interarrival) / (2.0 * mean(interarrival)) +
                                    s.crossing_ratio.value + mean(spec.service);
                        row.ci = s.crossing_ratio.ci_half_width;
                    } else {
                        const auto est = exact_age_preemption(interarrival, spec.service, mc_options());
                        row.value = est.value;
                        row.ci = est.ci_half_width;
                    }
                    break;
                }
                case EstimatorKind::Corollary1: {
                    const auto& s = dropping();
                    fill(row, ub_dropping_general(interarrival, spec.service,
                                                  {s.expected_arrivals, s.expected_arrivals_sq}));
                    break;
                }
                case EstimatorKind::GM11:
                    fill(row, ub_dropping_gm(interarrival, spec.service.as<Exponential>().rate));
                    break;
                case EstimatorKind::MG11: {
                    auto report = mg11_ordering_bound(mean(interarrival), spec.service);
                    label_ordering(report, interarrival, spec.service);
                    fill(row, report);
                    break;
                }
                case EstimatorKind::Corollary2:
                    fill(row, ub_preemption(interarrival, spec.service, mc_options()));
                    break;
            }
        } catch (const Error& e) {
            row.value.reset();
            row.ci.reset();
            row.applicability = e.name();
        }
        return row;
    }

    static void fill(SweepRow& row, const BoundReport& report) {
        row.value = report.value;
        row.ci = report.ci_half_width;
        row.applicability = std::string(to_string(report.applicability));
    }
};

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return out;
        start = pos + 1;
    }
}

std::uint64_t get_u64(const nlohmann::json& j, const char* key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_unsigned() && !j.at(key).is_number_integer())
        throw InvalidArgument(std::string("\"") + key + "\" must be a nonnegative integer");
    return j.at(key).get<std::uint64_t>();
}

}  // namespace

std::string_view to_string(EstimatorKind kind) noexcept {
    switch (kind) {
        case EstimatorKind::Simulate: return "simulate";
        case EstimatorKind::Exact: return "exact";
        case EstimatorKind::Corollary1: return "corollary1";
        case EstimatorKind::GM11: return "gm11";
        case EstimatorKind::MG11: return "mg11";
        case EstimatorKind::Corollary2: return "corollary2";
    }
    return "simulate";
}

EstimatorKind parse_estimator(std::string_view text) {
    for (auto k : {EstimatorKind::Simulate, EstimatorKind::Exact, EstimatorKind::Corollary1, EstimatorKind::GM11,
                   EstimatorKind::MG11, EstimatorKind::Corollary2})
        if (to_string(k) == text) return k;
    throw InvalidArgument("unknown estimator \"" + std::string(text) + "\"");
}

void SweepSpec::validate() const {
    if (grid.empty()) throw InvalidArgument("sweep grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw InvalidArgument("sweep grid must be strictly increasing");
    if (estimators.empty()) throw InvalidArgument("sweep declares no estimators");
    for (auto k : estimators) {
        if (discipline == Discipline::PreemptionInService && dropping_only(k))
            throw InvalidArgument(std::string(to_string(k)) + " applies to the dropping discipline only");
        if (discipline == Discipline::Dropping && k == EstimatorKind::Corollary2)
            throw InvalidArgument("corollary2 applies to the preemption discipline only");
        if (k == EstimatorKind::GM11 && !service.is<Exponential>())
            throw InvalidArgument("gm11 needs exponential service");
    }
    if (sim_cycles < 1) throw InvalidArgument("sim_cycles must be >= 1");
    options.validate();
    for (double v : grid) (void)with_parameter(interarrival, parameter, v);
}

DistributionSpec with_parameter(const DistributionSpec& base, std::string_view parameter, double value) {
    if (parameter == "mean") return rescale(base, value / mean(base));
    if (parameter == "frequency") return rescale(base, 1.0 / (value * mean(base)));
    auto bad = [&]() -> DistributionSpec {
        throw InvalidArgument("parameter \"" + std::string(parameter) + "\" does not apply to " +
                              std::string(base.kind_name()));
    };
    return std::visit(overloaded{
                          [&](Exponential d) {
                              if (parameter != "rate") return bad();
                              d.rate = value;
                              return DistributionSpec{d};
                          },
                          [&](ShiftedExponential d) {
                              if (parameter == "rate")
                                  d.rate = value;
                              else if (parameter == "shift")
                                  d.shift = value;
                              else
                                  return bad();
                              return DistributionSpec{d};
                          },
                          [&](Deterministic d) {
                              if (parameter != "value") return bad();
                              d.value = value;
                              return DistributionSpec{d};
                          },
                          [&](Uniform d) {
                              if (parameter == "lower")
                                  d.lower = value;
                              else if (parameter == "upper")
                                  d.upper = value;
                              else
                                  return bad();
                              return DistributionSpec{d};
                          },
                          [&](Rayleigh d) {
                              if (parameter != "scale") return bad();
                              d.scale = value;
                              return DistributionSpec{d};
                          },
                          [&](Erlang d) {
                              if (parameter != "rate") return bad();
                              d.rate = value;
                              return DistributionSpec{d};
                          },
                          [&](const Hyperexponential&) { return bad(); },
                      },
                      base.kind());
}

std::vector<std::pair<double, SweepRow>> SweepResult::series(EstimatorKind kind) const {
    std::vector<std::pair<double, SweepRow>> out;
    for (const auto& r : rows)
        if (r.estimator == kind && r.value) out.emplace_back(r.param, r);
    return out;
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    SweepResult result;
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        const double param = spec.grid[i];
        PointEvaluator point{spec, param, derive_seed(spec.seed, i),
                             with_parameter(spec.interarrival, spec.parameter, param), std::nullopt};
        for (auto kind : spec.estimators) result.rows.push_back(point.evaluate(kind));
    }
    return result;
}

SweepSpec sweep_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("sweep spec must be a JSON object");
    auto need = [&](const char* key) -> const nlohmann::json& {
        if (!j.contains(key)) throw InvalidArgument(std::string("sweep spec misses \"") + key + "\"");
        return j.at(key);
    };
    EstimatorOptions options;
    if (j.contains("options")) {
        const auto& o = j.at("options");
        options.mc_samples = get_u64(o, "mc_samples", options.mc_samples);
        options.k_truncation_epsilon = o.value("k_truncation_epsilon", options.k_truncation_epsilon);
        options.quadrature_rel_tol = o.value("quadrature_rel_tol", options.quadrature_rel_tol);
        options.force_generic = o.value("force_generic", false);
        options.threads = static_cast<unsigned>(get_u64(o, "threads", 0));
    }
    std::vector<EstimatorKind> estimators;
    for (const auto& e : need("estimators")) estimators.push_back(parse_estimator(e.get<std::string>()));

    SweepSpec spec{
        .name = need("name").get<std::string>(),
        .discipline = parse_discipline(need("discipline").get<std::string>()),
        .interarrival = distribution_from_json(need("interarrival")),
        .parameter = need("parameter").get<std::string>(),
        .grid = need("grid").get<std::vector<double>>(),
        .service = distribution_from_json(need("service")),
        .estimators = std::move(estimators),
        .options = options,
        .sim_cycles = get_u64(j, "sim_cycles", 100'000),
        .seed = get_u64(j, "seed", 1),
    };
    spec.validate();
    return spec;
}

nlohmann::json to_json(const SweepSpec& spec) {
    nlohmann::json j;
    j["name"] = spec.name;
    j["discipline"] = std::string(to_string(spec.discipline));
    j["interarrival"] = to_json(spec.interarrival);
    j["parameter"] = spec.parameter;
    j["grid"] = spec.grid;
    j["service"] = to_json(spec.service);
    j["estimators"] = nlohmann::json::array();
    for (auto k : spec.estimators) j["estimators"].push_back(std::string(to_string(k)));
    j["options"] = {{"mc_samples", spec.options.mc_samples},
                    {"k_truncation_epsilon", spec.options.k_truncation_epsilon},
                    {"quadrature_rel_tol", spec.options.quadrature_rel_tol},
                    {"force_generic", spec.options.force_generic}};
    j["sim_cycles"] = spec.sim_cycles;
    j["seed"] = spec.seed;
    return j;
}

SweepSpec load_sweep(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sweep spec " + path.string());
    try {
        return sweep_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(path.string() + ": " + e.what());
    }
}

std::vector<std::string> preset_names() {
    return {"dropping_rate", "dropping_shift", "dropping_imrl", "preemption_shifted_exponential", "preemption_uniform_rayleigh"};
}

SweepSpec preset_sweep(std::string_view name) {
    EstimatorOptions mc;
    mc.mc_samples = 200'000;
    const auto service_se = DistributionSpec::shifted_exponential(1.0, 0.1);
    using E = EstimatorKind;

    if (name == "dropping_rate")
        return {.name = "dropping_rate",
                .discipline = Discipline::Dropping,
                .interarrival = DistributionSpec::shifted_exponential(1.0, 0.5),
                .parameter = "rate",
                .grid = {0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0},
                .service = service_se,
                .estimators = {E::Simulate, E::Exact, E::Corollary1, E::MG11},
                .options = mc,
                .sim_cycles = 100'000,
                .seed = 3};
    if (name == "dropping_shift")
        return {.name = "dropping_shift",
                .discipline = Discipline::Dropping,
                .interarrival = DistributionSpec::shifted_exponential(1.0, 0.0),
                .parameter = "shift",
                .grid = {0.0, 0.25, 0.5, 1.0, 1.5, 2.0},
                .service = service_se,
                .estimators = {E::Simulate, E::Exact, E::Corollary1, E::MG11},
                .options = mc,
                .sim_cycles = 100'000,
                .seed = 3};
    if (name == "dropping_imrl")
        return {.name = "dropping_imrl",
                .discipline = Discipline::Dropping,
                .interarrival = DistributionSpec::hyperexponential({0.5, 0.5}, {0.5, 2.0}),
                .parameter = "frequency",
                .grid = {0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0},
                .service = service_se,
                .estimators = {E::Simulate, E::Exact, E::Corollary1, E::MG11},
                .options = mc,
                .sim_cycles = 100'000,
                .seed = 4};
    if (name == "preemption_shifted_exponential")
        return {.name = "preemption_shifted_exponential",
                .discipline = Discipline::PreemptionInService,
                .interarrival = DistributionSpec::shifted_exponential(1.0, 0.1),
                .parameter = "rate",
                .grid = {0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0, 12.0},
                .service = DistributionSpec::shifted_exponential(1.0, 0.3),
                .estimators = {E::Simulate, E::Exact, E::Corollary2},
                .options = mc,
                .sim_cycles = 100'000,
                .seed = 5};
    if (name == "preemption_uniform_rayleigh")
        return {.name = "preemption_uniform_rayleigh",
                .discipline = Discipline::PreemptionInService,
                .interarrival = DistributionSpec::uniform(0.0, 2.0),
                .parameter = "frequency",
                .grid = {0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0},
                .service = DistributionSpec::rayleigh(0.5),
                .estimators = {E::Simulate, E::Exact, E::Corollary2},
                .options = mc,
                .sim_cycles = 100'000,
                .seed = 5};
    throw InvalidArgument("unknown preset \"" + std::string(name) + "\"");
}

std::string to_csv(const SweepResult& result) {
    std::string out{kCsvHeader};
    out += '\n';
    for (const auto& r : result.rows) {
        out += format_double(r.param);
        out += ',';
        out += to_string(r.estimator);
        out += ',';
        out += r.value ? format_double(*r.value) : std::string("divergent");
        out += ',';
        if (r.ci) out += format_double(*r.ci);
        out += ',';
        out += r.applicability;
        out += '\n';
    }
    return out;
}

SweepResult parse_csv(std::string_view text) {
    SweepResult result;
    bool header = true;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        const auto line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (line.empty()) continue;
        if (header) {
            if (line != kCsvHeader) throw InvalidArgument("unexpected CSV header");
            header = false;
            continue;
        }
        const auto fields = split(line, ',');
        auto fail = [&] { return InvalidArgument("malformed CSV row " + std::to_string(line_no)); };
        if (fields.size() != 5) throw fail();
        SweepRow row;
        const auto param = parse_double(fields[0]);
        if (!param) throw fail();
        row.param = *param;
        row.estimator = parse_estimator(fields[1]);
        if (fields[2] != "divergent") {
            row.value = parse_double(fields[2]);
            if (!row.value) throw fail();
        }
        if (!fields[3].empty()) {
            row.ci = parse_double(fields[3]);
            if (!row.ci) throw fail();
        }
        row.applicability = std::string(fields[4]);
        result.rows.push_back(std::move(row));
    }
    if (header) throw InvalidArgument("CSV has no header");
    return result;
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_csv(result);
    if (!out) throw IoError("write failed for " + path.string());
}

std::optional<std::size_t> interior_minimum(std::span<const double> values) {
    if (values.size() < 3) return std::nullopt;
    const auto it = std::min_element(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(it - values.begin());
    if (idx == 0 || idx + 1 == values.size()) return std::nullopt;
    if (*it < values.front() && *it < values.back()) return idx;
    return std::nullopt;
}

}  // namespace aoi
