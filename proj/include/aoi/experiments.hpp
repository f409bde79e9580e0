#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aoi/analytic.hpp"
#include "aoi/distributions.hpp"
#include "aoi/types.hpp"

namespace aoi {

enum class EstimatorKind { Simulate, Exact, Corollary1, GM11, MG11, Corollary2 };

std::string_view to_string(EstimatorKind kind) noexcept;
EstimatorKind parse_estimator(std::string_view text);

/// One-parameter family of interarrival laws evaluated against a fixed service law.
///
/// `parameter` names a field of the interarrival kind ("rate", "shift", "value",
/// "lower", "upper", "scale") or one of two rescalings applied to the whole law:
/// "mean" sets E[Y] to the grid value, "frequency" sets E[Y] to 1/value.
struct SweepSpec {
    std::string name;
    Discipline discipline = Discipline::Dropping;
    DistributionSpec interarrival;
    std::string parameter;
    std::vector<double> grid;
    DistributionSpec service;
    std::vector<EstimatorKind> estimators;
    EstimatorOptions options;
    std::uint64_t sim_cycles = 100'000;
    std::uint64_t seed = 1;  // point i uses derive_seed(seed, i)

    /// Grid nonempty and strictly increasing; estimators nonempty and valid for the discipline.
    void validate() const;
};

/// Interarrival law of grid point `value`.
DistributionSpec with_parameter(const DistributionSpec& base, std::string_view parameter, double value);

/// A row with no value is divergent; its applicability column carries the error name.
struct SweepRow {
    double param = 0.0;
    EstimatorKind estimator = EstimatorKind::Simulate;
    std::optional<double> value;
    std::optional<double> ci;
    std::string applicability;

    bool operator==(const SweepRow&) const = default;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    bool operator==(const SweepResult&) const = default;

    /// Values of one estimator in grid order; divergent points are skipped.
    std::vector<std::pair<double, SweepRow>> series(EstimatorKind kind) const;
};

/// Evaluates every estimator at every grid point. Per-point failures become divergent rows.
SweepResult run_sweep(const SweepSpec& spec);

SweepSpec sweep_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepSpec& spec);
SweepSpec load_sweep(const std::filesystem::path& path);

/// Built-in sweeps over documented grids.
std::vector<std::string> preset_names();
SweepSpec preset_sweep(std::string_view name);

/// CSV with header `param,estimator,value,ci,applicability`.
std::string to_csv(const SweepResult& result);
SweepResult parse_csv(std::string_view text);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

/// Index of an interior global minimum strictly below both end values, if any.
std::optional<std::size_t> interior_minimum(std::span<const double> values);

/// SVG line chart, one series per estimator, CI bands where a CI is reported and
/// a marker at any interior minimum.
std::string render_svg(const SweepResult& result, std::string_view title, std::string_view x_label);
void emit_chart(const SweepResult& result, const std::filesystem::path& path, std::string_view title,
                std::string_view x_label);

}  // namespace aoi
