#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "aoi/distributions.hpp"
#include "aoi/types.hpp"

namespace aoi {

struct SimConfig {
    DistributionSpec interarrival;
    DistributionSpec service;
    Discipline discipline = Discipline::Dropping;
    std::uint64_t target_cycles = 100'000;  // successful deliveries measured
    std::uint64_t seed = 1;
    std::uint64_t max_events = 0;  // arrival budget; 0 means 1000 * target_cycles
};

/// One renewal cycle, from a successful arrival to the next one.
///
/// `wait` runs from the delivery of this cycle's update to the next successful
/// arrival, so `effective_interarrival == wait + busy` in both disciplines.
/// Under preemption `wait` therefore includes service attempts that were
/// later preempted.
struct CycleRecord {
    double effective_interarrival = 0.0;  // G
    double wait = 0.0;                    // W
    double busy = 0.0;                    // S (dropping) or the completed service S~ (preemption)
    std::uint64_t arrivals = 0;           // K, including the next successful arrival
};

enum class TraceEventKind { ArrivalSuccess, ArrivalDropped, ArrivalPreempt, Departure };

std::string_view to_string(TraceEventKind kind) noexcept;

struct TraceEvent {
    double time = 0.0;
    TraceEventKind kind = TraceEventKind::ArrivalSuccess;
    std::optional<double> age_after;  // empty before the first delivery
};

using TraceSink = std::function<void(const TraceEvent&)>;

/// Writes `time,event,age_after_event` rows; call `header` once first.
class TraceCsvWriter {
public:
    explicit TraceCsvWriter(std::ostream& out);
    void header();
    void operator()(const TraceEvent& event);

private:
    std::ostream* out_;
};

struct SimResult {
    AgeEstimate estimate;
    std::vector<CycleRecord> cycles;
    double trailing_busy = 0.0;  // busy time of the delivery closing the window

    // Independent accounting: event-by-event integral of the sawtooth over
    // [first delivery, last delivery].
    double window_area = 0.0;
    double window_length = 0.0;
    double direct_average = 0.0;

    std::uint64_t arrivals = 0;
};

/// Runs the G/G/1/1 simulation. Measurement starts at the first delivery.
/// Throws DivergentAge when the arrival budget runs out first.
SimResult run_simulation(const SimConfig& config, const TraceSink& trace = {});

/// Area of the age curve attributed to cycle n: ((G_n + busy_{n+1})^2 - busy_{n+1}^2) / 2.
double triangle_area(double effective_interarrival, double next_busy) noexcept;

struct SampleMoment {
    double mean = 0.0;
    double std_error = 0.0;
};

struct CycleStatistics {
    std::size_t cycles = 0;
    SampleMoment effective_interarrival;         // E[G]
    SampleMoment effective_interarrival_sq;      // E[G^2]
    SampleMoment arrivals;                       // E[K]
    SampleMoment arrivals_sq;                    // E[K^2]
    SampleMoment wait;                           // E[W]
    SampleMoment busy;                           // E[S] or E[S~]
    std::optional<double> success_probability;   // 1 / E[K], preemption only
};

/// Needs at least two records.
CycleStatistics cycle_statistics(std::span<const CycleRecord> records, Discipline discipline);

/// Wald check: mean and standard error of G_n - K_n E[Y] over the cycles.
struct WaldCheck {
    double difference = 0.0;
    double std_error = 0.0;
    bool within(double sigmas) const noexcept;
};

WaldCheck wald_check(std::span<const CycleRecord> records, double mean_interarrival);

}  // namespace aoi
