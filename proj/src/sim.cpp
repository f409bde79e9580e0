#include "aoi/sim.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "aoi/errors.hpp"
#include "aoi/format.hpp"

namespace aoi {
namespace {

/// Piecewise-linear integral of the age curve. Inactive until the first delivery.
class SawtoothIntegrator {
public:
    void advance(double t) {
        if (!active_) return;
        const double dt = t - now_;
        area_ += age_ * dt + 0.5 * dt * dt;
        age_ += dt;
        now_ = t;
    }

    void deliver(double t, double generated_at) {
        if (!active_) {
            active_ = true;
            start_ = t;
        } else {
            advance(t);
        }
        now_ = t;
        age_ = t - generated_at;
    }

    bool active() const noexcept { return active_; }
    double age() const noexcept { return age_; }
    double area() const noexcept { return area_; }
    double length() const noexcept { return now_ - start_; }

private:
    bool active_ = false;
    double start_ = 0.0;
    double now_ = 0.0;
    double age_ = 0.0;
    double area_ = 0.0;
};

class Simulator {
public:
    Simulator(const SimConfig& config, const TraceSink& trace)
        : config_(config), trace_(trace), rng_(make_rng(config.seed)) {
        budget_ = config.max_events == 0 ? 1000 * config.target_cycles : config.max_events;
    }

    SimResult run() {
        if (config_.discipline == Discipline::Dropping)
            run_dropping();
        else
            run_preemption();
        return finish();
    }

private:
    double draw_gap() {
        if (++result_.arrivals > budget_)
            throw DivergentAge("no delivery within " + std::to_string(budget_) + " arrivals after " +
                               std::to_string(busy_.empty() ? 0 : busy_.size() - 1) + " cycles");
        return sample(config_.interarrival, rng_);
    }

    void emit(double t, TraceEventKind kind) {
        if (!trace_) return;
        TraceEvent ev{t, kind, std::nullopt};
        if (integrator_.active()) ev.age_after = integrator_.age();
        trace_(ev);
    }

    void arrival_event(double t, TraceEventKind kind) {
        integrator_.advance(t);
        emit(t, kind);
    }

    void departure_event(double t, double generated_at) {
        integrator_.deliver(t, generated_at);
        emit(t, TraceEventKind::Departure);
    }

    // Records a successful arrival at time a whose update is delivered after `busy`.
    void success(double a, double busy, std::uint64_t arrivals_since_last) {
        if (!busy_.empty()) {
            CycleRecord rec;
            rec.effective_interarrival = a - last_success_;
            rec.wait = a - last_departure_;
            rec.busy = busy_.back();
            rec.arrivals = arrivals_since_last;
            result_.cycles.push_back(rec);
        }
        busy_.push_back(busy);
        last_success_ = a;
        last_departure_ = a + busy;
    }

    bool done() const { return busy_.size() > config_.target_cycles; }

    void run_dropping() {
        double t = draw_gap();
        std::uint64_t since_last = 1;
        while (true) {
            // t is an arrival at an idle server.
            const double a = t;
            const double s = sample(config_.service, rng_);
            const double d = a + s;
            success(a, s, since_last);
            arrival_event(a, TraceEventKind::ArrivalSuccess);
            since_last = 0;
            t = a + draw_gap();
            ++since_last;
            // An arrival exactly at the departure instant finds the server idle.
            while (t < d) {
                arrival_event(t, TraceEventKind::ArrivalDropped);
                t += draw_gap();
                ++since_last;
            }
            departure_event(d, a);
            if (done()) return;
        }
    }

    void run_preemption() {
        double t = draw_gap();
        std::uint64_t since_last = 0;
        while (true) {
            const double a = t;
            const double s = sample(config_.service, rng_);
            ++since_last;
            t = a + draw_gap();
            // Completion at the instant of the next arrival counts as delivered.
            if (a + s <= t) {
                success(a, s, since_last);
                since_last = 0;
                arrival_event(a, TraceEventKind::ArrivalSuccess);
                departure_event(a + s, a);
                if (done()) return;
            } else {
                arrival_event(a, TraceEventKind::ArrivalPreempt);
            }
        }
    }

    SimResult finish() {
        const std::size_t n = result_.cycles.size();
        result_.trailing_busy = busy_.back();

        double area = 0.0;
        double length = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            area += triangle_area(result_.cycles[i].effective_interarrival, busy_[i + 1]);
            length += result_.cycles[i].effective_interarrival;
        }
        // The cycle triangles telescope to the window [first, last delivery]
        // up to these boundary terms.
        const double first = busy_.front();
        const double last = busy_.back();
        area += 0.5 * (last * last - first * first);
        length += last - first;

        AgeEstimate& est = result_.estimate;
        est.method = EstimateMethod::Simulation;
        est.cycles_used = n;
        est.value = area / length;
        est.ci_half_width = batch_means_half_width();

        result_.window_area = integrator_.area();
        result_.window_length = integrator_.length();
        result_.direct_average = result_.window_area / result_.window_length;
        return std::move(result_);
    }

    double batch_means_half_width() const {
        constexpr std::size_t kBatches = 30;
        const std::size_t n = result_.cycles.size();
        const std::size_t batches = std::min(kBatches, n);
        if (batches < 2) return std::numeric_limits<double>::infinity();
        std::vector<double> means;
        std::size_t begin = 0;
        for (std::size_t b = 0; b < batches; ++b) {
            const std::size_t size = n / batches + (b < n % batches ? 1 : 0);
            double area = 0.0;
            double length = 0.0;
            for (std::size_t i = begin; i < begin + size; ++i) {
                area += triangle_area(result_.cycles[i].effective_interarrival, busy_[i + 1]);
                length += result_.cycles[i].effective_interarrival;
            }
            means.push_back(area / length);
            begin += size;
        }
        double mu = 0.0;
        for (double m : means) mu += m;
        mu /= static_cast<double>(batches);
        double ss = 0.0;
        for (double m : means) ss += (m - mu) * (m - mu);
        const double sd = std::sqrt(ss / static_cast<double>(batches - 1));
        return kNormalQuantile95 * sd / std::sqrt(static_cast<double>(batches));
    }

    const SimConfig& config_;
    const TraceSink& trace_;
    Rng rng_;
    std::uint64_t budget_ = 0;
    SawtoothIntegrator integrator_;
    std::vector<double> busy_;  // busy time of every successful arrival so far
    double last_success_ = 0.0;
    double last_departure_ = 0.0;
    SimResult result_;
};

SampleMoment moment_of(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    double mu = 0.0;
    for (double x : xs) mu += x;
    mu /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mu) * (x - mu);
    return {mu, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

std::string_view to_string(TraceEventKind kind) noexcept {
    switch (kind) {
        case TraceEventKind::ArrivalSuccess: return "arrival_success";
        case TraceEventKind::ArrivalDropped: return "arrival_dropped";
        case TraceEventKind::ArrivalPreempt: return "arrival_preempt";
        case TraceEventKind::Departure: return "departure";
    }
    return "departure";
}

TraceCsvWriter::TraceCsvWriter(std::ostream& out) : out_(&out) {}

void TraceCsvWriter::header() { *out_ << "time,event,age_after_event\n"; }

void TraceCsvWriter::operator()(const TraceEvent& event) {
    *out_ << format_double(event.time) << ',' << to_string(event.kind) << ',';
    if (event.age_after) *out_ << format_double(*event.age_after);
    *out_ << '\n';
}

double triangle_area(double effective_interarrival, double next_busy) noexcept {
    const double outer = effective_interarrival + next_busy;
    return 0.5 * (outer * outer - next_busy * next_busy);
}

SimResult run_simulation(const SimConfig& config, const TraceSink& trace) {
    if (config.target_cycles < 1) throw InvalidArgument("target_cycles must be >= 1");
    if (config.max_events != 0 && config.max_events < config.target_cycles)
        throw InvalidArgument("max_events must be >= target_cycles");
    return Simulator(config, trace).run();
}

CycleStatistics cycle_statistics(std::span<const CycleRecord> records, Discipline discipline) {
    if (records.size() < 2) throw InvalidArgument("cycle statistics need at least two cycles");
    const std::size_t n = records.size();
    std::vector<double> g(n), g2(n), k(n), k2(n), w(n), busy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = records[i];
        g[i] = r.effective_interarrival;
        g2[i] = g[i] * g[i];
        k[i] = static_cast<double>(r.arrivals);
        k2[i] = k[i] * k[i];
        w[i] = r.wait;
        busy[i] = r.busy;
    }
    CycleStatistics s;
    s.cycles = n;
    s.effective_interarrival = moment_of(g);
    s.effective_interarrival_sq = moment_of(g2);
    s.arrivals = moment_of(k);
    s.arrivals_sq = moment_of(k2);
    s.wait = moment_of(w);
    s.busy = moment_of(busy);
    if (discipline == Discipline::PreemptionInService) s.success_probability = 1.0 / s.arrivals.mean;
    return s;
}

bool WaldCheck::within(double sigmas) const noexcept {
    return std::abs(difference) <= sigmas * std_error;
}

WaldCheck wald_check(std::span<const CycleRecord> records, double mean_interarrival) {
    if (records.size() < 2) throw InvalidArgument("Wald check needs at least two cycles");
    std::vector<double> d;
    d.reserve(records.size());
    for (const auto& r : records)
        d.push_back(r.effective_interarrival - static_cast<double>(r.arrivals) * mean_interarrival);
    const auto m = moment_of(d);
    return {m.mean, m.std_error};
}

}  // namespace aoi
