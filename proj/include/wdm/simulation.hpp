#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "wdm/admission.hpp"
#include "wdm/fda.hpp"
#include "wdm/traffic.hpp"

namespace wdm {

struct FlowArrivalEvent {
    FlowArrival arrival;
};
struct FlowDepartureEvent {
    FlowId flow = 0;
};
struct HourBoundaryEvent {
    int hour = 0;
};
struct FdaTriggerEvent {};

using EventKind = std::variant<FlowArrivalEvent, FlowDepartureEvent, HourBoundaryEvent, FdaTriggerEvent>;

struct Event {
    double time_s = 0.0;
    std::uint64_t seq = 0;
    EventKind kind;
};

/// Min-queue on (time, seq). seq is assigned at push time, so simultaneous
/// events pop in insertion order.
class EventQueue {
public:
    std::uint64_t push(double time_s, EventKind kind);
    /// Throws std::logic_error if the popped event precedes the previous one.
    Event pop();
    bool empty() const { return heap_.empty(); }
    size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const
        {
            return a.time_s != b.time_s ? a.time_s > b.time_s : a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
    std::optional<std::pair<double, std::uint64_t>> last_;
};

struct MetricsSnapshot {
    int hour = 0;
    long long offered_flows = 0;
    long long admitted_flows = 0;
    long long blocked_flows = 0;
    double blocking_ratio = 0.0;
    long long active_flows = 0;
    long long active_lightpaths = 0;
    double wavelength_utilization = 0.0;
    /// Empty when no flow is active ("no traffic"); may be +inf.
    std::optional<double> avg_packet_delay_s;
    double mean_virtual_hops = 0.0;
    int fda_runs = 0;
    int fda_moves = 0;
    /// Delay before the last FDA run of the hour, if one ran with traffic.
    std::optional<double> fda_delay_before_s;

    bool operator==(const MetricsSnapshot&) const = default;
};

struct SimulationOptions {
    int k = kDefaultKsp;
    std::uint64_t seed = 1;
    int hours = 24;
    bool fda_enabled = true;
    double fda_tol = kDefaultFdaTolerance;
    int fda_max_passes = kDefaultFdaMaxPasses;
    double fda_period_s = 3600.0;
    SessionOptions sessions;
    long long full_audit_every = 10000;
    bool trace = true;
    /// Keep tracing past trace_limit events.
    bool force_trace = false;
    long long trace_limit = 1000000;
};

struct RoutingTableRow {
    FlowId flow = 0;
    NodeId src = 0;
    NodeId dst = 0;
    double reserved_gbps = 0.0;
    std::vector<LightpathId> lightpaths;
    int virtual_hops = 0;
    /// Per lightpath on the route: its fibers and wavelength.
    std::vector<std::pair<std::vector<LinkId>, int>> hops;

    bool operator==(const RoutingTableRow&) const = default;
};

struct AuditStats {
    long long fast = 0;
    long long full = 0;
    long long violations = 0;
};

struct SimulationResult {
    std::vector<MetricsSnapshot> hourly;
    NetworkState final_state;
    std::vector<RoutingTableRow> routing_table;
    /// NDJSON records {time_s, seq, kind, detail}, one per line, no newline.
    std::vector<std::string> trace;
    bool trace_truncated = false;
    AuditStats audits;
    long long events_processed = 0;
    long long offered_flows = 0;
    long long admitted_flows = 0;
    long long blocked_flows = 0;
};

/// One row per Active flow, ascending flow id.
std::vector<RoutingTableRow> routing_table(const NetworkState& state);

/// Runs the flow-level simulation for options.hours hours. Every event is
/// followed by a fast audit, every options.full_audit_every events and the end
/// of the run by a full audit; a violation throws AuditError. Output is a pure
/// function of the inputs and options.seed.
SimulationResult run_simulation(std::shared_ptr<const PhysicalTopology> topology, const TrafficSpec& traffic,
                                const SimulationOptions& options);

} // namespace wdm
