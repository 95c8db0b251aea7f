#include "wdm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "wdm/error.hpp"

namespace wdm {

std::uint64_t EventQueue::push(double time_s, EventKind kind)
{
    if (!(time_s >= 0.0) || !std::isfinite(time_s))
        throw std::invalid_argument("event time must be finite and non-negative");
    const auto seq = next_seq_++;
    heap_.push(Event{time_s, seq, std::move(kind)});
    return seq;
}

Event EventQueue::pop()
{
    if (heap_.empty())
        throw std::logic_error("pop from an empty event queue");
    Event event = heap_.top();
    heap_.pop();
    const std::pair key{event.time_s, event.seq};
    if (last_ && key < *last_)
        throw std::logic_error("event queue returned an event out of (time, seq) order");
    last_ = key;
    return event;
}

std::vector<RoutingTableRow> routing_table(const NetworkState& state)
{
    std::vector<RoutingTableRow> rows;
    rows.reserve(state.flows().size());
    const auto& vt = state.virtual_topology();
    for (const auto& [id, flow] : state.flows()) {
        RoutingTableRow row;
        row.flow = id;
        row.src = flow.src;
        row.dst = flow.dst;
        row.reserved_gbps = flow.reserved_gbps;
        row.lightpaths = flow.route->lightpath_ids;
        row.virtual_hops = flow.route->virtual_hops;
        for (LightpathId lp_id : row.lightpaths) {
            const auto& lp = vt.lightpath(lp_id);
            row.hops.emplace_back(lp.route, lp.wavelength);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

constexpr double kHour = 3600.0;

void validate_options(const PhysicalTopology& topology, const TrafficSpec& traffic, const SimulationOptions& o)
{
    if (o.k < 1)
        throw ValidationError("k must be >= 1");
    if (o.hours < 1)
        throw ValidationError("hours must be >= 1");
    if (!(o.fda_tol > 0.0))
        throw ValidationError("fda tolerance must be positive");
    if (o.fda_max_passes < 1)
        throw ValidationError("fda max passes must be >= 1");
    if (!(o.fda_period_s > 0.0))
        throw ValidationError("fda period must be positive");
    if (!(o.sessions.mean_holding_s > 0.0))
        throw ValidationError("mean holding time must be positive");
    if (!(o.sessions.hourly_floor >= 0.0 && o.sessions.hourly_floor <= 1.0))
        throw ValidationError("hourly floor must be in [0, 1]");
    if (o.full_audit_every < 1)
        throw ValidationError("full audit interval must be >= 1");
    if (traffic.matrix.num_nodes() != topology.num_nodes())
        throw ValidationError("traffic matrix has " + std::to_string(traffic.matrix.num_nodes()) +
                              " rows but the topology has " + std::to_string(topology.num_nodes()) + " nodes");
}

nlohmann::ordered_json route_json(const std::optional<VirtualRoute>& route)
{
    if (!route)
        return nullptr;
    return route->lightpath_ids;
}

class Simulator {
public:
    Simulator(std::shared_ptr<const PhysicalTopology> topology, const TrafficSpec& traffic,
              const SimulationOptions& options)
        : topology_(std::move(topology)), traffic_(traffic), options_(options), state_(topology_),
          hourly_(static_cast<size_t>(options.hours))
    {
        for (const auto& node : topology_->nodes())
            timezones_.push_back(node.timezone_offset_h);
        for (int h = 0; h < options.hours; ++h)
            hourly_[static_cast<size_t>(h)].hour = h;
    }

    SimulationResult run()
    {
        schedule_fixed_events();
        while (!queue_.empty()) {
            Event event = queue_.pop();
            const bool finished = dispatch(event);
            ++events_;
            audit(false);
            if (finished)
                break;
        }
        audit(true);

        SimulationResult result{std::move(hourly_), state_, routing_table(state_), std::move(trace_),
                                trace_truncated_, audits_, events_, offered_, admitted_, blocked_};
        return result;
    }

private:
    void schedule_fixed_events()
    {
        const double horizon = kHour * options_.hours;
        // (time, order): an FDA run due at an hour boundary precedes the boundary.
        std::vector<std::tuple<double, int, EventKind>> fixed;
        for (int h = 0; h <= options_.hours; ++h)
            fixed.emplace_back(kHour * h, 1, HourBoundaryEvent{h});
        if (options_.fda_enabled) {
            for (long long j = 1; options_.fda_period_s * static_cast<double>(j) <= horizon; ++j)
                fixed.emplace_back(options_.fda_period_s * static_cast<double>(j), 0, FdaTriggerEvent{});
        }
        std::ranges::stable_sort(fixed, [](const auto& a, const auto& b) {
            return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b) : std::get<1>(a) < std::get<1>(b);
        });
        for (auto& [t, order, kind] : fixed)
            queue_.push(t, std::move(kind));
    }

    int hour_index(double t) const
    {
        const auto h = static_cast<int>(std::floor(t / kHour));
        return std::clamp(h, 0, options_.hours - 1);
    }

    bool dispatch(const Event& event)
    {
        return std::visit([&](const auto& kind) { return handle(event, kind); }, event.kind);
    }

    bool handle(const Event& event, const FlowArrivalEvent& e)
    {
        const auto& a = e.arrival;
        Flow flow;
        flow.id = next_flow_id_++;
        flow.src = a.src;
        flow.dst = a.dst;
        flow.reserved_gbps = a.reserved_gbps;
        flow.model = a.model;

        const AdmissionOutcome outcome = admit_flow(state_, flow, options_.k);
        auto& snap = hourly_[static_cast<size_t>(hour_index(event.time_s))];
        ++snap.offered_flows;
        ++offered_;
        const bool blocked = outcome.decision == AdmissionDecision::Blocked;
        if (blocked) {
            ++snap.blocked_flows;
            ++blocked_;
        } else {
            ++snap.admitted_flows;
            ++admitted_;
            queue_.push(event.time_s + a.holding_s, FlowDepartureEvent{flow.id});
        }

        if (tracing()) {
            nlohmann::ordered_json stages = nlohmann::ordered_json::array();
            for (auto s : outcome.stages_tried)
                stages.push_back(std::string(to_string(s)));
            nlohmann::ordered_json detail{{"flow", flow.id},
                                          {"src", flow.src},
                                          {"dst", flow.dst},
                                          {"reserved_gbps", flow.reserved_gbps},
                                          {"class", std::string(to_string(flow.model))},
                                          {"decision", std::string(to_string(outcome.decision))},
                                          {"stages", stages},
                                          {"route", route_json(outcome.route)}};
            detail["new_lightpath"] = outcome.new_lightpath ? nlohmann::ordered_json(*outcome.new_lightpath) : nullptr;
            detail["direct_failure"] = outcome.direct_failure
                                           ? nlohmann::ordered_json(std::string(to_string(*outcome.direct_failure)))
                                           : nullptr;
            if (!outcome.reason.empty())
                detail["reason"] = outcome.reason;
            record(event, "arrival", std::move(detail));
        }
        return false;
    }

    bool handle(const Event& event, const FlowDepartureEvent& e)
    {
        const auto reclaimed = terminate_flow(state_, e.flow);
        if (tracing())
            record(event, "departure", {{"flow", e.flow}, {"reclaimed_lightpaths", reclaimed}});
        return false;
    }

    bool handle(const Event& event, const HourBoundaryEvent& e)
    {
        if (e.hour > 0)
            close_hour(e.hour - 1);
        if (tracing())
            record(event, "hour", {{"hour", e.hour}});
        if (e.hour >= options_.hours)
            return true;

        Rng rng(options_.seed, static_cast<std::uint64_t>(e.hour) + 1);
        for (auto& arrival : spawn_flows(traffic_.matrix, traffic_.models, timezones_, e.hour, rng, options_.sessions))
            queue_.push(arrival.time_s, FlowArrivalEvent{arrival});
        return false;
    }

    bool handle(const Event& event, const FdaTriggerEvent&)
    {
        auto& snap = hourly_[static_cast<size_t>(hour_index(std::ceil(event.time_s / kHour) * kHour - kHour))];
        nlohmann::ordered_json detail;
        if (state_.flows().empty()) {
            detail = {{"skipped", "no traffic"}};
        } else {
            const FdaReport report = fda_reroute(state_, options_.fda_tol, options_.fda_max_passes);
            ++snap.fda_runs;
            snap.fda_moves += report.moves;
            snap.fda_delay_before_s = report.delay_before_s;
            detail = {{"passes", report.passes},
                      {"moves", report.moves},
                      {"delay_before_s", report.delay_before_s},
                      {"delay_after_s", report.delay_after_s},
                      {"converged", report.converged},
                      {"reclaimed_lightpaths", report.reclaimed}};
        }
        if (tracing())
            record(event, "fda", std::move(detail));
        return false;
    }

    void close_hour(int hour)
    {
        auto& snap = hourly_[static_cast<size_t>(hour)];
        snap.blocking_ratio =
            snap.offered_flows > 0 ? static_cast<double>(snap.blocked_flows) / static_cast<double>(snap.offered_flows)
                                   : 0.0;
        const auto& vt = state_.virtual_topology();
        snap.active_flows = static_cast<long long>(state_.flows().size());
        snap.active_lightpaths = static_cast<long long>(vt.lightpaths().size());
        snap.wavelength_utilization = static_cast<double>(vt.occupancy().occupied_count()) /
                                      static_cast<double>(vt.occupancy().total_channels());
        if (!state_.flows().empty()) {
            snap.avg_packet_delay_s = average_packet_delay(state_);
            double hops = 0.0;
            for (const auto& [id, flow] : state_.flows())
                hops += flow.route->virtual_hops;
            snap.mean_virtual_hops = hops / static_cast<double>(state_.flows().size());
        }
    }

    bool tracing()
    {
        if (!options_.trace)
            return false;
        if (!options_.force_trace && static_cast<long long>(trace_.size()) >= options_.trace_limit) {
            trace_truncated_ = true;
            return false;
        }
        return true;
    }

    void record(const Event& event, const char* kind, nlohmann::ordered_json detail)
    {
        nlohmann::ordered_json line{{"time_s", event.time_s}, {"seq", event.seq}, {"kind", kind}, {"detail", std::move(detail)}};
        trace_.push_back(line.dump());
    }

    void audit(bool force_full)
    {
        auto issues = state_.audit_fast();
        ++audits_.fast;
        if (force_full || events_ % options_.full_audit_every == 0) {
            auto full = state_.audit_full();
            issues.insert(issues.end(), full.begin(), full.end());
            ++audits_.full;
        }
        if (!issues.empty()) {
            audits_.violations += static_cast<long long>(issues.size());
            throw AuditError("audit failed after event " + std::to_string(events_) + ": " + issues.front());
        }
    }

    std::shared_ptr<const PhysicalTopology> topology_;
    const TrafficSpec& traffic_;
    SimulationOptions options_;
    NetworkState state_;
    EventQueue queue_;
    std::vector<int> timezones_;
    std::vector<MetricsSnapshot> hourly_;
    std::vector<std::string> trace_;
    bool trace_truncated_ = false;
    AuditStats audits_;
    FlowId next_flow_id_ = 0;
    long long events_ = 0;
    long long offered_ = 0;
    long long admitted_ = 0;
    long long blocked_ = 0;
};

} // namespace

SimulationResult run_simulation(std::shared_ptr<const PhysicalTopology> topology, const TrafficSpec& traffic,
                                const SimulationOptions& options)
{
    if (!topology)
        throw std::invalid_argument("run_simulation needs a topology");
    validate_options(*topology, traffic, options);
    return Simulator(std::move(topology), traffic, options).run();
}

} // namespace wdm
