#include "wdm/admission.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace wdm {

NetworkState::NetworkState(std::shared_ptr<const PhysicalTopology> physical) : vt_(std::move(physical)) {}

const Flow& NetworkState::flow(FlowId id) const
{
    auto it = flows_.find(id);
    if (it == flows_.end())
        throw std::out_of_range("flow " + std::to_string(id) + " is not active");
    return it->second;
}

bool NetworkState::route_connects(const VirtualRoute& route, NodeId src, NodeId dst) const
{
    if (route.lightpath_ids.empty() || route.virtual_hops != static_cast<int>(route.lightpath_ids.size()))
        return false;
    NodeId at = src;
    for (LightpathId id : route.lightpath_ids) {
        if (!vt_.contains(id))
            return false;
        const auto& lp = vt_.lightpath(id);
        if (lp.src != at)
            return false;
        at = lp.dst;
    }
    return at == dst;
}

void NetworkState::install_flow(Flow flow, VirtualRoute route)
{
    if (flows_.contains(flow.id))
        throw std::logic_error("flow " + std::to_string(flow.id) + " is already active");
    if (!(flow.reserved_gbps > 0.0))
        throw std::invalid_argument("flow rate must be positive");
    if (!route_connects(route, flow.src, flow.dst))
        throw std::logic_error("route of flow " + std::to_string(flow.id) + " is not contiguous");
    for (LightpathId id : route.lightpath_ids) {
        if (vt_.lightpath(id).residual_gbps() + kCapacityEpsilon < flow.reserved_gbps)
            throw std::logic_error("lightpath " + std::to_string(id) + " lacks residual capacity");
    }
    for (LightpathId id : route.lightpath_ids)
        vt_.attach_flow(id, flow.id, flow.reserved_gbps);
    attachments_ += route.virtual_hops;
    flow.route = std::move(route);
    flow.state = FlowState::Active;
    flows_.emplace(flow.id, std::move(flow));
}

Flow NetworkState::remove_flow(FlowId id)
{
    auto it = flows_.find(id);
    if (it == flows_.end())
        throw std::out_of_range("flow " + std::to_string(id) + " is not active");
    Flow flow = std::move(it->second);
    flows_.erase(it);
    for (LightpathId lp : flow.route->lightpath_ids)
        vt_.detach_flow(lp, flow.id);
    attachments_ -= flow.route->virtual_hops;
    return flow;
}

void NetworkState::reroute_flow(FlowId id, VirtualRoute route)
{
    Flow flow = remove_flow(id);
    const VirtualRoute previous = *flow.route;
    try {
        install_flow(flow, std::move(route));
    } catch (...) {
        install_flow(std::move(flow), previous);
        throw;
    }
}

double NetworkState::offered_gbps() const
{
    double total = 0.0;
    for (const auto& [id, flow] : flows_)
        total += flow.reserved_gbps;
    return total;
}

std::vector<std::string> NetworkState::audit_fast() const
{
    auto issues = vt_.audit_fast();
    long long attached = 0;
    for (const auto& [id, lp] : vt_.lightpaths())
        attached += static_cast<long long>(lp.flows.size());
    if (attached != attachments_)
        issues.push_back("flow attachment count drifted");
    return issues;
}

std::vector<std::string> NetworkState::audit_full() const
{
    auto issues = vt_.audit_full();
    long long expected_attachments = 0;
    for (const auto& [id, flow] : flows_) {
        const std::string tag = "flow " + std::to_string(id);
        if (flow.id != id)
            issues.push_back(tag + ": key/id mismatch");
        if (flow.state != FlowState::Active || !flow.route) {
            issues.push_back(tag + ": stored flow is not active with a route");
            continue;
        }
        if (!route_connects(*flow.route, flow.src, flow.dst)) {
            issues.push_back(tag + ": route does not connect its endpoints");
            continue;
        }
        double delay = 0.0;
        for (LightpathId lp_id : flow.route->lightpath_ids) {
            const auto& lp = vt_.lightpath(lp_id);
            delay += lp.propagation_delay_s;
            auto it = lp.flows.find(id);
            if (it == lp.flows.end() || it->second != flow.reserved_gbps)
                issues.push_back(tag + ": lightpath " + std::to_string(lp_id) + " does not list it");
        }
        if (std::abs(delay - flow.route->delay_s) > 1e-12)
            issues.push_back(tag + ": cached route delay is stale");
        expected_attachments += flow.route->virtual_hops;
    }
    for (const auto& [lp_id, lp] : vt_.lightpaths()) {
        for (const auto& [flow_id, rate] : lp.flows) {
            if (!flows_.contains(flow_id))
                issues.push_back("lightpath " + std::to_string(lp_id) + ": lists inactive flow " +
                                 std::to_string(flow_id));
        }
    }
    if (expected_attachments != attachments_)
        issues.push_back("flow attachment count differs from recomputed value");
    return issues;
}

std::string_view to_string(LightpathFailure f)
{
    switch (f) {
    case LightpathFailure::NoTransmitter:
        return "no-transmitter";
    case LightpathFailure::NoReceiver:
        return "no-receiver";
    case LightpathFailure::NoWavelength:
        return "no-wavelength";
    case LightpathFailure::NoPath:
        return "no-path";
    }
    return "unknown";
}

std::string_view to_string(AdmissionStage s)
{
    switch (s) {
    case AdmissionStage::ExistingRoute:
        return "existing-route";
    case AdmissionStage::DirectLightpath:
        return "direct-lightpath";
    case AdmissionStage::SourceAdjacent:
        return "source-adjacent";
    case AdmissionStage::DestinationAdjacent:
        return "destination-adjacent";
    }
    return "unknown";
}

std::string_view to_string(AdmissionDecision d)
{
    switch (d) {
    case AdmissionDecision::RoutedExisting:
        return "routed-existing";
    case AdmissionDecision::RoutedNewDirect:
        return "routed-new-direct";
    case AdmissionDecision::RoutedViaSourceAdjacent:
        return "routed-via-source-adjacent";
    case AdmissionDecision::RoutedViaDestinationAdjacent:
        return "routed-via-destination-adjacent";
    case AdmissionDecision::Blocked:
        return "blocked";
    }
    return "unknown";
}

double LightpathPlan::propagation_delay_s() const
{
    return wdm::propagation_delay_s(route.length_km);
}

std::variant<LightpathPlan, LightpathFailure> plan_lightpath(const VirtualTopology& vt, NodeId s, NodeId d,
                                                             int k)
{
    if (s == d)
        throw std::invalid_argument("plan_lightpath: source equals destination");
    if (!vt.transmitter_available(s))
        return LightpathFailure::NoTransmitter;
    if (!vt.receiver_available(d))
        return LightpathFailure::NoReceiver;

    const auto routes = k_shortest_paths(vt.physical(), s, d, k);
    if (routes.empty())
        return LightpathFailure::NoPath;
    for (const auto& route : routes) {
        if (auto w = first_fit_wavelength(vt.occupancy(), route.links))
            return LightpathPlan{s, d, route, *w};
    }
    return LightpathFailure::NoWavelength;
}

namespace {

LightpathId commit(VirtualTopology& vt, const LightpathPlan& plan)
{
    return vt.add_lightpath(plan.src, plan.dst, plan.route.links, plan.wavelength);
}

struct AdjacentChoice {
    LightpathId existing = 0;
    NodeId via = 0;
    LightpathPlan plan;
    double delay_s = std::numeric_limits<double>::infinity();
};

/// Existing lightpaths a->b with enough residual, the fastest one (tie: lowest
/// id) per far-end node, iterated in ascending far-end order.
std::map<NodeId, const Lightpath*> feasible_neighbours(const VirtualTopology& vt, NodeId anchor,
                                                       bool outgoing, double rate)
{
    std::map<NodeId, const Lightpath*> best;
    for (const auto& [id, lp] : vt.lightpaths()) {
        if ((outgoing ? lp.src : lp.dst) != anchor)
            continue;
        if (lp.residual_gbps() + kCapacityEpsilon < rate)
            continue;
        const NodeId far = outgoing ? lp.dst : lp.src;
        auto [it, inserted] = best.emplace(far, &lp);
        if (!inserted && lp.propagation_delay_s < it->second->propagation_delay_s)
            it->second = &lp;
    }
    return best;
}

} // namespace

std::variant<LightpathId, LightpathFailure> establish_lightpath(VirtualTopology& vt, NodeId s, NodeId d, int k)
{
    auto planned = plan_lightpath(vt, s, d, k);
    if (auto* failure = std::get_if<LightpathFailure>(&planned))
        return *failure;
    return commit(vt, std::get<LightpathPlan>(planned));
}

AdmissionOutcome admit_flow(NetworkState& state, const Flow& flow, int k)
{
    AdmissionOutcome outcome;
    auto& vt = state.virtual_topology();
    const double rate = flow.reserved_gbps;
    if (!(rate > 0.0))
        throw std::invalid_argument("admit_flow: reserved rate must be positive");
    if (flow.src == flow.dst)
        throw std::invalid_argument("admit_flow: source equals destination");
    if (state.is_active(flow.id))
        throw std::logic_error("admit_flow: flow " + std::to_string(flow.id) + " is already active");
    if (rate > state.physical().lightpath_capacity_gbps() + kCapacityEpsilon) {
        outcome.reason = "reserved rate exceeds lightpath capacity";
        return outcome;
    }

    const auto accept = [&](AdmissionDecision decision, VirtualRoute route,
                            std::optional<LightpathId> created) {
        state.install_flow(flow, route);
        outcome.decision = decision;
        outcome.route = std::move(route);
        outcome.new_lightpath = created;
        return outcome;
    };

    outcome.stages_tried.push_back(AdmissionStage::ExistingRoute);
    if (auto route = cspf_virtual_route(vt, flow.src, flow.dst, rate))
        return accept(AdmissionDecision::RoutedExisting, std::move(*route), std::nullopt);

    outcome.stages_tried.push_back(AdmissionStage::DirectLightpath);
    auto direct = plan_lightpath(vt, flow.src, flow.dst, k);
    if (auto* plan = std::get_if<LightpathPlan>(&direct)) {
        const LightpathId id = commit(vt, *plan);
        return accept(AdmissionDecision::RoutedNewDirect, make_virtual_route(vt, {id}), id);
    }
    outcome.direct_failure = std::get<LightpathFailure>(direct);

    outcome.stages_tried.push_back(AdmissionStage::SourceAdjacent);
    {
        std::optional<AdjacentChoice> chosen;
        for (const auto& [n, existing] : feasible_neighbours(vt, flow.src, true, rate)) {
            if (n == flow.dst)
                continue;
            auto candidate = plan_lightpath(vt, n, flow.dst, k);
            auto* plan = std::get_if<LightpathPlan>(&candidate);
            if (!plan)
                continue;
            const double delay = existing->propagation_delay_s + plan->propagation_delay_s();
            if (!chosen || delay < chosen->delay_s)
                chosen = AdjacentChoice{existing->id, n, *plan, delay};
        }
        if (chosen) {
            const LightpathId id = commit(vt, chosen->plan);
            return accept(AdmissionDecision::RoutedViaSourceAdjacent,
                          make_virtual_route(vt, {chosen->existing, id}), id);
        }
    }

    outcome.stages_tried.push_back(AdmissionStage::DestinationAdjacent);
    {
        std::optional<AdjacentChoice> chosen;
        for (const auto& [m, existing] : feasible_neighbours(vt, flow.dst, false, rate)) {
            if (m == flow.src)
                continue;
            auto candidate = plan_lightpath(vt, flow.src, m, k);
            auto* plan = std::get_if<LightpathPlan>(&candidate);
            if (!plan)
                continue;
            const double delay = plan->propagation_delay_s() + existing->propagation_delay_s;
            if (!chosen || delay < chosen->delay_s)
                chosen = AdjacentChoice{existing->id, m, *plan, delay};
        }
        if (chosen) {
            const LightpathId id = commit(vt, chosen->plan);
            return accept(AdmissionDecision::RoutedViaDestinationAdjacent,
                          make_virtual_route(vt, {id, chosen->existing}), id);
        }
    }

    outcome.decision = AdmissionDecision::Blocked;
    return outcome;
}

std::vector<LightpathId> terminate_flow(NetworkState& state, FlowId flow_id)
{
    if (!state.is_active(flow_id))
        throw std::out_of_range("terminate_flow: flow " + std::to_string(flow_id) + " is not active");
    const Flow flow = state.remove_flow(flow_id);
    std::vector<LightpathId> reclaimed;
    auto& vt = state.virtual_topology();
    for (LightpathId id : flow.route->lightpath_ids) {
        if (vt.contains(id) && vt.lightpath(id).flows.empty()) {
            vt.remove_lightpath(id);
            reclaimed.push_back(id);
        }
    }
    return reclaimed;
}

} // namespace wdm
