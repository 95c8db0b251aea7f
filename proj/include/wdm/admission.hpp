#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wdm/flow.hpp"
#include "wdm/routing.hpp"
#include "wdm/virtual_topology.hpp"

namespace wdm {

/// Virtual topology plus the set of Active flows routed over it.
class NetworkState {
public:
    explicit NetworkState(std::shared_ptr<const PhysicalTopology> physical);

    const PhysicalTopology& physical() const { return vt_.physical(); }
    VirtualTopology& virtual_topology() { return vt_; }
    const VirtualTopology& virtual_topology() const { return vt_; }

    /// Active flows keyed by id.
    const std::map<FlowId, Flow>& flows() const { return flows_; }
    const Flow& flow(FlowId id) const;
    bool is_active(FlowId id) const { return flows_.contains(id); }

    /// Places `flow` on `route` and marks it Active. Throws std::logic_error if
    /// the id is already active, the route does not lead from src to dst, or a
    /// lightpath lacks residual capacity.
    void install_flow(Flow flow, VirtualRoute route);

    /// Detaches an Active flow from its lightpaths and forgets it. Lightpaths
    /// are left in place even if they become empty.
    Flow remove_flow(FlowId id);

    /// Moves an Active flow onto a different route.
    void reroute_flow(FlowId id, VirtualRoute route);

    /// Sum of reserved rates of Active flows.
    double offered_gbps() const;

    std::vector<std::string> audit_fast() const;
    std::vector<std::string> audit_full() const;

    bool operator==(const NetworkState& other) const
    {
        return vt_ == other.vt_ && flows_ == other.flows_;
    }

private:
    bool route_connects(const VirtualRoute& route, NodeId src, NodeId dst) const;

    VirtualTopology vt_;
    std::map<FlowId, Flow> flows_;
    long long attachments_ = 0;
};

enum class LightpathFailure { NoTransmitter, NoReceiver, NoWavelength, NoPath };

std::string_view to_string(LightpathFailure f);

/// A feasible (route, wavelength) choice for a new lightpath, not yet committed.
struct LightpathPlan {
    NodeId src = 0;
    NodeId dst = 0;
    PhysicalRoute route;
    int wavelength = 0;

    double propagation_delay_s() const;
};

/// Finds where a new s->d lightpath would go without touching `vt`: checks a
/// free transmitter at s and receiver at d, then walks the k shortest routes
/// and takes the first one with a first-fit wavelength.
std::variant<LightpathPlan, LightpathFailure> plan_lightpath(const VirtualTopology& vt, NodeId s,
                                                             NodeId d, int k);

/// plan_lightpath followed by registration of the lightpath (carried = 0).
std::variant<LightpathId, LightpathFailure> establish_lightpath(VirtualTopology& vt, NodeId s, NodeId d,
                                                                int k);

enum class AdmissionStage {
    ExistingRoute = 1,
    DirectLightpath = 2,
    SourceAdjacent = 3,
    DestinationAdjacent = 4,
};

enum class AdmissionDecision {
    RoutedExisting,
    RoutedNewDirect,
    RoutedViaSourceAdjacent,
    RoutedViaDestinationAdjacent,
    Blocked,
};

std::string_view to_string(AdmissionStage s);
std::string_view to_string(AdmissionDecision d);

struct AdmissionOutcome {
    AdmissionDecision decision = AdmissionDecision::Blocked;
    std::optional<VirtualRoute> route;
    std::optional<LightpathId> new_lightpath;
    /// Stages attempted, in the order they ran.
    std::vector<AdmissionStage> stages_tried;
    /// Why the direct lightpath of stage 2 could not be set up, if it was tried.
    std::optional<LightpathFailure> direct_failure;
    /// Non-empty when blocked before the cascade started.
    std::string reason;
};

/// Runs the admission cascade for a fresh arrival and commits the first stage
/// that succeeds:
///   1. capacitated shortest path over existing lightpaths;
///   2. one new lightpath src->dst;
///   3. existing src->n plus new n->dst, smallest total delay (tie: smallest n);
///   4. new src->m plus existing m->dst, smallest total delay (tie: smallest m);
///   5. blocked.
/// Candidates in stages 3 and 4 are planned against the unchanged state, so a
/// blocked flow leaves the state untouched.
AdmissionOutcome admit_flow(NetworkState& state, const Flow& flow, int k = kDefaultKsp);

/// Removes an Active flow and tears down every lightpath of its route left
/// without flows. Returns the removed lightpath ids in route order. Throws
/// std::out_of_range for unknown or inactive flows.
std::vector<LightpathId> terminate_flow(NetworkState& state, FlowId flow_id);

} // namespace wdm
