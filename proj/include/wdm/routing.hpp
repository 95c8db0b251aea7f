#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wdm/topology.hpp"
#include "wdm/virtual_topology.hpp"

namespace wdm {

/// Default depth of the k-shortest-path search used for lightpath setup.
inline constexpr int kDefaultKsp = 3;

struct PhysicalRoute {
    std::vector<LinkId> links;
    int hop_count = 0;
    double length_km = 0.0;

    bool operator==(const PhysicalRoute&) const = default;
};

struct VirtualRoute {
    std::vector<LightpathId> lightpath_ids;
    int virtual_hops = 0;
    double delay_s = 0.0;

    bool operator==(const VirtualRoute&) const = default;
};

PhysicalRoute make_physical_route(const PhysicalTopology& topology, std::vector<LinkId> links);
VirtualRoute make_virtual_route(const VirtualTopology& vt, std::vector<LightpathId> lightpaths);

/// Route order: fewer hops, then shorter (lengths within 1e-9 relative tie),
/// then lexicographically smaller link-id sequence.
bool route_order_less(const PhysicalRoute& a, const PhysicalRoute& b);

/// Node sequence visited by a contiguous route, starting at its source.
std::vector<NodeId> route_nodes(const PhysicalTopology& topology, std::span<const LinkId> links);

/// Up to k loop-free routes from s to d in route order (Yen). Empty when d is
/// unreachable. Throws std::invalid_argument if s == d, k < 1, or a node id is
/// out of range.
std::vector<PhysicalRoute> k_shortest_paths(const PhysicalTopology& topology, NodeId s, NodeId d,
                                            int k);

/// Lowest wavelength index free on every fiber of `route` and present on all
/// of them.
std::optional<int> first_fit_wavelength(const WavelengthOccupancy& occupancy,
                                        std::span<const LinkId> route);

/// Capacitated shortest path over existing lightpaths: only lightpaths with
/// residual >= rate_gbps are usable; minimizes virtual hops, then delay, then
/// the lightpath-id sequence.
std::optional<VirtualRoute> cspf_virtual_route(const VirtualTopology& vt, NodeId s, NodeId d,
                                               double rate_gbps);

} // namespace wdm
