#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wdm/topology.hpp"

namespace wdm {

using LightpathId = int;
using FlowId = long long;

inline constexpr LightpathId kFreeChannel = -1;

/// Residual-capacity comparisons tolerate this much floating slack (Gbps).
inline constexpr double kCapacityEpsilon = 1e-9;

/// (fiber, wavelength) -> lightpath map, stored densely per fiber.
class WavelengthOccupancy {
public:
    WavelengthOccupancy() = default;
    explicit WavelengthOccupancy(const PhysicalTopology& topology);
    explicit WavelengthOccupancy(std::vector<int> wavelengths_per_link);

    int num_links() const { return static_cast<int>(channels_.size()); }
    int num_wavelengths(LinkId link) const
    {
        return static_cast<int>(channels_.at(static_cast<size_t>(link)).size());
    }

    bool is_free(LinkId link, int wavelength) const { return owner(link, wavelength) == kFreeChannel; }
    LightpathId owner(LinkId link, int wavelength) const
    {
        return channels_.at(static_cast<size_t>(link)).at(static_cast<size_t>(wavelength));
    }

    void occupy(LinkId link, int wavelength, LightpathId lightpath);
    void release(LinkId link, int wavelength, LightpathId lightpath);

    long long occupied_count() const { return occupied_; }
    long long total_channels() const;

    bool operator==(const WavelengthOccupancy&) const = default;

private:
    std::vector<std::vector<LightpathId>> channels_;
    long long occupied_ = 0;
};

struct Lightpath {
    LightpathId id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    std::vector<LinkId> route;
    int wavelength = 0;
    double capacity_gbps = 0.0;
    /// Always the sum of `flows` values, accumulated in flow-id order.
    double carried_gbps = 0.0;
    /// flow id -> reserved rate.
    std::map<FlowId, double> flows;
    double length_km = 0.0;
    double propagation_delay_s = 0.0;

    double residual_gbps() const { return capacity_gbps - carried_gbps; }
    bool operator==(const Lightpath&) const = default;
};

/// Upper layer: the live set of lightpaths with wavelength and transceiver
/// bookkeeping. Mutated only through add/remove/attach/detach, which keep
/// every invariant checked by audit_full().
class VirtualTopology {
public:
    explicit VirtualTopology(std::shared_ptr<const PhysicalTopology> physical);

    const PhysicalTopology& physical() const { return *physical_; }
    const std::shared_ptr<const PhysicalTopology>& physical_ptr() const { return physical_; }
    const WavelengthOccupancy& occupancy() const { return occupancy_; }
    const std::map<LightpathId, Lightpath>& lightpaths() const { return lightpaths_; }
    const Lightpath& lightpath(LightpathId id) const;
    bool contains(LightpathId id) const { return lightpaths_.contains(id); }

    int tx_used(NodeId n) const { return tx_used_.at(static_cast<size_t>(n)); }
    int rx_used(NodeId n) const { return rx_used_.at(static_cast<size_t>(n)); }
    bool transmitter_available(NodeId n) const;
    bool receiver_available(NodeId n) const;

    /// Registers a lightpath over `route` on `wavelength`. With no explicit id
    /// the next sequential id is used. Throws std::logic_error if the route is
    /// not contiguous from src to dst, a channel is taken, the wavelength does
    /// not exist on some fiber, or a transceiver limit would be exceeded.
    LightpathId add_lightpath(NodeId src, NodeId dst, std::vector<LinkId> route, int wavelength,
                              std::optional<LightpathId> id = std::nullopt);

    /// Removes a lightpath carrying no flows and frees its channels and transceivers.
    void remove_lightpath(LightpathId id);

    void attach_flow(LightpathId id, FlowId flow, double rate_gbps);
    void detach_flow(LightpathId id, FlowId flow);

    LightpathId next_lightpath_id() const { return next_id_; }

    /// Cheap consistency check on the incremental counters.
    std::vector<std::string> audit_fast() const;
    /// Recomputes occupancy, transceiver counts and carried sums from the
    /// lightpath list and compares them with the stored values.
    std::vector<std::string> audit_full() const;

    /// Structural equality: lightpaths, occupancy and transceiver counters.
    /// The id counter is not part of the state.
    bool operator==(const VirtualTopology& other) const;

private:
    static double sum_rates(const std::map<FlowId, double>& flows);

    std::shared_ptr<const PhysicalTopology> physical_;
    WavelengthOccupancy occupancy_;
    std::map<LightpathId, Lightpath> lightpaths_;
    std::vector<int> tx_used_;
    std::vector<int> rx_used_;
    long long route_links_total_ = 0;
    LightpathId next_id_ = 0;
};

/// Fiber length of a link sequence, summed in route order.
double route_length_km(const PhysicalTopology& topology, std::span<const LinkId> route);

/// True when `route` is non-empty, starts at src, ends at dst and each link
/// starts where the previous one ended.
bool route_is_contiguous(const PhysicalTopology& topology, std::span<const LinkId> route,
                         NodeId src, NodeId dst);

} // namespace wdm
