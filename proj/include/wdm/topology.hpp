#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace wdm {

using NodeId = int;
using LinkId = int;

/// Speed of light in fiber, km/s.
inline constexpr double kFiberLightSpeedKmPerS = 200000.0;

/// Default per-lightpath line rate when a topology document omits it.
inline constexpr double kDefaultLightpathCapacityGbps = 10.0;

struct Node {
    NodeId id = 0;
    std::string name;
    double x_km = 0.0;
    double y_km = 0.0;
    long long population = 0;
    std::string node_type;
    int timezone_offset_h = 0;

    bool operator==(const Node&) const = default;
};

struct FiberLink {
    LinkId id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    int num_wavelengths = 1;
    double length_km = 0.0;

    bool operator==(const FiberLink&) const = default;
};

/// Physical layer: nodes, directed fibers and per-node transceiver limits.
/// Immutable once built; share it through shared_ptr<const PhysicalTopology>.
class PhysicalTopology {
public:
    /// Validates and builds a topology. Link lengths are recomputed from
    /// node coordinates; the `length_km` field of the input links is ignored.
    /// Throws ValidationError naming the offending node or link.
    static PhysicalTopology build(std::vector<Node> nodes, std::vector<FiberLink> links,
                                  std::vector<int> max_transmitters, std::vector<int> max_receivers,
                                  double lightpath_capacity_gbps = kDefaultLightpathCapacityGbps);

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_links() const { return static_cast<int>(links_.size()); }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<FiberLink>& links() const { return links_; }
    const Node& node(NodeId id) const { return nodes_.at(static_cast<size_t>(id)); }
    const FiberLink& link(LinkId id) const { return links_.at(static_cast<size_t>(id)); }

    /// Outgoing link ids of `n`, ascending.
    std::span<const LinkId> out_links(NodeId n) const { return out_links_.at(static_cast<size_t>(n)); }

    int max_transmitters(NodeId n) const { return max_tx_.at(static_cast<size_t>(n)); }
    int max_receivers(NodeId n) const { return max_rx_.at(static_cast<size_t>(n)); }
    const std::vector<int>& max_transmitters() const { return max_tx_; }
    const std::vector<int>& max_receivers() const { return max_rx_; }

    double lightpath_capacity_gbps() const { return capacity_gbps_; }

    /// Total number of (fiber, wavelength) channels in the network.
    long long total_channels() const;

    /// Copy with a different lightpath line rate.
    PhysicalTopology with_capacity(double capacity_gbps) const;

    bool operator==(const PhysicalTopology& other) const;

private:
    PhysicalTopology() = default;

    std::vector<Node> nodes_;
    std::vector<FiberLink> links_;
    std::vector<std::vector<LinkId>> out_links_;
    std::vector<int> max_tx_;
    std::vector<int> max_rx_;
    double capacity_gbps_ = kDefaultLightpathCapacityGbps;
};

/// Parses the JSON topology document. Throws ValidationError on schema or
/// invariant violations.
PhysicalTopology load_topology(const nlohmann::json& document);
PhysicalTopology load_topology_file(const std::filesystem::path& path);

nlohmann::json to_json(const PhysicalTopology& topology);

/// Propagation delay over `length_km` of fiber. Throws std::invalid_argument
/// for negative lengths.
double propagation_delay_s(double length_km);

} // namespace wdm
