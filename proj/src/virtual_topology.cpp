#include "wdm/virtual_topology.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace wdm {

WavelengthOccupancy::WavelengthOccupancy(const PhysicalTopology& topology)
{
    channels_.reserve(static_cast<size_t>(topology.num_links()));
    for (const auto& link : topology.links())
        channels_.emplace_back(static_cast<size_t>(link.num_wavelengths), kFreeChannel);
}

WavelengthOccupancy::WavelengthOccupancy(std::vector<int> wavelengths_per_link)
{
    channels_.reserve(wavelengths_per_link.size());
    for (int w : wavelengths_per_link) {
        if (w < 1)
            throw std::invalid_argument("WavelengthOccupancy: wavelength count must be >= 1");
        channels_.emplace_back(static_cast<size_t>(w), kFreeChannel);
    }
}

void WavelengthOccupancy::occupy(LinkId link, int wavelength, LightpathId lightpath)
{
    auto& slot = channels_.at(static_cast<size_t>(link)).at(static_cast<size_t>(wavelength));
    if (slot != kFreeChannel)
        throw std::logic_error("channel (" + std::to_string(link) + ", " + std::to_string(wavelength) +
                               ") already used by lightpath " + std::to_string(slot));
    slot = lightpath;
    ++occupied_;
}

void WavelengthOccupancy::release(LinkId link, int wavelength, LightpathId lightpath)
{
    auto& slot = channels_.at(static_cast<size_t>(link)).at(static_cast<size_t>(wavelength));
    if (slot != lightpath)
        throw std::logic_error("channel (" + std::to_string(link) + ", " + std::to_string(wavelength) +
                               ") not owned by lightpath " + std::to_string(lightpath));
    slot = kFreeChannel;
    --occupied_;
}

long long WavelengthOccupancy::total_channels() const
{
    long long total = 0;
    for (const auto& fiber : channels_)
        total += static_cast<long long>(fiber.size());
    return total;
}

double route_length_km(const PhysicalTopology& topology, std::span<const LinkId> route)
{
    double total = 0.0;
    for (LinkId id : route)
        total += topology.link(id).length_km;
    return total;
}

bool route_is_contiguous(const PhysicalTopology& topology, std::span<const LinkId> route, NodeId src,
                         NodeId dst)
{
    if (route.empty())
        return false;
    NodeId at = src;
    for (LinkId id : route) {
        if (id < 0 || id >= topology.num_links())
            return false;
        const auto& link = topology.link(id);
        if (link.src != at)
            return false;
        at = link.dst;
    }
    return at == dst;
}

VirtualTopology::VirtualTopology(std::shared_ptr<const PhysicalTopology> physical)
    : physical_(std::move(physical))
{
    if (!physical_)
        throw std::invalid_argument("VirtualTopology needs a physical topology");
    occupancy_ = WavelengthOccupancy(*physical_);
    tx_used_.assign(static_cast<size_t>(physical_->num_nodes()), 0);
    rx_used_.assign(static_cast<size_t>(physical_->num_nodes()), 0);
}

const Lightpath& VirtualTopology::lightpath(LightpathId id) const
{
    auto it = lightpaths_.find(id);
    if (it == lightpaths_.end())
        throw std::out_of_range("unknown lightpath " + std::to_string(id));
    return it->second;
}

bool VirtualTopology::transmitter_available(NodeId n) const
{
    return tx_used(n) < physical_->max_transmitters(n);
}

bool VirtualTopology::receiver_available(NodeId n) const
{
    return rx_used(n) < physical_->max_receivers(n);
}

LightpathId VirtualTopology::add_lightpath(NodeId src, NodeId dst, std::vector<LinkId> route,
                                           int wavelength, std::optional<LightpathId> id)
{
    if (!route_is_contiguous(*physical_, route, src, dst))
        throw std::logic_error("lightpath route is not contiguous from src to dst");
    if (!transmitter_available(src))
        throw std::logic_error("no free transmitter at node " + std::to_string(src));
    if (!receiver_available(dst))
        throw std::logic_error("no free receiver at node " + std::to_string(dst));
    for (LinkId link : route) {
        if (wavelength < 0 || wavelength >= occupancy_.num_wavelengths(link))
            throw std::logic_error("wavelength " + std::to_string(wavelength) + " absent on link " +
                                   std::to_string(link));
        if (!occupancy_.is_free(link, wavelength))
            throw std::logic_error("wavelength " + std::to_string(wavelength) + " busy on link " +
                                   std::to_string(link));
    }

    const LightpathId lp_id = id.value_or(next_id_);
    if (lightpaths_.contains(lp_id))
        throw std::logic_error("duplicate lightpath id " + std::to_string(lp_id));

    for (LinkId link : route)
        occupancy_.occupy(link, wavelength, lp_id);
    ++tx_used_[static_cast<size_t>(src)];
    ++rx_used_[static_cast<size_t>(dst)];
    route_links_total_ += static_cast<long long>(route.size());
    next_id_ = std::max(next_id_, lp_id + 1);

    Lightpath lp;
    lp.id = lp_id;
    lp.src = src;
    lp.dst = dst;
    lp.length_km = route_length_km(*physical_, route);
    lp.propagation_delay_s = propagation_delay_s(lp.length_km);
    lp.route = std::move(route);
    lp.wavelength = wavelength;
    lp.capacity_gbps = physical_->lightpath_capacity_gbps();
    lightpaths_.emplace(lp_id, std::move(lp));
    return lp_id;
}

void VirtualTopology::remove_lightpath(LightpathId id)
{
    auto it = lightpaths_.find(id);
    if (it == lightpaths_.end())
        throw std::out_of_range("unknown lightpath " + std::to_string(id));
    const auto& lp = it->second;
    if (!lp.flows.empty())
        throw std::logic_error("lightpath " + std::to_string(id) + " still carries flows");
    for (LinkId link : lp.route)
        occupancy_.release(link, lp.wavelength, id);
    --tx_used_[static_cast<size_t>(lp.src)];
    --rx_used_[static_cast<size_t>(lp.dst)];
    route_links_total_ -= static_cast<long long>(lp.route.size());
    lightpaths_.erase(it);
}

double VirtualTopology::sum_rates(const std::map<FlowId, double>& flows)
{
    double total = 0.0;
    for (const auto& [flow, rate] : flows)
        total += rate;
    return total;
}

void VirtualTopology::attach_flow(LightpathId id, FlowId flow, double rate_gbps)
{
    auto it = lightpaths_.find(id);
    if (it == lightpaths_.end())
        throw std::out_of_range("unknown lightpath " + std::to_string(id));
    auto& lp = it->second;
    if (!(rate_gbps > 0.0))
        throw std::invalid_argument("flow rate must be positive");
    if (lp.residual_gbps() + kCapacityEpsilon < rate_gbps)
        throw std::logic_error("lightpath " + std::to_string(id) + " lacks residual capacity");
    if (!lp.flows.emplace(flow, rate_gbps).second)
        throw std::logic_error("flow " + std::to_string(flow) + " already on lightpath " +
                               std::to_string(id));
    lp.carried_gbps = sum_rates(lp.flows);
}

void VirtualTopology::detach_flow(LightpathId id, FlowId flow)
{
    auto it = lightpaths_.find(id);
    if (it == lightpaths_.end())
        throw std::out_of_range("unknown lightpath " + std::to_string(id));
    auto& lp = it->second;
    if (lp.flows.erase(flow) == 0)
        throw std::logic_error("flow " + std::to_string(flow) + " not on lightpath " +
                               std::to_string(id));
    lp.carried_gbps = sum_rates(lp.flows);
}

std::vector<std::string> VirtualTopology::audit_fast() const
{
    std::vector<std::string> issues;
    long long tx_total = 0;
    long long rx_total = 0;
    for (NodeId n = 0; n < physical_->num_nodes(); ++n) {
        tx_total += tx_used(n);
        rx_total += rx_used(n);
        if (tx_used(n) < 0 || tx_used(n) > physical_->max_transmitters(n))
            issues.push_back("node " + std::to_string(n) + ": transmitter count out of range");
        if (rx_used(n) < 0 || rx_used(n) > physical_->max_receivers(n))
            issues.push_back("node " + std::to_string(n) + ": receiver count out of range");
    }
    const auto count = static_cast<long long>(lightpaths_.size());
    if (tx_total != count || rx_total != count)
        issues.push_back("transceiver totals disagree with lightpath count");
    if (occupancy_.occupied_count() != route_links_total_)
        issues.push_back("occupied channel count disagrees with total route length");
    return issues;
}

std::vector<std::string> VirtualTopology::audit_full() const
{
    auto issues = audit_fast();
    const auto& topo = *physical_;

    WavelengthOccupancy expected(topo);
    std::vector<int> tx(tx_used_.size(), 0);
    std::vector<int> rx(rx_used_.size(), 0);
    for (const auto& [id, lp] : lightpaths_) {
        const std::string tag = "lightpath " + std::to_string(id);
        if (lp.id != id)
            issues.push_back(tag + ": key/id mismatch");
        if (!route_is_contiguous(topo, lp.route, lp.src, lp.dst)) {
            issues.push_back(tag + ": route not contiguous");
            continue;
        }
        for (LinkId link : lp.route) {
            if (lp.wavelength < 0 || lp.wavelength >= expected.num_wavelengths(link)) {
                issues.push_back(tag + ": wavelength absent on link " + std::to_string(link));
                continue;
            }
            if (!expected.is_free(link, lp.wavelength))
                issues.push_back(tag + ": channel shared on link " + std::to_string(link));
            else
                expected.occupy(link, lp.wavelength, id);
        }
        ++tx[static_cast<size_t>(lp.src)];
        ++rx[static_cast<size_t>(lp.dst)];
        if (lp.carried_gbps < -kCapacityEpsilon || lp.carried_gbps > lp.capacity_gbps + kCapacityEpsilon)
            issues.push_back(tag + ": carried load outside [0, capacity]");
        if (std::abs(lp.carried_gbps - sum_rates(lp.flows)) > 1e-9)
            issues.push_back(tag + ": carried load differs from the sum of its flows");
        if (std::abs(lp.length_km - route_length_km(topo, lp.route)) >
            1e-9 * std::max(1.0, lp.length_km))
            issues.push_back(tag + ": cached length is stale");
    }
    if (!(expected == occupancy_))
        issues.push_back("occupancy map differs from the union of lightpath routes");
    if (tx != tx_used_)
        issues.push_back("transmitter counters differ from recomputed values");
    if (rx != rx_used_)
        issues.push_back("receiver counters differ from recomputed values");
    return issues;
}

bool VirtualTopology::operator==(const VirtualTopology& other) const
{
    return *physical_ == *other.physical_ && lightpaths_ == other.lightpaths_ &&
           occupancy_ == other.occupancy_ && tx_used_ == other.tx_used_ && rx_used_ == other.rx_used_;
}

} // namespace wdm
