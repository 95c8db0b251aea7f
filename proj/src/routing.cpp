#include "wdm/routing.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "path_search.hpp"

namespace wdm {

PhysicalRoute make_physical_route(const PhysicalTopology& topology, std::vector<LinkId> links)
{
    PhysicalRoute route;
    route.hop_count = static_cast<int>(links.size());
    route.length_km = route_length_km(topology, links);
    route.links = std::move(links);
    return route;
}

VirtualRoute make_virtual_route(const VirtualTopology& vt, std::vector<LightpathId> lightpaths)
{
    VirtualRoute route;
    route.virtual_hops = static_cast<int>(lightpaths.size());
    for (LightpathId id : lightpaths)
        route.delay_s += vt.lightpath(id).propagation_delay_s;
    route.lightpath_ids = std::move(lightpaths);
    return route;
}

bool route_order_less(const PhysicalRoute& a, const PhysicalRoute& b)
{
    if (a.hop_count != b.hop_count)
        return a.hop_count < b.hop_count;
    if (!detail::weight_tie(a.length_km, b.length_km))
        return a.length_km < b.length_km;
    return a.links < b.links;
}

std::vector<NodeId> route_nodes(const PhysicalTopology& topology, std::span<const LinkId> links)
{
    std::vector<NodeId> nodes;
    if (links.empty())
        return nodes;
    nodes.reserve(links.size() + 1);
    nodes.push_back(topology.link(links.front()).src);
    for (LinkId id : links)
        nodes.push_back(topology.link(id).dst);
    return nodes;
}

std::vector<PhysicalRoute> k_shortest_paths(const PhysicalTopology& topology, NodeId s, NodeId d, int k)
{
    if (k < 1)
        throw std::invalid_argument("k_shortest_paths: k must be >= 1");
    if (s < 0 || s >= topology.num_nodes() || d < 0 || d >= topology.num_nodes())
        throw std::invalid_argument("k_shortest_paths: node id out of range");
    if (s == d)
        throw std::invalid_argument("k_shortest_paths: source equals destination");

    std::vector<detail::Arc> arcs;
    arcs.reserve(topology.links().size());
    for (const auto& link : topology.links())
        arcs.push_back({link.id, link.src, link.dst, link.length_km});

    const auto n = static_cast<size_t>(topology.num_nodes());
    std::vector<PhysicalRoute> accepted;
    std::vector<PhysicalRoute> candidates;

    auto first = detail::min_hop_path(topology.num_nodes(), arcs, [](const detail::Arc&) { return true; },
                                      {}, s, d);
    if (!first)
        return accepted;
    accepted.push_back(make_physical_route(topology, std::move(*first)));

    const auto known = [&](const std::vector<LinkId>& links) {
        const auto same = [&](const PhysicalRoute& r) { return r.links == links; };
        return std::ranges::any_of(accepted, same) || std::ranges::any_of(candidates, same);
    };

    while (static_cast<int>(accepted.size()) < k) {
        const auto prev_links = accepted.back().links;
        const auto prev_nodes = route_nodes(topology, prev_links);

        for (size_t i = 0; i < prev_links.size(); ++i) {
            const NodeId spur = prev_nodes[i];
            const std::span<const LinkId> root(prev_links.data(), i);

            // Links leaving the spur node along any accepted route sharing this root.
            std::vector<char> banned_link(topology.links().size(), 0);
            for (const auto& route : accepted) {
                if (route.links.size() > i && std::equal(root.begin(), root.end(), route.links.begin()))
                    banned_link[static_cast<size_t>(route.links[i])] = 1;
            }
            std::vector<char> blocked(n, 0);
            for (size_t j = 0; j < i; ++j)
                blocked[static_cast<size_t>(prev_nodes[j])] = 1;

            auto spur_path = detail::min_hop_path(
                topology.num_nodes(), arcs,
                [&](const detail::Arc& arc) { return !banned_link[static_cast<size_t>(arc.id)]; }, blocked,
                spur, d);
            if (!spur_path)
                continue;

            std::vector<LinkId> links(root.begin(), root.end());
            links.insert(links.end(), spur_path->begin(), spur_path->end());
            if (!known(links))
                candidates.push_back(make_physical_route(topology, std::move(links)));
        }

        if (candidates.empty())
            break;
        auto best = std::ranges::min_element(candidates, route_order_less);
        accepted.push_back(std::move(*best));
        candidates.erase(best);
    }
    return accepted;
}

std::optional<int> first_fit_wavelength(const WavelengthOccupancy& occupancy, std::span<const LinkId> route)
{
    if (route.empty())
        throw std::invalid_argument("first_fit_wavelength: empty route");
    int limit = occupancy.num_wavelengths(route.front());
    for (LinkId link : route)
        limit = std::min(limit, occupancy.num_wavelengths(link));
    for (int w = 0; w < limit; ++w) {
        const bool free_everywhere =
            std::ranges::all_of(route, [&](LinkId link) { return occupancy.is_free(link, w); });
        if (free_everywhere)
            return w;
    }
    return std::nullopt;
}

std::optional<VirtualRoute> cspf_virtual_route(const VirtualTopology& vt, NodeId s, NodeId d,
                                               double rate_gbps)
{
    if (!(rate_gbps > 0.0))
        throw std::invalid_argument("cspf_virtual_route: rate must be positive");
    const auto& topo = vt.physical();
    if (s < 0 || s >= topo.num_nodes() || d < 0 || d >= topo.num_nodes())
        throw std::invalid_argument("cspf_virtual_route: node id out of range");
    if (s == d)
        throw std::invalid_argument("cspf_virtual_route: source equals destination");

    std::vector<detail::Arc> arcs;
    for (const auto& [id, lp] : vt.lightpaths()) {
        if (lp.residual_gbps() + kCapacityEpsilon >= rate_gbps)
            arcs.push_back({id, lp.src, lp.dst, lp.propagation_delay_s});
    }
    auto path = detail::min_hop_path(topo.num_nodes(), arcs, [](const detail::Arc&) { return true; }, {}, s, d);
    if (!path)
        return std::nullopt;
    return make_virtual_route(vt, std::move(*path));
}

} // namespace wdm
