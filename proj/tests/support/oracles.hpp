#pragma once

// Independent reference implementations used by the unit and acceptance tests.
// Everything here is brute force: enumerate, sort, pick.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "wdm/admission.hpp"
#include "wdm/fda.hpp"
#include "wdm/routing.hpp"
#include "wdm/topology.hpp"

namespace oracle {

using namespace wdm;

inline std::shared_ptr<const PhysicalTopology> make_topology(const std::vector<std::pair<double, double>>& coords,
                                                             const std::vector<std::pair<int, int>>& links, int W,
                                                             int T, int R, double capacity = 10.0,
                                                             std::vector<int> wavelengths = {})
{
    std::vector<Node> nodes;
    for (size_t i = 0; i < coords.size(); ++i) {
        Node n;
        n.id = static_cast<NodeId>(i);
        n.name = "n" + std::to_string(i);
        n.x_km = coords[i].first;
        n.y_km = coords[i].second;
        nodes.push_back(n);
    }
    std::vector<FiberLink> fibers;
    for (size_t i = 0; i < links.size(); ++i) {
        FiberLink l;
        l.id = static_cast<LinkId>(i);
        l.src = links[i].first;
        l.dst = links[i].second;
        l.num_wavelengths = wavelengths.empty() ? W : wavelengths[i];
        fibers.push_back(l);
    }
    const auto n = coords.size();
    return std::make_shared<const PhysicalTopology>(PhysicalTopology::build(
        std::move(nodes), std::move(fibers), std::vector<int>(n, T), std::vector<int>(n, R), capacity));
}

/// Random digraph with distinct integer coordinates; parallel links allowed.
inline std::shared_ptr<const PhysicalTopology> random_digraph(std::mt19937_64& gen, int n, int m, int W = 4,
                                                              int TR = 4)
{
    std::set<std::pair<int, int>> used;
    std::vector<std::pair<double, double>> coords;
    std::uniform_int_distribution<int> coord(0, 20);
    while (static_cast<int>(coords.size()) < n) {
        std::pair<int, int> p{coord(gen), coord(gen)};
        if (used.insert(p).second)
            coords.emplace_back(p.first * 50.0, p.second * 50.0);
    }
    std::uniform_int_distribution<int> node(0, n - 1);
    std::vector<std::pair<int, int>> links;
    while (static_cast<int>(links.size()) < m) {
        const int a = node(gen), b = node(gen);
        if (a != b)
            links.emplace_back(a, b);
    }
    return make_topology(coords, links, W, TR, TR);
}

/// Tie rule shared by every ordering key: 1e-9 relative, with unit floor.
inline bool close(double a, double b)
{
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Orders (hops, weight, id sequence) triples.
inline bool key_less(size_t ha, double wa, const std::vector<int>& ia, size_t hb, double wb, const std::vector<int>& ib)
{
    if (ha != hb)
        return ha < hb;
    if (!close(wa, wb))
        return wa < wb;
    return ia < ib;
}

/// Every node-simple s->d path in a multigraph given as (id, src, dst, weight) arcs.
struct Arc {
    int id;
    int src;
    int dst;
    double weight;
};

inline std::vector<std::vector<int>> simple_paths(int num_nodes, const std::vector<Arc>& arcs, int s, int d)
{
    std::vector<std::vector<int>> out;
    std::vector<int> path;
    std::vector<char> seen(static_cast<size_t>(num_nodes), 0);
    std::function<void(int)> dfs = [&](int v) {
        if (v == d) {
            out.push_back(path);
            return;
        }
        seen[static_cast<size_t>(v)] = 1;
        for (const auto& a : arcs) {
            if (a.src != v || seen[static_cast<size_t>(a.dst)])
                continue;
            path.push_back(a.id);
            dfs(a.dst);
            path.pop_back();
        }
        seen[static_cast<size_t>(v)] = 0;
    };
    dfs(s);
    return out;
}

inline double path_weight(const std::vector<Arc>& arcs, const std::vector<int>& ids)
{
    double w = 0.0;
    for (int id : ids)
        for (const auto& a : arcs)
            if (a.id == id) {
                w += a.weight;
                break;
            }
    return w;
}

inline std::vector<std::vector<int>> sorted_paths(int num_nodes, const std::vector<Arc>& arcs, int s, int d)
{
    auto paths = simple_paths(num_nodes, arcs, s, d);
    std::vector<double> w;
    for (const auto& p : paths)
        w.push_back(path_weight(arcs, p));
    std::vector<size_t> idx(paths.size());
    for (size_t i = 0; i < idx.size(); ++i)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return key_less(paths[a].size(), w[a], paths[a], paths[b].size(), w[b], paths[b]);
    });
    std::vector<std::vector<int>> out;
    for (size_t i : idx)
        out.push_back(paths[i]);
    return out;
}

/// First k simple paths by (hops, km, link ids).
inline std::vector<std::vector<LinkId>> ksp(const PhysicalTopology& topo, NodeId s, NodeId d, int k)
{
    std::vector<Arc> arcs;
    for (const auto& l : topo.links())
        arcs.push_back({l.id, l.src, l.dst, l.length_km});
    auto all = sorted_paths(topo.num_nodes(), arcs, s, d);
    if (static_cast<int>(all.size()) > k)
        all.resize(static_cast<size_t>(k));
    return all;
}

/// Smallest wavelength index usable on every fiber of the route.
inline std::optional<int> first_fit(const WavelengthOccupancy& occ, const std::vector<LinkId>& route)
{
    int limit = std::numeric_limits<int>::max();
    for (LinkId l : route)
        limit = std::min(limit, occ.num_wavelengths(l));
    for (int w = 0; w < limit; ++w) {
        bool ok = true;
        for (LinkId l : route)
            ok = ok && occ.owner(l, w) == kFreeChannel;
        if (ok)
            return w;
    }
    return std::nullopt;
}

/// Arcs of the virtual graph whose residual (plus `extra` on given lightpaths) fits `rate`.
inline std::vector<Arc> feasible_lightpaths(const VirtualTopology& vt, double rate,
                                            const std::map<LightpathId, double>& extra = {})
{
    std::vector<Arc> arcs;
    for (const auto& [id, lp] : vt.lightpaths()) {
        double residual = lp.capacity_gbps - lp.carried_gbps;
        if (auto it = extra.find(id); it != extra.end())
            residual += it->second;
        if (residual + 1e-9 >= rate)
            arcs.push_back({id, lp.src, lp.dst, lp.propagation_delay_s});
    }
    return arcs;
}

/// Best feasible virtual route by (virtual hops, delay, lightpath ids).
inline std::optional<std::vector<LightpathId>> cspf(const VirtualTopology& vt, NodeId s, NodeId d, double rate)
{
    auto paths = sorted_paths(vt.physical().num_nodes(), feasible_lightpaths(vt, rate), s, d);
    if (paths.empty())
        return std::nullopt;
    return paths.front();
}

/// gamma * T recomputed flow by flow: load per lightpath is summed from the
/// routes of the given assignment, not from the stored carried values.
inline double weighted_delay(const VirtualTopology& vt, const std::map<FlowId, std::pair<double, std::vector<LightpathId>>>& assignment)
{
    std::map<LightpathId, double> load;
    for (const auto& [id, entry] : assignment)
        for (LightpathId lp : entry.second)
            load[lp] += entry.first;
    double sum = 0.0;
    for (const auto& [id, f] : load) {
        const auto& lp = vt.lightpath(id);
        if (f >= lp.capacity_gbps)
            return std::numeric_limits<double>::infinity();
        sum += f / (lp.capacity_gbps - f) + f * lp.propagation_delay_s;
    }
    return sum;
}

inline std::map<FlowId, std::pair<double, std::vector<LightpathId>>> assignment_of(const NetworkState& state)
{
    std::map<FlowId, std::pair<double, std::vector<LightpathId>>> out;
    for (const auto& [id, flow] : state.flows())
        out[id] = {flow.reserved_gbps, flow.route->lightpath_ids};
    return out;
}

inline double average_delay(const NetworkState& state)
{
    double gamma = 0.0;
    for (const auto& [id, flow] : state.flows())
        gamma += flow.reserved_gbps;
    return weighted_delay(state.virtual_topology(), assignment_of(state)) / gamma;
}

/// Lowest average delay reachable by moving exactly one flow to another
/// feasible simple virtual path (capacity checked with the flow removed).
inline double best_single_move(const NetworkState& state)
{
    const auto& vt = state.virtual_topology();
    const auto base = assignment_of(state);
    double gamma = 0.0;
    for (const auto& [id, e] : base)
        gamma += e.first;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [id, flow] : state.flows()) {
        std::map<LightpathId, double> freed;
        for (LightpathId lp : flow.route->lightpath_ids)
            freed[lp] += flow.reserved_gbps;
        const auto arcs = feasible_lightpaths(vt, flow.reserved_gbps, freed);
        for (const auto& path : simple_paths(vt.physical().num_nodes(), arcs, flow.src, flow.dst)) {
            if (path == flow.route->lightpath_ids)
                continue;
            auto moved = base;
            moved[id].second = path;
            best = std::min(best, weighted_delay(vt, moved) / gamma);
        }
    }
    return best;
}

/// Small random network state: 4 fully meshed nodes, up to `max_lightpaths`
/// lightpaths and up to `max_flows` flows placed on random feasible paths.
inline NetworkState random_small_state(std::mt19937_64& gen, int max_lightpaths = 4, int max_flows = 4)
{
    const int n = 4;
    std::vector<std::pair<double, double>> coords;
    std::set<std::pair<int, int>> used;
    while (static_cast<int>(coords.size()) < n) {
        std::pair<int, int> p{static_cast<int>(gen() % 30), static_cast<int>(gen() % 30)};
        if (used.insert(p).second)
            coords.emplace_back(p.first * 40.0, p.second * 40.0);
    }
    std::vector<std::pair<int, int>> links;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b)
                links.emplace_back(a, b);
    NetworkState state(make_topology(coords, links, 4, 4, 4));
    auto& vt = state.virtual_topology();

    const int lightpaths = 2 + static_cast<int>(gen() % static_cast<unsigned>(max_lightpaths - 1));
    for (int tries = 0; tries < 50 && static_cast<int>(vt.lightpaths().size()) < lightpaths; ++tries) {
        const int s = static_cast<int>(gen() % n);
        const int d = static_cast<int>(gen() % n);
        if (s == d || !vt.transmitter_available(s) || !vt.receiver_available(d))
            continue;
        const auto routes = k_shortest_paths(vt.physical(), s, d, 3);
        const auto& route = routes[gen() % routes.size()];
        if (auto w = first_fit_wavelength(vt.occupancy(), route.links))
            vt.add_lightpath(s, d, route.links, *w);
    }

    std::vector<const Lightpath*> lps;
    for (const auto& [id, lp] : vt.lightpaths())
        lps.push_back(&lp);
    const int flows = 1 + static_cast<int>(gen() % static_cast<unsigned>(max_flows));
    FlowId next = 0;
    for (int tries = 0; tries < 50 && static_cast<int>(state.flows().size()) < flows; ++tries) {
        const NodeId s = lps[gen() % lps.size()]->src;
        const NodeId d = lps[gen() % lps.size()]->dst;
        if (s == d)
            continue;
        const double rate = 0.5 * static_cast<double>(1 + gen() % 12);
        const auto paths = simple_paths(n, feasible_lightpaths(vt, rate), s, d);
        if (paths.empty())
            continue;
        Flow f;
        f.id = next++;
        f.src = s;
        f.dst = d;
        f.reserved_gbps = rate;
        state.install_flow(f, make_virtual_route(vt, paths[gen() % paths.size()]));
    }
    return state;
}

} // namespace oracle
