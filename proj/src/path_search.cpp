#include "path_search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <tuple>

namespace wdm::detail {

std::optional<std::vector<int>> min_hop_path(int num_nodes, std::span<const Arc> arcs,
                                             const std::function<bool(const Arc&)>& usable,
                                             const std::vector<char>& blocked, int s, int d)
{
    const auto is_blocked = [&](int n) { return !blocked.empty() && blocked[static_cast<size_t>(n)]; };
    if (s == d)
        return std::vector<int>{};
    if (is_blocked(s) || is_blocked(d))
        return std::nullopt;

    std::vector<std::vector<const Arc*>> out(static_cast<size_t>(num_nodes));
    std::vector<std::vector<const Arc*>> in(static_cast<size_t>(num_nodes));
    for (const auto& arc : arcs) {
        if (is_blocked(arc.src) || is_blocked(arc.dst) || !usable(arc))
            continue;
        out[static_cast<size_t>(arc.src)].push_back(&arc);
        in[static_cast<size_t>(arc.dst)].push_back(&arc);
    }
    for (auto& list : out)
        std::ranges::sort(list, {}, &Arc::id);

    constexpr int kUnreached = -1;
    std::vector<int> hop(static_cast<size_t>(num_nodes), kUnreached);
    std::vector<int> order;
    std::deque<int> frontier{d};
    hop[static_cast<size_t>(d)] = 0;
    while (!frontier.empty()) {
        const int v = frontier.front();
        frontier.pop_front();
        order.push_back(v);
        for (const Arc* arc : in[static_cast<size_t>(v)]) {
            auto& h = hop[static_cast<size_t>(arc->src)];
            if (h == kUnreached) {
                h = hop[static_cast<size_t>(v)] + 1;
                frontier.push_back(arc->src);
            }
        }
    }
    if (hop[static_cast<size_t>(s)] == kUnreached)
        return std::nullopt;

    const auto on_layer = [&](const Arc* arc) {
        return hop[static_cast<size_t>(arc->dst)] != kUnreached &&
               hop[static_cast<size_t>(arc->dst)] == hop[static_cast<size_t>(arc->src)] - 1;
    };

    // Cheapest remaining weight to d along fewest-hop paths, filled in BFS order.
    std::vector<double> best(static_cast<size_t>(num_nodes), std::numeric_limits<double>::infinity());
    best[static_cast<size_t>(d)] = 0.0;
    for (int v : order) {
        if (v == d)
            continue;
        for (const Arc* arc : out[static_cast<size_t>(v)]) {
            if (on_layer(arc))
                best[static_cast<size_t>(v)] =
                    std::min(best[static_cast<size_t>(v)], arc->weight + best[static_cast<size_t>(arc->dst)]);
        }
    }

    std::vector<int> path;
    int at = s;
    while (at != d) {
        const double target = best[static_cast<size_t>(at)];
        const Arc* chosen = nullptr;
        for (const Arc* arc : out[static_cast<size_t>(at)]) {
            if (!on_layer(arc))
                continue;
            const double total = arc->weight + best[static_cast<size_t>(arc->dst)];
            if (total <= target || weight_tie(total, target)) {
                chosen = arc;
                break;
            }
        }
        path.push_back(chosen->id);
        at = chosen->dst;
    }
    return path;
}

std::optional<std::vector<int>> min_weight_path(int num_nodes, std::span<const Arc> arcs, int s, int d)
{
    if (s == d)
        return std::vector<int>{};

    std::vector<std::vector<const Arc*>> out(static_cast<size_t>(num_nodes));
    for (const auto& arc : arcs) {
        if (std::isfinite(arc.weight) && arc.weight >= 0.0)
            out[static_cast<size_t>(arc.src)].push_back(&arc);
    }
    for (auto& list : out)
        std::ranges::sort(list, {}, &Arc::id);

    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<size_t>(num_nodes), kInf);
    std::vector<int> hops(static_cast<size_t>(num_nodes), std::numeric_limits<int>::max());
    std::vector<const Arc*> via(static_cast<size_t>(num_nodes), nullptr);
    std::vector<char> done(static_cast<size_t>(num_nodes), 0);

    // Label comparison: weight (with tie tolerance), then hop count, then incoming arc id.
    const auto better = [](double w1, int h1, int a1, double w2, int h2, int a2) {
        if (!weight_tie(w1, w2))
            return w1 < w2;
        if (h1 != h2)
            return h1 < h2;
        return a1 < a2;
    };

    using Entry = std::tuple<double, int, int>; // dist, hops, node
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[static_cast<size_t>(s)] = 0.0;
    hops[static_cast<size_t>(s)] = 0;
    heap.emplace(0.0, 0, s);
    while (!heap.empty()) {
        const auto [dv, hv, v] = heap.top();
        heap.pop();
        if (done[static_cast<size_t>(v)])
            continue;
        done[static_cast<size_t>(v)] = 1;
        if (v == d)
            break;
        for (const Arc* arc : out[static_cast<size_t>(v)]) {
            const auto u = static_cast<size_t>(arc->dst);
            if (done[u])
                continue;
            const double nd = dist[static_cast<size_t>(v)] + arc->weight;
            const int nh = hops[static_cast<size_t>(v)] + 1;
            const int current_arc = via[u] ? via[u]->id : std::numeric_limits<int>::max();
            if (dist[u] == kInf || better(nd, nh, arc->id, dist[u], hops[u], current_arc)) {
                dist[u] = nd;
                hops[u] = nh;
                via[u] = arc;
                heap.emplace(nd, nh, arc->dst);
            }
        }
    }
    if (!via[static_cast<size_t>(d)])
        return std::nullopt;

    std::vector<int> path;
    for (int at = d; at != s;) {
        const Arc* arc = via[static_cast<size_t>(at)];
        path.push_back(arc->id);
        at = arc->src;
    }
    std::ranges::reverse(path);
    return path;
}

} // namespace wdm::detail
