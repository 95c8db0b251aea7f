#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wdm::detail {

/// Directed edge of a search graph. `id` doubles as the lexicographic tie-break key.
struct Arc {
    int id = 0;
    int src = 0;
    int dst = 0;
    double weight = 0.0;
};

/// Two path weights closer than this (relative) count as a tie.
inline bool weight_tie(double a, double b)
{
    const double scale = std::max({1.0, a < 0 ? -a : a, b < 0 ? -b : b});
    const double diff = a - b;
    return (diff < 0 ? -diff : diff) <= 1e-9 * scale;
}

/// Fewest arcs from s to d; among those the smallest total weight; among
/// those the lexicographically smallest arc-id sequence. Arcs for which
/// `usable` is false and nodes flagged in `blocked` are skipped (s itself must
/// not be blocked). Returns the arc ids in order.
std::optional<std::vector<int>> min_hop_path(int num_nodes, std::span<const Arc> arcs,
                                             const std::function<bool(const Arc&)>& usable,
                                             const std::vector<char>& blocked, int s, int d);

/// Smallest total weight from s to d over arcs with finite non-negative
/// weight (Dijkstra); ties resolved toward fewer arcs, then smaller arc ids.
std::optional<std::vector<int>> min_weight_path(int num_nodes, std::span<const Arc> arcs, int s, int d);

} // namespace wdm::detail
