#include "wdm/fda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "path_search.hpp"
#include "wdm/error.hpp"

namespace wdm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// gamma*T split into the number of saturated lightpaths and the finite rest,
/// so that a move out of saturation still registers as an improvement.
struct DelaySum {
    int saturated = 0;
    double finite = 0.0;

    void add(double term)
    {
        if (std::isinf(term))
            ++saturated;
        else
            finite += term;
    }
    void remove(double term)
    {
        if (std::isinf(term))
            --saturated;
        else
            finite -= term;
    }
    double average(double gamma) const { return saturated > 0 ? kInf : finite / gamma; }
};

DelaySum total_delay(const VirtualTopology& vt)
{
    DelaySum sum;
    for (const auto& [id, lp] : vt.lightpaths())
        sum.add(lightpath_delay_term(lp.capacity_gbps, lp.carried_gbps, lp.propagation_delay_s));
    return sum;
}

bool improves(const DelaySum& before, const DelaySum& after, double tol)
{
    if (after.saturated != before.saturated)
        return after.saturated < before.saturated;
    return before.finite - after.finite > tol * before.finite;
}

/// gamma*T after moving a flow of `rate` from route `from` to route `to`.
DelaySum delay_after_move(const VirtualTopology& vt, const DelaySum& current, double rate,
                          const std::vector<LightpathId>& from, const std::vector<LightpathId>& to)
{
    std::set<LightpathId> touched(from.begin(), from.end());
    touched.insert(to.begin(), to.end());
    const std::set<LightpathId> leaving(from.begin(), from.end());
    const std::set<LightpathId> joining(to.begin(), to.end());

    DelaySum next = current;
    for (LightpathId id : touched) {
        const auto& lp = vt.lightpath(id);
        double load = lp.carried_gbps;
        next.remove(lightpath_delay_term(lp.capacity_gbps, load, lp.propagation_delay_s));
        if (leaving.contains(id))
            load -= rate;
        if (joining.contains(id))
            load += rate;
        next.add(lightpath_delay_term(lp.capacity_gbps, std::max(load, 0.0), lp.propagation_delay_s));
    }
    return next;
}

enum class Weighting { Marginal, ExactIncrement };

std::optional<std::vector<LightpathId>> deviation_path(const VirtualTopology& vt, const Flow& flow,
                                                       Weighting weighting)
{
    const auto& on_route = flow.route->lightpath_ids;
    const double rate = flow.reserved_gbps;
    std::vector<detail::Arc> arcs;
    for (const auto& [id, lp] : vt.lightpaths()) {
        const bool carries = std::ranges::find(on_route, id) != on_route.end();
        const double load = std::max(lp.carried_gbps - (carries ? rate : 0.0), 0.0);
        if (lp.capacity_gbps - load + kCapacityEpsilon < rate)
            continue;
        double weight = 0.0;
        if (weighting == Weighting::Marginal) {
            weight = marginal_delay_length(lp.capacity_gbps, load, lp.propagation_delay_s);
        } else {
            weight = lightpath_delay_term(lp.capacity_gbps, load + rate, lp.propagation_delay_s) -
                     lightpath_delay_term(lp.capacity_gbps, load, lp.propagation_delay_s);
        }
        if (std::isfinite(weight))
            arcs.push_back({id, lp.src, lp.dst, std::max(weight, 0.0)});
    }
    return detail::min_weight_path(vt.physical().num_nodes(), arcs, flow.src, flow.dst);
}

} // namespace

double lightpath_delay_term(double capacity, double load, double prop_s)
{
    if (load >= capacity)
        return kInf;
    return load / (capacity - load) + load * prop_s;
}

double marginal_delay_length(double capacity, double load, double prop_s)
{
    if (load >= capacity)
        return kInf;
    const double spare = capacity - load;
    return capacity / (spare * spare) + prop_s;
}

double average_packet_delay(const NetworkState& state)
{
    const double gamma = state.offered_gbps();
    if (!(gamma > 0.0))
        throw NoTrafficError();
    return total_delay(state.virtual_topology()).average(gamma);
}

FdaReport fda_reroute(NetworkState& state, double tol, int max_passes)
{
    FdaReport report;
    if (state.flows().empty()) {
        report.converged = true;
        return report;
    }
    const double gamma = state.offered_gbps();
    auto& vt = state.virtual_topology();
    DelaySum current = total_delay(vt);
    report.delay_before_s = current.average(gamma);

    std::set<LightpathId> vacated;
    for (int pass = 0; pass < max_passes; ++pass) {
        std::vector<std::pair<double, FlowId>> order;
        for (const auto& [id, flow] : state.flows())
            order.emplace_back(flow.reserved_gbps, id);
        std::ranges::sort(order, [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });

        int moves_this_pass = 0;
        for (const auto& [rate, id] : order) {
            const Flow& flow = state.flow(id);
            const auto from = flow.route->lightpath_ids;

            std::optional<std::vector<LightpathId>> tried;
            std::optional<std::vector<LightpathId>> accepted;
            std::optional<DelaySum> accepted_sum;
            for (Weighting weighting : {Weighting::Marginal, Weighting::ExactIncrement}) {
                auto candidate = deviation_path(vt, flow, weighting);
                if (!candidate || *candidate == from || candidate == tried)
                    continue;
                tried = candidate;
                const DelaySum next = delay_after_move(vt, current, rate, from, *candidate);
                if (improves(current, next, tol)) {
                    accepted = std::move(candidate);
                    accepted_sum = next;
                    break;
                }
            }
            if (!accepted)
                continue;

            state.reroute_flow(id, make_virtual_route(vt, *accepted));
            for (LightpathId lp : from) {
                if (vt.lightpath(lp).flows.empty())
                    vacated.insert(lp);
            }
            for (LightpathId lp : *accepted)
                vacated.erase(lp);
            current = total_delay(vt);
            ++moves_this_pass;
        }

        ++report.passes;
        report.moves += moves_this_pass;
        report.delay_per_pass_s.push_back(current.average(gamma));
        if (moves_this_pass == 0) {
            report.converged = true;
            break;
        }
    }

    for (LightpathId lp : vacated) {
        if (vt.contains(lp) && vt.lightpath(lp).flows.empty()) {
            vt.remove_lightpath(lp);
            report.reclaimed.push_back(lp);
        }
    }
    report.delay_after_s = total_delay(vt).average(gamma);
    return report;
}

} // namespace wdm
