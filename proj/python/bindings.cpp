#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wdm/admission.hpp"
#include "wdm/cli.hpp"
#include "wdm/error.hpp"
#include "wdm/fda.hpp"
#include "wdm/reports.hpp"
#include "wdm/routing.hpp"
#include "wdm/simulation.hpp"
#include "wdm/traffic.hpp"

namespace py = pybind11;
using namespace wdm;

namespace {

std::shared_ptr<const PhysicalTopology> topology_from_json(const std::string& text)
{
    return std::make_shared<const PhysicalTopology>(load_topology(nlohmann::json::parse(text)));
}

py::dict snapshot_dict(const MetricsSnapshot& s)
{
    py::dict d;
    d["hour"] = s.hour;
    d["offered_flows"] = s.offered_flows;
    d["admitted_flows"] = s.admitted_flows;
    d["blocked_flows"] = s.blocked_flows;
    d["blocking_ratio"] = s.blocking_ratio;
    d["active_flows"] = s.active_flows;
    d["active_lightpaths"] = s.active_lightpaths;
    d["wavelength_utilization"] = s.wavelength_utilization;
    d["avg_packet_delay_s"] = s.avg_packet_delay_s;
    d["mean_virtual_hops"] = s.mean_virtual_hops;
    d["fda_runs"] = s.fda_runs;
    d["fda_moves"] = s.fda_moves;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Multimedia traffic routing over IP/MPLS-over-WDM networks: admission cascade, "
              "flow deviation and a deterministic flow-level simulator.";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<AuditError>(m, "AuditError", PyExc_RuntimeError);
    py::register_exception<NoTrafficError>(m, "NoTrafficError", PyExc_ValueError);

    py::class_<Node>(m, "Node")
        .def_readonly("id", &Node::id)
        .def_readonly("name", &Node::name)
        .def_readonly("x_km", &Node::x_km)
        .def_readonly("y_km", &Node::y_km)
        .def_readonly("timezone_offset_h", &Node::timezone_offset_h);

    py::class_<FiberLink>(m, "FiberLink")
        .def_readonly("id", &FiberLink::id)
        .def_readonly("src", &FiberLink::src)
        .def_readonly("dst", &FiberLink::dst)
        .def_readonly("num_wavelengths", &FiberLink::num_wavelengths)
        .def_readonly("length_km", &FiberLink::length_km);

    py::class_<PhysicalTopology, std::shared_ptr<PhysicalTopology>>(m, "PhysicalTopology")
        .def_static("from_json", [](const std::string& text) { return std::const_pointer_cast<PhysicalTopology>(topology_from_json(text)); },
                    py::arg("text"))
        .def_static("from_file", [](const std::filesystem::path& p) { return std::make_shared<PhysicalTopology>(load_topology_file(p)); },
                    py::arg("path"))
        .def_property_readonly("num_nodes", &PhysicalTopology::num_nodes)
        .def_property_readonly("num_links", &PhysicalTopology::num_links)
        .def_property_readonly("nodes", &PhysicalTopology::nodes)
        .def_property_readonly("links", &PhysicalTopology::links)
        .def_property_readonly("lightpath_capacity_gbps", &PhysicalTopology::lightpath_capacity_gbps)
        .def("to_json", [](const PhysicalTopology& t) { return to_json(t).dump(); });

    py::class_<PhysicalRoute>(m, "PhysicalRoute")
        .def_readonly("links", &PhysicalRoute::links)
        .def_readonly("hop_count", &PhysicalRoute::hop_count)
        .def_readonly("length_km", &PhysicalRoute::length_km);

    py::class_<VirtualRoute>(m, "VirtualRoute")
        .def_readonly("lightpath_ids", &VirtualRoute::lightpath_ids)
        .def_readonly("virtual_hops", &VirtualRoute::virtual_hops)
        .def_readonly("delay_s", &VirtualRoute::delay_s);

    m.def("propagation_delay_s", &propagation_delay_s, py::arg("length_km"));
    m.def("k_shortest_paths", [](const PhysicalTopology& t, NodeId s, NodeId d, int k) { return k_shortest_paths(t, s, d, k); },
          py::arg("topology"), py::arg("src"), py::arg("dst"), py::arg("k") = kDefaultKsp);
    m.def("marginal_delay_length", &marginal_delay_length, py::arg("capacity"), py::arg("load"), py::arg("prop_s") = 0.0);
    m.def("hourly_factor", &hourly_factor, py::arg("hour_utc"), py::arg("tz_offset_h"), py::arg("floor") = kDefaultHourlyFloor);
    m.def("onoff_mean_rate", [](double peak, double on, double off) { return onoff_mean_rate({peak, on, off}); },
          py::arg("peak_gbps"), py::arg("mean_on_s"), py::arg("mean_off_s"));

    py::enum_<AdmissionDecision>(m, "AdmissionDecision")
        .value("RoutedExisting", AdmissionDecision::RoutedExisting)
        .value("RoutedNewDirect", AdmissionDecision::RoutedNewDirect)
        .value("RoutedViaSourceAdjacent", AdmissionDecision::RoutedViaSourceAdjacent)
        .value("RoutedViaDestinationAdjacent", AdmissionDecision::RoutedViaDestinationAdjacent)
        .value("Blocked", AdmissionDecision::Blocked);

    py::class_<AdmissionOutcome>(m, "AdmissionOutcome")
        .def_readonly("decision", &AdmissionOutcome::decision)
        .def_readonly("route", &AdmissionOutcome::route)
        .def_readonly("new_lightpath", &AdmissionOutcome::new_lightpath)
        .def_property_readonly("stages_tried", [](const AdmissionOutcome& o) {
            std::vector<int> stages;
            for (auto s : o.stages_tried)
                stages.push_back(static_cast<int>(s));
            return stages;
        });

    py::class_<FdaReport>(m, "FdaReport")
        .def_readonly("passes", &FdaReport::passes)
        .def_readonly("moves", &FdaReport::moves)
        .def_readonly("delay_before_s", &FdaReport::delay_before_s)
        .def_readonly("delay_after_s", &FdaReport::delay_after_s)
        .def_readonly("delay_per_pass_s", &FdaReport::delay_per_pass_s)
        .def_readonly("converged", &FdaReport::converged);

    py::class_<NetworkState>(m, "NetworkState")
        .def(py::init([](std::shared_ptr<PhysicalTopology> t) { return NetworkState(std::move(t)); }), py::arg("topology"))
        .def("admit_flow",
             [](NetworkState& s, FlowId id, NodeId src, NodeId dst, double rate, int k) {
                 Flow f;
                 f.id = id;
                 f.src = src;
                 f.dst = dst;
                 f.reserved_gbps = rate;
                 return admit_flow(s, f, k);
             },
             py::arg("flow_id"), py::arg("src"), py::arg("dst"), py::arg("reserved_gbps"), py::arg("k") = kDefaultKsp)
        .def("terminate_flow", [](NetworkState& s, FlowId id) { return terminate_flow(s, id); }, py::arg("flow_id"))
        .def("average_packet_delay", [](const NetworkState& s) { return average_packet_delay(s); })
        .def("fda_reroute", [](NetworkState& s, double tol, int passes) { return fda_reroute(s, tol, passes); },
             py::arg("tol") = kDefaultFdaTolerance, py::arg("max_passes") = kDefaultFdaMaxPasses)
        .def("audit", [](const NetworkState& s) { return s.audit_full(); })
        .def_property_readonly("num_lightpaths", [](const NetworkState& s) { return s.virtual_topology().lightpaths().size(); })
        .def_property_readonly("active_flows", [](const NetworkState& s) {
            std::vector<FlowId> ids;
            for (const auto& [id, f] : s.flows())
                ids.push_back(id);
            return ids;
        })
        .def("to_json", [](const NetworkState& s) { return state_to_json(s).dump(); });

    m.def(
        "run_simulation",
        [](const std::filesystem::path& topology, const std::filesystem::path& traffic, std::uint64_t seed, int hours,
           bool fda_enabled, int k) {
            RunConfig config;
            config.topology = topology;
            config.traffic = traffic;
            config.seed = seed;
            config.hours = hours;
            config.fda_enabled = fda_enabled;
            config.k = k;
            config.trace = false;
            validate(config);
            auto topo = std::make_shared<const PhysicalTopology>(load_topology_file(topology));
            const auto sidecar = default_sidecar_path(traffic);
            const auto spec = load_traffic(traffic, std::filesystem::is_regular_file(sidecar)
                                                        ? std::optional<std::filesystem::path>(sidecar)
                                                        : std::nullopt);
            SimulationResult result = [&] {
                py::gil_scoped_release release;
                return run_simulation(topo, spec, simulation_options(config));
            }();
            py::dict out;
            py::list hourly;
            for (const auto& s : result.hourly)
                hourly.append(snapshot_dict(s));
            out["hourly"] = hourly;
            out["events_processed"] = result.events_processed;
            out["offered_flows"] = result.offered_flows;
            out["blocked_flows"] = result.blocked_flows;
            out["routing_table_csv"] = routing_table_csv(result.routing_table);
            out["virtual_topology_json"] = state_to_json(result.final_state).dump();
            return out;
        },
        py::arg("topology"), py::arg("traffic"), py::arg("seed") = 1, py::arg("hours") = 24,
        py::arg("fda_enabled") = true, py::arg("k") = kDefaultKsp);
}
