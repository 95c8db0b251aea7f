#include "wdm/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <ostream>
#include <set>

#include "wdm/error.hpp"
#include "wdm/reports.hpp"
#include "wdm/routing.hpp"

namespace wdm {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& value)
{
    fs::path p(value);
    return p.is_relative() && !base.empty() ? base / p : p;
}

template <typename T>
void take(const nlohmann::json& doc, const char* key, T& target)
{
    if (!doc.contains(key))
        return;
    try {
        target = doc.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(std::string("config: '") + key + "' has the wrong type");
    }
}

nlohmann::json read_json_file(const fs::path& path, const std::string& what)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open " + what + " " + path.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(what + " " + path.string() + ": " + e.what());
    }
}

} // namespace

RunConfig config_from_json(const nlohmann::json& doc, const fs::path& base_dir)
{
    static const std::set<std::string> known{
        "topology",       "traffic",          "traffic_models", "k",
        "seed",           "hours",            "fda_enabled",    "fda_tol",
        "fda_max_passes", "fda_period_s",     "out_dir",        "mean_holding_s",
        "lightpath_capacity_gbps", "hourly_floor", "full_audit_every", "trace",
        "force_trace"};
    if (!doc.is_object())
        throw ValidationError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key))
            throw ValidationError("config: unknown key '" + key + "'");
    }

    RunConfig c;
    std::string path;
    if (take(doc, "topology", path), !path.empty())
        c.topology = resolve(base_dir, std::exchange(path, {}));
    if (take(doc, "traffic", path), !path.empty())
        c.traffic = resolve(base_dir, std::exchange(path, {}));
    if (take(doc, "traffic_models", path), !path.empty())
        c.traffic_models = resolve(base_dir, std::exchange(path, {}));
    if (take(doc, "out_dir", path), !path.empty())
        c.out_dir = resolve(base_dir, std::exchange(path, {}));
    take(doc, "k", c.k);
    take(doc, "seed", c.seed);
    take(doc, "hours", c.hours);
    take(doc, "fda_enabled", c.fda_enabled);
    take(doc, "fda_tol", c.fda_tol);
    take(doc, "fda_max_passes", c.fda_max_passes);
    take(doc, "fda_period_s", c.fda_period_s);
    take(doc, "mean_holding_s", c.mean_holding_s);
    if (doc.contains("lightpath_capacity_gbps") && !doc["lightpath_capacity_gbps"].is_null()) {
        double capacity = 0.0;
        take(doc, "lightpath_capacity_gbps", capacity);
        c.lightpath_capacity_gbps = capacity;
    }
    take(doc, "hourly_floor", c.hourly_floor);
    take(doc, "full_audit_every", c.full_audit_every);
    take(doc, "trace", c.trace);
    take(doc, "force_trace", c.force_trace);
    return c;
}

nlohmann::ordered_json to_json(const RunConfig& c)
{
    nlohmann::ordered_json doc{
        {"topology", c.topology.string()},
        {"traffic", c.traffic.string()},
        {"traffic_models", c.traffic_models ? nlohmann::ordered_json(c.traffic_models->string()) : nullptr},
        {"k", c.k},
        {"seed", c.seed},
        {"hours", c.hours},
        {"fda_enabled", c.fda_enabled},
        {"fda_tol", c.fda_tol},
        {"fda_max_passes", c.fda_max_passes},
        {"fda_period_s", c.fda_period_s},
        {"out_dir", c.out_dir.string()},
        {"mean_holding_s", c.mean_holding_s},
        {"lightpath_capacity_gbps",
         c.lightpath_capacity_gbps ? nlohmann::ordered_json(*c.lightpath_capacity_gbps) : nullptr},
        {"hourly_floor", c.hourly_floor},
        {"full_audit_every", c.full_audit_every},
        {"trace", c.trace},
        {"force_trace", c.force_trace},
    };
    return doc;
}

void validate(const RunConfig& c)
{
    if (c.k < 1)
        throw ValidationError("k must be >= 1");
    if (c.hours < 1)
        throw ValidationError("hours must be >= 1");
    if (!(c.fda_tol > 0.0))
        throw ValidationError("fda_tol must be positive");
    if (c.fda_max_passes < 1)
        throw ValidationError("fda_max_passes must be >= 1");
    if (!(c.fda_period_s > 0.0))
        throw ValidationError("fda_period_s must be positive");
    if (!(c.mean_holding_s > 0.0))
        throw ValidationError("mean_holding_s must be positive");
    if (c.lightpath_capacity_gbps && !(*c.lightpath_capacity_gbps > 0.0))
        throw ValidationError("lightpath_capacity_gbps must be positive");
    if (!(c.hourly_floor >= 0.0 && c.hourly_floor <= 1.0))
        throw ValidationError("hourly_floor must be in [0, 1]");
    if (c.full_audit_every < 1)
        throw ValidationError("full_audit_every must be >= 1");
    if (!fs::is_regular_file(c.topology))
        throw ValidationError("topology file not found: " + c.topology.string());
    if (!fs::is_regular_file(c.traffic))
        throw ValidationError("traffic matrix not found: " + c.traffic.string());
    if (c.traffic_models && !fs::is_regular_file(*c.traffic_models))
        throw ValidationError("traffic sidecar not found: " + c.traffic_models->string());
}

SimulationOptions simulation_options(const RunConfig& c)
{
    SimulationOptions o;
    o.k = c.k;
    o.seed = c.seed;
    o.hours = c.hours;
    o.fda_enabled = c.fda_enabled;
    o.fda_tol = c.fda_tol;
    o.fda_max_passes = c.fda_max_passes;
    o.fda_period_s = c.fda_period_s;
    o.sessions.mean_holding_s = c.mean_holding_s;
    o.sessions.hourly_floor = c.hourly_floor;
    o.full_audit_every = c.full_audit_every;
    o.trace = c.trace;
    o.force_trace = c.force_trace;
    return o;
}

CliCommand parse_cli(const std::vector<std::string>& args)
{
    CLI::App app{"Flow-level simulator of multimedia traffic routing over IP/MPLS-over-WDM networks", "wdmsim"};
    app.require_subcommand(1);

    // Shared flag storage; only flags given explicitly are applied over the config file.
    std::string config_path, topology, traffic, traffic_models, out_dir;
    int k = 0, hours = 0, fda_max_passes = 0;
    std::uint64_t seed = 0;
    double fda_tol = 0, fda_period = 0, holding = 0, capacity = 0, floor = 0;
    long long full_audit_every = 0;
    bool no_fda = false, no_trace = false, force_trace = false;

    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;
    const auto add_run_options = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration; flags override its values");
        overrides.emplace_back(sub->add_option("--topology", topology, "Topology JSON document"),
                               [&](RunConfig& c) { c.topology = topology; });
        overrides.emplace_back(sub->add_option("--traffic", traffic, "Traffic matrix CSV (Gbps)"),
                               [&](RunConfig& c) { c.traffic = traffic; });
        overrides.emplace_back(sub->add_option("--traffic-models", traffic_models, "Traffic sidecar JSON"),
                               [&](RunConfig& c) { c.traffic_models = fs::path(traffic_models); });
        overrides.emplace_back(sub->add_option("--k", k, "Number of shortest physical paths tried per lightpath"),
                               [&](RunConfig& c) { c.k = k; });
        overrides.emplace_back(sub->add_option("--seed", seed, "Random seed"), [&](RunConfig& c) { c.seed = seed; });
        overrides.emplace_back(sub->add_option("--hours", hours, "Simulated hours"),
                               [&](RunConfig& c) { c.hours = hours; });
        overrides.emplace_back(sub->add_flag("--no-fda", no_fda, "Disable periodic flow deviation"),
                               [&](RunConfig& c) { c.fda_enabled = !no_fda; });
        overrides.emplace_back(sub->add_option("--fda-tol", fda_tol, "Relative delay improvement needed to move a flow"),
                               [&](RunConfig& c) { c.fda_tol = fda_tol; });
        overrides.emplace_back(sub->add_option("--fda-max-passes", fda_max_passes, "Passes per FDA run"),
                               [&](RunConfig& c) { c.fda_max_passes = fda_max_passes; });
        overrides.emplace_back(sub->add_option("--fda-period", fda_period, "Seconds between FDA runs"),
                               [&](RunConfig& c) { c.fda_period_s = fda_period; });
        overrides.emplace_back(sub->add_option("--out", out_dir, "Output directory"),
                               [&](RunConfig& c) { c.out_dir = out_dir; });
        overrides.emplace_back(sub->add_option("--mean-holding", holding, "Mean session holding time, s"),
                               [&](RunConfig& c) { c.mean_holding_s = holding; });
        overrides.emplace_back(sub->add_option("--capacity", capacity, "Lightpath capacity override, Gbps"),
                               [&](RunConfig& c) { c.lightpath_capacity_gbps = capacity; });
        overrides.emplace_back(sub->add_option("--hourly-floor", floor, "Night-time activity floor in [0,1]"),
                               [&](RunConfig& c) { c.hourly_floor = floor; });
        overrides.emplace_back(sub->add_option("--full-audit-every", full_audit_every, "Events between full audits"),
                               [&](RunConfig& c) { c.full_audit_every = full_audit_every; });
        overrides.emplace_back(sub->add_flag("--no-trace", no_trace, "Do not write events.ndjson"),
                               [&](RunConfig& c) { c.trace = !no_trace; });
        overrides.emplace_back(sub->add_flag("--force-trace", force_trace, "Trace beyond one million events"),
                               [&](RunConfig& c) { c.force_trace = force_trace; });
    };

    auto* run = app.add_subcommand("run", "Run the simulation and write reports");
    add_run_options(run);
    auto* check = app.add_subcommand("validate", "Check configuration, topology and traffic inputs");
    add_run_options(check);

    CliCommand cmd;
    auto* ksp = app.add_subcommand("ksp", "Print the k shortest physical paths between two nodes");
    std::string ksp_topology;
    int ksp_k = kDefaultKsp;
    ksp->add_option("--topology", ksp_topology, "Topology JSON document")->required();
    ksp->add_option("--src", cmd.src, "Source node id")->required();
    ksp->add_option("--dst", cmd.dst, "Destination node id")->required();
    ksp->add_option("--k", ksp_k, "Number of paths");

    auto* delay = app.add_subcommand("delay", "Print the average packet delay of a saved virtual_topology.json");
    std::string delay_topology, state_path;
    delay->add_option("--topology", delay_topology, "Topology JSON document")->required();
    delay->add_option("--state", state_path, "Saved virtual_topology.json")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        cmd.name = "help";
        cmd.help_text = app.help();
        for (auto* sub : app.get_subcommands())
            cmd.help_text = sub->help();
        return cmd;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (run->parsed() || check->parsed()) {
        cmd.name = run->parsed() ? "run" : "validate";
        if (!config_path.empty()) {
            const fs::path file(config_path);
            cmd.config = config_from_json(read_json_file(file, "config"), file.parent_path());
        }
        for (auto& [option, apply] : overrides) {
            if (option->count() > 0)
                apply(cmd.config);
        }
        if (cmd.config.topology.empty())
            throw UsageError("--topology is required (flag or config file)");
        if (cmd.config.traffic.empty())
            throw UsageError("--traffic is required (flag or config file)");
        validate(cmd.config);
    } else if (ksp->parsed()) {
        cmd.name = "ksp";
        cmd.config.topology = ksp_topology;
        cmd.config.k = ksp_k;
        if (ksp_k < 1)
            throw ValidationError("k must be >= 1");
    } else {
        cmd.name = "delay";
        cmd.config.topology = delay_topology;
        cmd.state = state_path;
    }
    return cmd;
}

namespace {

std::shared_ptr<const PhysicalTopology> load_for(const RunConfig& c)
{
    auto topo = load_topology_file(c.topology);
    if (c.lightpath_capacity_gbps)
        topo = topo.with_capacity(*c.lightpath_capacity_gbps);
    return std::make_shared<const PhysicalTopology>(std::move(topo));
}

TrafficSpec traffic_for(const RunConfig& c)
{
    auto sidecar = c.traffic_models;
    if (!sidecar && fs::is_regular_file(default_sidecar_path(c.traffic)))
        sidecar = default_sidecar_path(c.traffic);
    return load_traffic(c.traffic, sidecar);
}

int execute(const CliCommand& cmd, std::ostream& out)
{
    if (cmd.name == "help") {
        out << cmd.help_text;
        return kExitOk;
    }
    if (cmd.name == "ksp") {
        const auto topo = load_topology_file(cmd.config.topology);
        if (cmd.src < 0 || cmd.src >= topo.num_nodes() || cmd.dst < 0 || cmd.dst >= topo.num_nodes() ||
            cmd.src == cmd.dst)
            throw ValidationError("--src and --dst must be distinct node ids of the topology");
        const auto routes = k_shortest_paths(topo, cmd.src, cmd.dst, cmd.config.k);
        if (routes.empty())
            out << "no path from " << cmd.src << " to " << cmd.dst << "\n";
        for (size_t i = 0; i < routes.size(); ++i) {
            out << "#" << i + 1 << " hops=" << routes[i].hop_count << " km=" << format_number(routes[i].length_km)
                << " links=";
            for (size_t j = 0; j < routes[i].links.size(); ++j)
                out << (j ? " " : "") << routes[i].links[j];
            out << " nodes=";
            const auto nodes = route_nodes(topo, routes[i].links);
            for (size_t j = 0; j < nodes.size(); ++j)
                out << (j ? "-" : "") << topo.node(nodes[j]).name;
            out << "\n";
        }
        return kExitOk;
    }
    if (cmd.name == "delay") {
        auto topo = std::make_shared<const PhysicalTopology>(load_topology_file(cmd.config.topology));
        const auto state = load_network_state(topo, read_json_file(cmd.state, "state"));
        if (state.flows().empty())
            out << "average_packet_delay_s: no traffic\n";
        else
            out << "average_packet_delay_s: " << format_number(average_packet_delay(state)) << "\n";
        out << "active_flows: " << state.flows().size() << "\n"
            << "lightpaths: " << state.virtual_topology().lightpaths().size() << "\n";
        return kExitOk;
    }

    const auto topo = load_for(cmd.config);
    const auto traffic = traffic_for(cmd.config);
    if (traffic.matrix.num_nodes() != topo->num_nodes())
        throw ValidationError("traffic matrix has " + std::to_string(traffic.matrix.num_nodes()) +
                              " rows but the topology has " + std::to_string(topo->num_nodes()) + " nodes");
    if (cmd.name == "validate") {
        out << "ok: " << topo->num_nodes() << " nodes, " << topo->num_links() << " links, total demand "
            << format_number(traffic.matrix.total_demand()) << " Gbps\n";
        return kExitOk;
    }

    const auto result = run_simulation(topo, traffic, simulation_options(cmd.config));
    auto echo = to_json(cmd.config);
    echo["lightpath_capacity_gbps_effective"] = topo->lightpath_capacity_gbps();
    echo["traffic_models_effective"] = to_json(traffic.models);
    const auto written = emit_reports(result, echo, cmd.config.seed, cmd.config.out_dir);
    out << "events: " << result.events_processed << "  offered: " << result.offered_flows
        << "  blocked: " << result.blocked_flows << "  final lightpaths: "
        << result.final_state.virtual_topology().lightpaths().size() << "\n";
    for (const auto& path : written)
        out << "wrote " << path.string() << "\n";
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        return execute(parse_cli(args), out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\nrun with --help for usage\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace wdm
