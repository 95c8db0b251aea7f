#include "wdm/reports.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "wdm/error.hpp"

namespace wdm {

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{})
        throw std::runtime_error("format_number failed");
    return std::string(buf.data(), end);
}

std::string csv_field(std::string_view text)
{
    if (text.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(text);
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

nlohmann::ordered_json state_to_json(const NetworkState& state)
{
    const auto& vt = state.virtual_topology();
    nlohmann::ordered_json doc;
    doc["lightpaths"] = nlohmann::ordered_json::array();
    for (const auto& [id, lp] : vt.lightpaths()) {
        std::vector<FlowId> flows;
        for (const auto& [flow, rate] : lp.flows)
            flows.push_back(flow);
        std::vector<NodeId> nodes{lp.src};
        for (LinkId link : lp.route)
            nodes.push_back(vt.physical().link(link).dst);
        doc["lightpaths"].push_back({{"id", id},
                                     {"src", lp.src},
                                     {"dst", lp.dst},
                                     {"route", lp.route},
                                     {"nodes", nodes},
                                     {"wavelength", lp.wavelength},
                                     {"length_km", lp.length_km},
                                     {"capacity_gbps", lp.capacity_gbps},
                                     {"carried_gbps", lp.carried_gbps},
                                     {"flows", flows}});
    }
    doc["flows"] = nlohmann::ordered_json::array();
    for (const auto& [id, flow] : state.flows()) {
        doc["flows"].push_back({{"id", id},
                                {"src", flow.src},
                                {"dst", flow.dst},
                                {"reserved_gbps", flow.reserved_gbps},
                                {"class", std::string(to_string(flow.model))},
                                {"lightpaths", flow.route->lightpath_ids}});
    }
    return doc;
}

NetworkState load_network_state(std::shared_ptr<const PhysicalTopology> topology, const nlohmann::json& doc)
{
    NetworkState state(std::move(topology));
    auto& vt = state.virtual_topology();
    try {
        for (const auto& lp : doc.at("lightpaths")) {
            vt.add_lightpath(lp.at("src").get<NodeId>(), lp.at("dst").get<NodeId>(),
                             lp.at("route").get<std::vector<LinkId>>(), lp.at("wavelength").get<int>(),
                             lp.at("id").get<LightpathId>());
        }
        for (const auto& f : doc.at("flows")) {
            Flow flow;
            flow.id = f.at("id").get<FlowId>();
            flow.src = f.at("src").get<NodeId>();
            flow.dst = f.at("dst").get<NodeId>();
            flow.reserved_gbps = f.at("reserved_gbps").get<double>();
            if (f.contains("class")) {
                auto cls = parse_traffic_class(f["class"].get<std::string>());
                if (!cls)
                    throw ValidationError("flow " + std::to_string(flow.id) + ": unknown traffic class");
                flow.model = *cls;
            }
            auto route = make_virtual_route(vt, f.at("lightpaths").get<std::vector<LightpathId>>());
            state.install_flow(std::move(flow), std::move(route));
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("saved state does not fit the topology: ") + e.what());
    }
    if (auto issues = state.audit_full(); !issues.empty())
        throw ValidationError("saved state is inconsistent: " + issues.front());
    return state;
}

namespace {

std::string join(const auto& values, char sep)
{
    std::string out;
    for (const auto& v : values) {
        if (!out.empty())
            out += sep;
        out += std::to_string(v);
    }
    return out;
}

std::string optional_number(const std::optional<double>& value, std::string_view missing)
{
    return value ? format_number(*value) : std::string(missing);
}

std::string timestamp_utc()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

} // namespace

std::string routing_table_csv(const std::vector<RoutingTableRow>& rows)
{
    std::ostringstream out;
    out << "flow_id,src,dst,reserved_gbps,lightpaths,virtual_hops,hop_details\r\n";
    for (const auto& row : rows) {
        // hop_details: "<lightpath>:<link link ...>@<wavelength>" per hop, ';'-separated.
        std::string details;
        for (size_t i = 0; i < row.hops.size(); ++i) {
            if (i > 0)
                details += ';';
            details += std::to_string(row.lightpaths[i]) + ':' + join(row.hops[i].first, ' ') + '@' +
                       std::to_string(row.hops[i].second);
        }
        out << row.flow << ',' << row.src << ',' << row.dst << ',' << format_number(row.reserved_gbps) << ','
            << csv_field(join(row.lightpaths, ' ')) << ',' << row.virtual_hops << ',' << csv_field(details) << "\r\n";
    }
    return out.str();
}

std::string hourly_metrics_csv(const std::vector<MetricsSnapshot>& hourly)
{
    std::ostringstream out;
    out << "hour,offered_flows,admitted_flows,blocked_flows,blocking_ratio,active_flows,active_lightpaths,"
           "wavelength_utilization,avg_packet_delay_s,mean_virtual_hops,fda_runs,fda_moves,fda_delay_before_s\r\n";
    for (const auto& s : hourly) {
        out << s.hour << ',' << s.offered_flows << ',' << s.admitted_flows << ',' << s.blocked_flows << ','
            << format_number(s.blocking_ratio) << ',' << s.active_flows << ',' << s.active_lightpaths << ','
            << format_number(s.wavelength_utilization) << ','
            << csv_field(optional_number(s.avg_packet_delay_s, "no traffic")) << ','
            << format_number(s.mean_virtual_hops) << ',' << s.fda_runs << ',' << s.fda_moves << ','
            << optional_number(s.fda_delay_before_s, "") << "\r\n";
    }
    return out.str();
}

std::vector<std::filesystem::path> emit_reports(const SimulationResult& result, const nlohmann::ordered_json& config_echo,
                                                std::uint64_t seed, const std::filesystem::path& out_dir)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory " + out_dir.string());

    const auto& final_vt = result.final_state.virtual_topology();
    nlohmann::ordered_json summary;
    summary["seed"] = seed;
    summary["config"] = config_echo;
    summary["totals"] = {
        {"events_processed", result.events_processed},
        {"offered_flows", result.offered_flows},
        {"admitted_flows", result.admitted_flows},
        {"blocked_flows", result.blocked_flows},
        {"blocking_ratio", result.offered_flows > 0 ? static_cast<double>(result.blocked_flows) /
                                                          static_cast<double>(result.offered_flows)
                                                    : 0.0},
        {"final_active_flows", result.final_state.flows().size()},
        {"final_lightpaths", final_vt.lightpaths().size()},
        {"fast_audits", result.audits.fast},
        {"full_audits", result.audits.full},
        {"audit_violations", result.audits.violations},
        {"trace_truncated", result.trace_truncated},
    };
    summary["generated_at"] = timestamp_utc();

    std::vector<std::pair<std::string, std::string>> files{
        {"virtual_topology.json", state_to_json(result.final_state).dump(2) + "\n"},
        {"routing_table.csv", routing_table_csv(result.routing_table)},
        {"hourly_metrics.csv", hourly_metrics_csv(result.hourly)},
        {"summary.json", summary.dump(2) + "\n"},
    };
    if (!result.trace.empty()) {
        std::string lines;
        for (const auto& line : result.trace) {
            lines += line;
            lines += '\n';
        }
        files.emplace_back("events.ndjson", std::move(lines));
    }

    std::vector<fs::path> temps;
    const auto cleanup = [&] {
        for (const auto& t : temps)
            fs::remove(t, ec);
    };
    for (const auto& [name, content] : files) {
        const fs::path tmp = out_dir / (name + ".tmp");
        temps.push_back(tmp);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) {
            cleanup();
            throw std::runtime_error("cannot write " + (out_dir / name).string());
        }
    }
    std::vector<fs::path> written;
    for (size_t i = 0; i < files.size(); ++i) {
        const fs::path target = out_dir / files[i].first;
        fs::rename(temps[i], target, ec);
        if (ec) {
            cleanup();
            throw std::runtime_error("cannot move report into place: " + target.string());
        }
        written.push_back(target);
    }
    return written;
}

} // namespace wdm
