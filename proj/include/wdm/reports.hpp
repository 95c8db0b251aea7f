#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wdm/simulation.hpp"

namespace wdm {

/// Shortest decimal text that reads back to the same double; "inf"/"-inf"/"nan"
/// for non-finite values.
std::string format_number(double value);

/// Quotes a CSV field when it contains a comma, quote, CR or LF (RFC 4180).
std::string csv_field(std::string_view text);

/// Lightpaths and Active flows of a network state; readable by load_network_state.
nlohmann::ordered_json state_to_json(const NetworkState& state);

/// Rebuilds a state saved by state_to_json on the given physical topology.
/// Throws ValidationError if it does not fit the topology.
NetworkState load_network_state(std::shared_ptr<const PhysicalTopology> topology, const nlohmann::json& doc);

std::string routing_table_csv(const std::vector<RoutingTableRow>& rows);
std::string hourly_metrics_csv(const std::vector<MetricsSnapshot>& hourly);

/// Writes virtual_topology.json, routing_table.csv, hourly_metrics.csv,
/// summary.json (and events.ndjson when the trace is non-empty) into out_dir.
/// Everything is written to temporaries first and renamed afterwards; on
/// failure the temporaries are removed and std::runtime_error is thrown.
/// Returns the paths written.
std::vector<std::filesystem::path> emit_reports(const SimulationResult& result, const nlohmann::ordered_json& config_echo,
                                                std::uint64_t seed, const std::filesystem::path& out_dir);

} // namespace wdm
