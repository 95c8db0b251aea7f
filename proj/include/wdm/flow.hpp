#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "wdm/routing.hpp"

namespace wdm {

/// Multimedia traffic class of a demand; selects its stochastic source model.
enum class TrafficClass {
    AudioUnitary,    // on-off source
    AudioAggregated, // MMPP-N
    Video,           // M/G/inf input process
};

std::string_view to_string(TrafficClass c);
/// Parses "audio-unitary" | "audio-aggregated" | "video"; nullopt otherwise.
std::optional<TrafficClass> parse_traffic_class(std::string_view text);

enum class FlowState { Active, Blocked, Departed };

std::string_view to_string(FlowState s);

struct Flow {
    FlowId id = 0;
    NodeId src = 0;
    NodeId dst = 0;
    double reserved_gbps = 0.0;
    TrafficClass model = TrafficClass::AudioUnitary;
    std::optional<VirtualRoute> route;
    FlowState state = FlowState::Active;

    bool operator==(const Flow&) const = default;
};

} // namespace wdm
