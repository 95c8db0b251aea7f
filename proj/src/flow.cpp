#include "wdm/flow.hpp"

namespace wdm {

std::string_view to_string(TrafficClass c)
{
    switch (c) {
    case TrafficClass::AudioUnitary:
        return "audio-unitary";
    case TrafficClass::AudioAggregated:
        return "audio-aggregated";
    case TrafficClass::Video:
        return "video";
    }
    return "unknown";
}

std::optional<TrafficClass> parse_traffic_class(std::string_view text)
{
    if (text == "audio-unitary")
        return TrafficClass::AudioUnitary;
    if (text == "audio-aggregated")
        return TrafficClass::AudioAggregated;
    if (text == "video")
        return TrafficClass::Video;
    return std::nullopt;
}

std::string_view to_string(FlowState s)
{
    switch (s) {
    case FlowState::Active:
        return "active";
    case FlowState::Blocked:
        return "blocked";
    case FlowState::Departed:
        return "departed";
    }
    return "unknown";
}

} // namespace wdm
