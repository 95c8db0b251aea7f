#include "wdm/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <utility>

#include "wdm/error.hpp"

namespace wdm {

namespace {

[[noreturn]] void reject(const std::string& entity, long long id, const std::string& what)
{
    throw ValidationError(entity + " " + std::to_string(id) + ": " + what);
}

bool nearly_equal(double a, double b)
{
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

template <typename T>
T required(const nlohmann::json& obj, const char* key, const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end())
        throw ValidationError(where + ": missing field '" + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(where + ": field '" + key + "' has the wrong type");
    }
}

template <typename T>
T optional_field(const nlohmann::json& obj, const char* key, T fallback, const std::string& where)
{
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(where + ": field '" + key + "' has the wrong type");
    }
}

} // namespace

PhysicalTopology PhysicalTopology::build(std::vector<Node> nodes, std::vector<FiberLink> links,
                                         std::vector<int> max_transmitters,
                                         std::vector<int> max_receivers,
                                         double lightpath_capacity_gbps)
{
    if (nodes.empty())
        throw ValidationError("topology has no nodes");
    if (!(lightpath_capacity_gbps > 0.0) || !std::isfinite(lightpath_capacity_gbps))
        throw ValidationError("lightpath_capacity_gbps must be positive and finite");

    const auto n = static_cast<long long>(nodes.size());
    std::vector<char> seen(nodes.size(), 0);
    for (const auto& node : nodes) {
        if (node.id < 0 || node.id >= n)
            reject("node", node.id, "id outside 0.." + std::to_string(n - 1));
        if (seen[static_cast<size_t>(node.id)])
            reject("node", node.id, "duplicate node id");
        seen[static_cast<size_t>(node.id)] = 1;
        if (!std::isfinite(node.x_km) || !std::isfinite(node.y_km))
            reject("node", node.id, "non-finite coordinate");
        if (node.population < 0)
            reject("node", node.id, "negative population");
        if (node.timezone_offset_h < -12 || node.timezone_offset_h > 14)
            reject("node", node.id, "timezone offset outside [-12, +14]");
    }
    std::ranges::sort(nodes, {}, &Node::id);

    std::set<std::pair<double, double>> coords;
    for (const auto& node : nodes) {
        if (!coords.emplace(node.x_km, node.y_km).second)
            reject("node", node.id, "coordinates coincide with another node");
    }

    const auto m = static_cast<long long>(links.size());
    std::vector<char> seen_link(links.size(), 0);
    for (auto& link : links) {
        if (link.id < 0 || link.id >= m)
            reject("link", link.id, "id outside 0.." + std::to_string(m - 1));
        if (seen_link[static_cast<size_t>(link.id)])
            reject("link", link.id, "duplicate link id");
        seen_link[static_cast<size_t>(link.id)] = 1;
        if (link.src < 0 || link.src >= n)
            reject("link", link.id, "unknown endpoint " + std::to_string(link.src));
        if (link.dst < 0 || link.dst >= n)
            reject("link", link.id, "unknown endpoint " + std::to_string(link.dst));
        if (link.src == link.dst)
            reject("link", link.id, "src equals dst");
        if (link.num_wavelengths < 1)
            reject("link", link.id, "num_wavelengths must be >= 1");
        const auto& a = nodes[static_cast<size_t>(link.src)];
        const auto& b = nodes[static_cast<size_t>(link.dst)];
        link.length_km = std::hypot(b.x_km - a.x_km, b.y_km - a.y_km);
    }
    std::ranges::sort(links, {}, &FiberLink::id);

    if (max_transmitters.size() != nodes.size())
        throw ValidationError("max_transmitters must have one entry per node");
    if (max_receivers.size() != nodes.size())
        throw ValidationError("max_receivers must have one entry per node");
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (max_transmitters[i] < 0)
            reject("node", static_cast<long long>(i), "negative max_transmitters");
        if (max_receivers[i] < 0)
            reject("node", static_cast<long long>(i), "negative max_receivers");
    }

    PhysicalTopology topo;
    topo.out_links_.resize(nodes.size());
    for (const auto& link : links)
        topo.out_links_[static_cast<size_t>(link.src)].push_back(link.id);
    topo.nodes_ = std::move(nodes);
    topo.links_ = std::move(links);
    topo.max_tx_ = std::move(max_transmitters);
    topo.max_rx_ = std::move(max_receivers);
    topo.capacity_gbps_ = lightpath_capacity_gbps;
    return topo;
}

long long PhysicalTopology::total_channels() const
{
    long long total = 0;
    for (const auto& link : links_)
        total += link.num_wavelengths;
    return total;
}

PhysicalTopology PhysicalTopology::with_capacity(double capacity_gbps) const
{
    return build(nodes_, links_, max_tx_, max_rx_, capacity_gbps);
}

bool PhysicalTopology::operator==(const PhysicalTopology& other) const
{
    return nodes_ == other.nodes_ && links_ == other.links_ && max_tx_ == other.max_tx_ &&
           max_rx_ == other.max_rx_ && capacity_gbps_ == other.capacity_gbps_;
}

PhysicalTopology load_topology(const nlohmann::json& document)
{
    if (!document.is_object())
        throw ValidationError("topology document must be a JSON object");
    if (!document.contains("nodes") || !document["nodes"].is_array())
        throw ValidationError("topology document needs a 'nodes' array");
    if (!document.contains("links") || !document["links"].is_array())
        throw ValidationError("topology document needs a 'links' array");

    std::vector<Node> nodes;
    for (size_t i = 0; i < document["nodes"].size(); ++i) {
        const auto& entry = document["nodes"][i];
        const std::string where = "nodes[" + std::to_string(i) + "]";
        if (!entry.is_object())
            throw ValidationError(where + ": expected an object");
        Node node;
        node.id = required<int>(entry, "id", where);
        const std::string named = "node " + std::to_string(node.id);
        node.name = optional_field<std::string>(entry, "name", "n" + std::to_string(node.id), named);
        node.x_km = required<double>(entry, "x_km", named);
        node.y_km = required<double>(entry, "y_km", named);
        node.population = optional_field<long long>(entry, "population", 0, named);
        node.node_type = optional_field<std::string>(entry, "type", "", named);
        node.timezone_offset_h = optional_field<int>(entry, "timezone_offset_h", 0, named);
        nodes.push_back(std::move(node));
    }

    std::vector<FiberLink> links;
    std::vector<std::pair<LinkId, double>> stated_lengths;
    for (size_t i = 0; i < document["links"].size(); ++i) {
        const auto& entry = document["links"][i];
        const std::string where = "links[" + std::to_string(i) + "]";
        if (!entry.is_object())
            throw ValidationError(where + ": expected an object");
        FiberLink link;
        link.id = required<int>(entry, "id", where);
        const std::string named = "link " + std::to_string(link.id);
        link.src = required<int>(entry, "src", named);
        link.dst = required<int>(entry, "dst", named);
        link.num_wavelengths = required<int>(entry, "num_wavelengths", named);
        if (entry.contains("length_km"))
            stated_lengths.emplace_back(link.id, required<double>(entry, "length_km", named));
        links.push_back(link);
    }

    const auto per_node = [&](const char* key) {
        if (!document.contains(key))
            throw ValidationError(std::string("topology document needs '") + key + "'");
        try {
            return document[key].get<std::vector<int>>();
        } catch (const nlohmann::json::exception&) {
            throw ValidationError(std::string("'") + key + "' must be an array of integers");
        }
    };

    const double capacity = optional_field<double>(document, "lightpath_capacity_gbps",
                                                   kDefaultLightpathCapacityGbps, "topology");
    auto topo = PhysicalTopology::build(std::move(nodes), std::move(links),
                                        per_node("max_transmitters"), per_node("max_receivers"),
                                        capacity);

    for (const auto& [id, length] : stated_lengths) {
        if (!nearly_equal(length, topo.link(id).length_km))
            reject("link", id,
                   "length_km " + std::to_string(length) + " conflicts with coordinate distance " +
                       std::to_string(topo.link(id).length_km));
    }
    return topo;
}

PhysicalTopology load_topology_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open topology file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("topology file " + path.string() + ": " + e.what());
    }
    return load_topology(doc);
}

nlohmann::json to_json(const PhysicalTopology& topology)
{
    nlohmann::json doc;
    doc["nodes"] = nlohmann::json::array();
    for (const auto& node : topology.nodes()) {
        doc["nodes"].push_back({{"id", node.id},
                                {"name", node.name},
                                {"x_km", node.x_km},
                                {"y_km", node.y_km},
                                {"population", node.population},
                                {"type", node.node_type},
                                {"timezone_offset_h", node.timezone_offset_h}});
    }
    doc["links"] = nlohmann::json::array();
    for (const auto& link : topology.links()) {
        doc["links"].push_back({{"id", link.id},
                                {"src", link.src},
                                {"dst", link.dst},
                                {"num_wavelengths", link.num_wavelengths},
                                {"length_km", link.length_km}});
    }
    doc["max_transmitters"] = topology.max_transmitters();
    doc["max_receivers"] = topology.max_receivers();
    doc["lightpath_capacity_gbps"] = topology.lightpath_capacity_gbps();
    return doc;
}

double propagation_delay_s(double length_km)
{
    if (length_km < 0.0 || std::isnan(length_km))
        throw std::invalid_argument("propagation_delay_s: negative length");
    return length_km / kFiberLightSpeedKmPerS;
}

} // namespace wdm
