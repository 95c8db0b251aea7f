#include "wdm/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "wdm/error.hpp"

namespace wdm {

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

double Rng::uniform01()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::exponential(double mean)
{
    return -mean * std::log1p(-uniform01());
}

double Rng::pareto(double alpha, double x_min)
{
    return x_min * std::pow(1.0 - uniform01(), -1.0 / alpha);
}

void validate(const OnOffParams& p)
{
    if (!(p.peak_gbps > 0.0) || !(p.mean_on_s > 0.0) || !(p.mean_off_s > 0.0))
        throw std::invalid_argument("on-off parameters must be positive");
}

void validate(const MmppParams& p)
{
    if (p.n_sources < 1)
        throw std::invalid_argument("MMPP needs at least one source");
    validate(p.per_source);
}

void validate(const MgInfParams& p)
{
    if (!(p.lambda_per_s > 0.0) || !(p.pareto_xmin_s > 0.0) || !(p.unit_gbps > 0.0))
        throw std::invalid_argument("M/G/inf parameters must be positive");
    if (!(p.pareto_alpha > 1.0))
        throw std::invalid_argument("M/G/inf Pareto shape must exceed 1");
}

double onoff_mean_rate(const OnOffParams& p)
{
    validate(p);
    return p.peak_gbps * p.mean_on_s / (p.mean_on_s + p.mean_off_s);
}

double mmpp_mean_rate(const MmppParams& p)
{
    validate(p);
    return p.n_sources * onoff_mean_rate(p.per_source);
}

double mginf_mean_rate(const MgInfParams& p)
{
    validate(p);
    return p.lambda_per_s * p.mean_service_s() * p.unit_gbps;
}

double RateTrace::segment_end(size_t i) const
{
    return i + 1 < segments.size() ? segments[i + 1].start_s : horizon_s;
}

double RateTrace::rate_at(double t_s) const
{
    if (segments.empty() || t_s < 0.0 || t_s >= horizon_s)
        return 0.0;
    auto it = std::ranges::upper_bound(segments, t_s, {}, &RateSegment::start_s);
    return std::prev(it)->rate_gbps;
}

double RateTrace::time_average() const
{
    if (!(horizon_s > 0.0))
        return 0.0;
    double area = 0.0;
    for (size_t i = 0; i < segments.size(); ++i)
        area += segments[i].rate_gbps * (segment_end(i) - segments[i].start_s);
    return area / horizon_s;
}

RateTrace sample_onoff_path(const OnOffParams& p, Rng& rng, double horizon_s)
{
    validate(p);
    if (!(horizon_s > 0.0))
        throw std::invalid_argument("horizon must be positive");
    RateTrace trace;
    trace.horizon_s = horizon_s;
    bool on = rng.bernoulli(p.on_probability());
    double t = 0.0;
    while (t < horizon_s) {
        trace.segments.push_back({t, on ? p.peak_gbps : 0.0});
        t += rng.exponential(on ? p.mean_on_s : p.mean_off_s);
        on = !on;
    }
    return trace;
}

RateTrace sample_mmpp_path(const MmppParams& p, Rng& rng, double horizon_s)
{
    validate(p);
    if (!(horizon_s > 0.0))
        throw std::invalid_argument("horizon must be positive");
    const auto& src = p.per_source;
    const auto n = static_cast<size_t>(p.n_sources);

    std::vector<char> on(n);
    std::vector<double> next(n);
    int active = 0;
    for (size_t i = 0; i < n; ++i) {
        on[i] = rng.bernoulli(src.on_probability());
        next[i] = rng.exponential(on[i] ? src.mean_on_s : src.mean_off_s);
        active += on[i];
    }

    RateTrace trace;
    trace.horizon_s = horizon_s;
    trace.segments.push_back({0.0, active * src.peak_gbps});
    for (;;) {
        const auto i = static_cast<size_t>(std::ranges::min_element(next) - next.begin());
        const double t = next[i];
        if (t >= horizon_s)
            break;
        on[i] = !on[i];
        active += on[i] ? 1 : -1;
        next[i] = t + rng.exponential(on[i] ? src.mean_on_s : src.mean_off_s);
        trace.segments.push_back({t, active * src.peak_gbps});
    }
    return trace;
}

RateTrace sample_mginf_path(const MgInfParams& p, Rng& rng, double horizon_s)
{
    validate(p);
    if (!(horizon_s > 0.0))
        throw std::invalid_argument("horizon must be positive");

    const double warmup = 10.0 * p.mean_service_s();
    const double mean_gap = 1.0 / p.lambda_per_s;

    // (time, +1 arrival / -1 departure) inside the returned window.
    std::vector<std::pair<double, int>> changes;
    long long busy_at_zero = 0;
    for (double t = -warmup + rng.exponential(mean_gap); t < horizon_s; t += rng.exponential(mean_gap)) {
        const double end = t + rng.pareto(p.pareto_alpha, p.pareto_xmin_s);
        if (t < 0.0) {
            if (end > 0.0) {
                ++busy_at_zero;
                if (end < horizon_s)
                    changes.emplace_back(end, -1);
            }
            continue;
        }
        changes.emplace_back(t, +1);
        if (end < horizon_s)
            changes.emplace_back(end, -1);
    }
    std::ranges::sort(changes);

    RateTrace trace;
    trace.horizon_s = horizon_s;
    long long busy = busy_at_zero;
    trace.segments.push_back({0.0, static_cast<double>(busy) * p.unit_gbps});
    for (const auto& [t, delta] : changes) {
        busy += delta;
        const double rate = static_cast<double>(busy) * p.unit_gbps;
        if (trace.segments.back().start_s == t)
            trace.segments.back().rate_gbps = rate;
        else
            trace.segments.push_back({t, rate});
    }
    return trace;
}

double hourly_factor(int hour_utc, int tz_offset_h, double floor)
{
    if (hour_utc < 0 || hour_utc > 23)
        throw std::invalid_argument("hour must be in 0..23");
    if (!(floor >= 0.0 && floor <= 1.0))
        throw std::invalid_argument("hourly floor must be in [0, 1]");
    const int local = ((hour_utc + tz_offset_h) % 24 + 24) % 24;
    const double phase = 2.0 * std::numbers::pi * (local - 14) / 24.0;
    return floor + (1.0 - floor) * (0.5 + 0.5 * std::cos(phase));
}

double TrafficModels::mean_rate(TrafficClass c) const
{
    switch (c) {
    case TrafficClass::AudioUnitary:
        return onoff_mean_rate(audio_unitary);
    case TrafficClass::AudioAggregated:
        return mmpp_mean_rate(audio_aggregated);
    case TrafficClass::Video:
        return mginf_mean_rate(video);
    }
    throw std::invalid_argument("unknown traffic class");
}

TrafficMatrix::TrafficMatrix(int num_nodes, std::vector<double> demand_gbps, std::vector<TrafficClass> classes)
    : n_(num_nodes), demand_(std::move(demand_gbps)), classes_(std::move(classes))
{
    const auto cells = static_cast<size_t>(n_) * static_cast<size_t>(n_);
    if (n_ < 1 || demand_.size() != cells || classes_.size() != cells)
        throw ValidationError("traffic matrix must be square with one entry per node pair");
    for (int s = 0; s < n_; ++s) {
        for (int d = 0; d < n_; ++d) {
            const double v = demand(s, d);
            const std::string where = "traffic matrix entry (" + std::to_string(s) + ", " + std::to_string(d) + ")";
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError(where + ": demand must be finite and non-negative");
            if (s == d && v != 0.0)
                throw ValidationError(where + ": diagonal must be zero");
        }
    }
}

TrafficMatrix TrafficMatrix::zeros(int num_nodes)
{
    const auto cells = static_cast<size_t>(num_nodes) * static_cast<size_t>(num_nodes);
    return TrafficMatrix(num_nodes, std::vector<double>(cells, 0.0),
                         std::vector<TrafficClass>(cells, TrafficClass::AudioUnitary));
}

size_t TrafficMatrix::index(NodeId s, NodeId d) const
{
    if (s < 0 || s >= n_ || d < 0 || d >= n_)
        throw std::out_of_range("traffic matrix index out of range");
    return static_cast<size_t>(s) * static_cast<size_t>(n_) + static_cast<size_t>(d);
}

double TrafficMatrix::total_demand() const
{
    double total = 0.0;
    for (double v : demand_)
        total += v;
    return total;
}

namespace {

std::vector<std::vector<double>> read_csv_matrix(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open traffic matrix " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#')
            continue;
        std::vector<double> row;
        std::stringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            try {
                size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos)
                    throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                                      cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename T>
void read_if_present(const nlohmann::json& obj, const char* key, T& target, const std::string& where)
{
    if (!obj.contains(key))
        return;
    try {
        target = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(where + ": field '" + key + "' has the wrong type");
    }
}

void read_onoff(const nlohmann::json& obj, OnOffParams& p, const std::string& where)
{
    read_if_present(obj, "peak_gbps", p.peak_gbps, where);
    read_if_present(obj, "mean_on_s", p.mean_on_s, where);
    read_if_present(obj, "mean_off_s", p.mean_off_s, where);
}

TrafficClass class_from_json(const nlohmann::json& value, const std::string& where)
{
    if (!value.is_string())
        throw ValidationError(where + ": traffic class must be a string");
    auto parsed = parse_traffic_class(value.get<std::string>());
    if (!parsed)
        throw ValidationError(where + ": unknown traffic class '" + value.get<std::string>() + "'");
    return *parsed;
}

} // namespace

std::filesystem::path default_sidecar_path(const std::filesystem::path& csv_path)
{
    auto sidecar = csv_path;
    sidecar.replace_extension(".models.json");
    return sidecar;
}

TrafficSpec load_traffic(const std::filesystem::path& csv_path,
                         const std::optional<std::filesystem::path>& sidecar_path)
{
    const auto rows = read_csv_matrix(csv_path);
    const auto n = rows.size();
    if (n == 0)
        throw ValidationError("traffic matrix " + csv_path.string() + " is empty");
    std::vector<double> demand;
    for (size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n)
            throw ValidationError("traffic matrix row " + std::to_string(i) + " has " +
                                  std::to_string(rows[i].size()) + " columns, expected " + std::to_string(n));
        demand.insert(demand.end(), rows[i].begin(), rows[i].end());
    }

    TrafficModels models;
    std::vector<TrafficClass> classes(n * n, TrafficClass::AudioUnitary);
    if (sidecar_path) {
        std::ifstream in(*sidecar_path);
        if (!in)
            throw ValidationError("cannot open traffic sidecar " + sidecar_path->string());
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError("traffic sidecar " + sidecar_path->string() + ": " + e.what());
        }
        const std::string where = "traffic sidecar";
        if (!doc.is_object())
            throw ValidationError(where + ": expected a JSON object");
        if (doc.contains("default_class"))
            std::ranges::fill(classes, class_from_json(doc["default_class"], where + " default_class"));
        if (doc.contains("classes")) {
            const auto& grid = doc["classes"];
            if (!grid.is_array() || grid.size() != n)
                throw ValidationError(where + ": 'classes' must be an N x N array");
            for (size_t s = 0; s < n; ++s) {
                if (!grid[s].is_array() || grid[s].size() != n)
                    throw ValidationError(where + ": 'classes' row " + std::to_string(s) + " has the wrong size");
                for (size_t d = 0; d < n; ++d) {
                    if (s == d || (grid[s][d].is_string() && grid[s][d].get<std::string>().empty()))
                        continue;
                    classes[s * n + d] = class_from_json(
                        grid[s][d], where + " classes[" + std::to_string(s) + "][" + std::to_string(d) + "]");
                }
            }
        }
        if (doc.contains("models")) {
            const auto& m = doc["models"];
            if (m.contains("audio-unitary"))
                read_onoff(m["audio-unitary"], models.audio_unitary, where + " audio-unitary");
            if (m.contains("audio-aggregated")) {
                read_onoff(m["audio-aggregated"], models.audio_aggregated.per_source, where + " audio-aggregated");
                read_if_present(m["audio-aggregated"], "n_sources", models.audio_aggregated.n_sources,
                                where + " audio-aggregated");
            }
            if (m.contains("video")) {
                const auto& v = m["video"];
                read_if_present(v, "lambda_per_s", models.video.lambda_per_s, where + " video");
                read_if_present(v, "pareto_alpha", models.video.pareto_alpha, where + " video");
                read_if_present(v, "pareto_xmin_s", models.video.pareto_xmin_s, where + " video");
                read_if_present(v, "unit_gbps", models.video.unit_gbps, where + " video");
            }
        }
    }
    try {
        validate(models.audio_unitary);
        validate(models.audio_aggregated);
        validate(models.video);
    } catch (const std::invalid_argument& e) {
        throw ValidationError(std::string("traffic models: ") + e.what());
    }
    return {TrafficMatrix(static_cast<int>(n), std::move(demand), std::move(classes)), models};
}

nlohmann::json to_json(const TrafficModels& models)
{
    const auto onoff = [](const OnOffParams& p) {
        return nlohmann::json{{"peak_gbps", p.peak_gbps}, {"mean_on_s", p.mean_on_s}, {"mean_off_s", p.mean_off_s}};
    };
    auto aggregated = onoff(models.audio_aggregated.per_source);
    aggregated["n_sources"] = models.audio_aggregated.n_sources;
    return {{"audio-unitary", onoff(models.audio_unitary)},
            {"audio-aggregated", aggregated},
            {"video",
             {{"lambda_per_s", models.video.lambda_per_s},
              {"pareto_alpha", models.video.pareto_alpha},
              {"pareto_xmin_s", models.video.pareto_xmin_s},
              {"unit_gbps", models.video.unit_gbps}}}};
}

std::vector<FlowArrival> spawn_flows(const TrafficMatrix& matrix, const TrafficModels& models,
                                     const std::vector<int>& timezone_offsets_h, int hour, Rng& rng,
                                     const SessionOptions& options)
{
    if (hour < 0)
        throw std::invalid_argument("spawn_flows: negative hour");
    if (!(options.mean_holding_s > 0.0))
        throw std::invalid_argument("spawn_flows: mean holding time must be positive");
    if (static_cast<int>(timezone_offsets_h.size()) != matrix.num_nodes())
        throw std::invalid_argument("spawn_flows: one timezone per node required");

    const double begin = 3600.0 * hour;
    const double end = begin + 3600.0;
    std::vector<FlowArrival> arrivals;
    for (NodeId s = 0; s < matrix.num_nodes(); ++s) {
        const double factor = hourly_factor(hour % 24, timezone_offsets_h[static_cast<size_t>(s)], options.hourly_floor);
        for (NodeId d = 0; d < matrix.num_nodes(); ++d) {
            const double demand = matrix.demand(s, d);
            if (s == d || demand <= 0.0)
                continue;
            const TrafficClass cls = matrix.traffic_class(s, d);
            const double rate = models.mean_rate(cls);
            // Little's law: concurrent sessions = arrival rate * mean holding.
            const double arrival_rate = factor * demand / rate / options.mean_holding_s;
            if (!(arrival_rate > 0.0))
                continue;
            for (double t = begin + rng.exponential(1.0 / arrival_rate); t < end;
                 t += rng.exponential(1.0 / arrival_rate)) {
                arrivals.push_back({t, s, d, rate, cls, rng.exponential(options.mean_holding_s)});
            }
        }
    }
    std::ranges::stable_sort(arrivals, {}, &FlowArrival::time_s);
    return arrivals;
}

} // namespace wdm
