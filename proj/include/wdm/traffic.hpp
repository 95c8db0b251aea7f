#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <vector>

#include <json.hpp>

#include "wdm/flow.hpp"
#include "wdm/topology.hpp"

namespace wdm {

/// Seeded random stream. Identical (seed, stream) pairs replay bit-identically
/// on any platform: the engine is mt19937_64 seeded through std::seed_seq and
/// all variates are drawn by inverse transform from 53-bit uniforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform on [0, 1).
    double uniform01();
    double exponential(double mean);
    /// Pareto with shape alpha and scale x_min (support [x_min, inf)).
    double pareto(double alpha, double x_min);
    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

struct OnOffParams {
    double peak_gbps = 0.064;
    double mean_on_s = 0.352;
    double mean_off_s = 0.650;

    double on_probability() const { return mean_on_s / (mean_on_s + mean_off_s); }
};

struct MmppParams {
    int n_sources = 24;
    OnOffParams per_source;
};

struct MgInfParams {
    double lambda_per_s = 1.0;
    double pareto_alpha = 1.5;
    double pareto_xmin_s = 1.0;
    double unit_gbps = 0.1;

    double mean_service_s() const { return pareto_alpha * pareto_xmin_s / (pareto_alpha - 1.0); }
};

/// Throws std::invalid_argument when a parameter is out of its domain.
void validate(const OnOffParams& p);
void validate(const MmppParams& p);
void validate(const MgInfParams& p);

double onoff_mean_rate(const OnOffParams& p);
double mmpp_mean_rate(const MmppParams& p);
double mginf_mean_rate(const MgInfParams& p);

struct RateSegment {
    double start_s = 0.0;
    double rate_gbps = 0.0;

    bool operator==(const RateSegment&) const = default;
};

/// Piecewise-constant rate over [0, horizon_s). Segment i holds from its start
/// until the next segment's start (or the horizon).
struct RateTrace {
    double horizon_s = 0.0;
    std::vector<RateSegment> segments;

    double rate_at(double t_s) const;
    double time_average() const;
    double segment_end(size_t i) const;

    bool operator==(const RateTrace&) const = default;
};

/// Alternating exponential on/off periods; the initial state is drawn with the
/// stationary on-probability.
RateTrace sample_onoff_path(const OnOffParams& p, Rng& rng, double horizon_s);

/// Superposition of N on-off sources. Draw order: for each source in index
/// order its initial state then its first period; afterwards one period per
/// transition, in time order (ties by source index). With N = 1 this is the
/// same draw sequence as sample_onoff_path, so equal seeds give equal traces.
RateTrace sample_mmpp_path(const MmppParams& p, Rng& rng, double horizon_s);

/// Busy-server count of an M/G/inf queue with Pareto service times, times
/// unit_gbps. The queue starts empty 10*E[S] before the returned window.
RateTrace sample_mginf_path(const MgInfParams& p, Rng& rng, double horizon_s);

inline constexpr double kDefaultHourlyFloor = 0.1;

/// Diurnal activity multiplier in [floor, 1]: peak at 14:00 local time,
/// trough (floor) at 02:00.
double hourly_factor(int hour_utc, int tz_offset_h, double floor = kDefaultHourlyFloor);

/// Per-class source models used for session rates.
struct TrafficModels {
    OnOffParams audio_unitary;
    MmppParams audio_aggregated;
    MgInfParams video;

    double mean_rate(TrafficClass c) const;
};

/// N x N offered load in Gbps with one traffic class per entry.
class TrafficMatrix {
public:
    TrafficMatrix() = default;
    /// Throws ValidationError if the data is not square, has negative or
    /// non-finite entries, or a non-zero diagonal.
    TrafficMatrix(int num_nodes, std::vector<double> demand_gbps, std::vector<TrafficClass> classes);

    static TrafficMatrix zeros(int num_nodes);

    int num_nodes() const { return n_; }
    double demand(NodeId s, NodeId d) const { return demand_[index(s, d)]; }
    TrafficClass traffic_class(NodeId s, NodeId d) const { return classes_[index(s, d)]; }
    double total_demand() const;

private:
    size_t index(NodeId s, NodeId d) const;

    int n_ = 0;
    std::vector<double> demand_;
    std::vector<TrafficClass> classes_;
};

struct TrafficSpec {
    TrafficMatrix matrix;
    TrafficModels models;
};

/// Reads the N x N CSV matrix (Gbps) and its JSON sidecar holding per-entry
/// classes and model parameters. Without a sidecar every entry is
/// audio-unitary with default parameters. Throws ValidationError.
TrafficSpec load_traffic(const std::filesystem::path& csv_path,
                         const std::optional<std::filesystem::path>& sidecar_path);

/// Conventional sidecar location: "<csv stem>.models.json" next to the CSV.
std::filesystem::path default_sidecar_path(const std::filesystem::path& csv_path);

nlohmann::json to_json(const TrafficModels& models);

struct FlowArrival {
    double time_s = 0.0;
    NodeId src = 0;
    NodeId dst = 0;
    double reserved_gbps = 0.0;
    TrafficClass model = TrafficClass::AudioUnitary;
    double holding_s = 0.0;

    bool operator==(const FlowArrival&) const = default;
};

struct SessionOptions {
    double mean_holding_s = 300.0;
    double hourly_floor = kDefaultHourlyFloor;
};

/// Poisson session arrivals for hour `hour` (window [3600*hour, 3600*(hour+1))).
/// Each entry's arrival rate makes the expected reserved load equal to
/// hourly_factor(hour mod 24, source timezone) * demand; sessions reserve their
/// class mean rate and hold for an exponential time. Entries are drawn in
/// row-major order from `rng`; the result is sorted by time.
std::vector<FlowArrival> spawn_flows(const TrafficMatrix& matrix, const TrafficModels& models,
                                     const std::vector<int>& timezone_offsets_h, int hour, Rng& rng,
                                     const SessionOptions& options = {});

} // namespace wdm
