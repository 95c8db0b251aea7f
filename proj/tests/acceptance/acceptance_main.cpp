// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "wdm/cli.hpp"
#include "wdm/error.hpp"
#include "wdm/reports.hpp"
#include "wdm/simulation.hpp"
#include "wdm/traffic.hpp"

using namespace wdm;
namespace fs = std::filesystem;

namespace {

const std::string kData = WDM_DATA_DIR;

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void fail(const std::string& why)
    {
        if (pass)
            detail.str("");
        pass = false;
        detail << why;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct MeanSe {
    double mean;
    double se;
};

MeanSe mean_se(const std::vector<double>& xs)
{
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs)
        ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1) / n)};
}

Flow make_flow(FlowId id, NodeId s, NodeId d, double rate)
{
    Flow f;
    f.id = id;
    f.src = s;
    f.dst = d;
    f.reserved_gbps = rate;
    return f;
}

std::shared_ptr<const PhysicalTopology> bundled(const std::string& name)
{
    return std::make_shared<const PhysicalTopology>(load_topology_file(kData + "/" + name));
}

TrafficSpec bundled_traffic(const std::string& name)
{
    const fs::path csv = kData + "/" + name;
    return load_traffic(csv, default_sidecar_path(csv));
}

void ksp_oracle(Verdict& v)
{
    const auto start = Clock::now();
    std::mt19937_64 gen(2024);
    long long queries = 0;
    for (int g = 0; g < 200 && v.pass; ++g) {
        const int n = 2 + static_cast<int>(gen() % 7);
        const int m = 1 + static_cast<int>(gen() % 20);
        auto topo = oracle::random_digraph(gen, n, m);
        const int k = 1 + static_cast<int>(gen() % 5);
        for (int s = 0; s < n && v.pass; ++s)
            for (int d = 0; d < n; ++d) {
                if (s == d)
                    continue;
                ++queries;
                const auto got = k_shortest_paths(*topo, s, d, k);
                std::vector<std::vector<LinkId>> links;
                for (const auto& r : got)
                    links.push_back(r.links);
                if (links != oracle::ksp(*topo, s, d, k)) {
                    v.fail("graph " + std::to_string(g) + " pair " + std::to_string(s) + "->" + std::to_string(d));
                    break;
                }
            }
    }
    const double t = seconds_since(start);
    if (v.pass && t >= 10.0)
        v.fail("took " + std::to_string(t) + " s");
    if (v.pass)
        v.detail << "200 graphs, " << queries << " queries, exact match, " << t << " s";
}

void first_fit_oracle(Verdict& v)
{
    std::mt19937_64 gen(77);
    for (int i = 0; i < 500; ++i) {
        const int links = 1 + static_cast<int>(gen() % 8);
        std::vector<int> w;
        for (int l = 0; l < links; ++l)
            w.push_back(1 + static_cast<int>(gen() % 8));
        WavelengthOccupancy occ(w);
        const unsigned density = 1 + static_cast<unsigned>(gen() % 4);
        for (int l = 0; l < links; ++l)
            for (int c = 0; c < w[static_cast<size_t>(l)]; ++c)
                if (gen() % 5 < density)
                    occ.occupy(l, c, static_cast<int>(gen() % 50));
        std::vector<LinkId> route;
        for (int l = 0; l < links; ++l)
            if (gen() % 2 == 0)
                route.push_back(l);
        if (route.empty())
            route.push_back(static_cast<int>(gen() % static_cast<unsigned>(links)));
        if (first_fit_wavelength(occ, route) != oracle::first_fit(occ, route)) {
            v.fail("state " + std::to_string(i));
            return;
        }
    }
    v.detail << "500 states, exact match";
}

void cspf_oracle(Verdict& v)
{
    std::mt19937_64 gen(4242);
    long long queries = 0, feasible = 0;
    for (int g = 0; g < 200; ++g) {
        const int n = 3 + static_cast<int>(gen() % 6);
        auto topo = oracle::random_digraph(gen, n, 2 * n + static_cast<int>(gen() % 8), 8, 8);
        VirtualTopology vt(topo);
        const int wanted = 1 + static_cast<int>(gen() % 8);
        FlowId next = 0;
        for (int tries = 0; tries < 60 && static_cast<int>(vt.lightpaths().size()) < wanted; ++tries) {
            const int s = static_cast<int>(gen() % static_cast<unsigned>(n));
            const int d = static_cast<int>(gen() % static_cast<unsigned>(n));
            if (s == d || !vt.transmitter_available(s) || !vt.receiver_available(d))
                continue;
            const auto routes = k_shortest_paths(*topo, s, d, 3);
            if (routes.empty())
                continue;
            const auto& route = routes[gen() % routes.size()];
            const auto w = first_fit_wavelength(vt.occupancy(), route.links);
            if (!w)
                continue;
            const auto id = vt.add_lightpath(s, d, route.links, *w);
            if (const double load = 0.5 * static_cast<double>(gen() % 20); load > 0.0)
                vt.attach_flow(id, next++, load);
        }
        for (int s = 0; s < n; ++s)
            for (int d = 0; d < n; ++d) {
                if (s == d)
                    continue;
                const double rate = 0.5 * static_cast<double>(1 + gen() % 16);
                ++queries;
                const auto got = cspf_virtual_route(vt, s, d, rate);
                const auto want = oracle::cspf(vt, s, d, rate);
                if (got.has_value() != want.has_value() || (got && got->lightpath_ids != *want)) {
                    v.fail("topology " + std::to_string(g) + " pair " + std::to_string(s) + "->" + std::to_string(d));
                    return;
                }
                feasible += got.has_value();
            }
    }
    v.detail << "200 virtual topologies, " << queries << " queries (" << feasible << " feasible), exact match";
}

void fda_properties(Verdict& v)
{
    // Symmetric pair: two flows of 4 stacked on one of two parallel lightpaths.
    {
        auto topo = oracle::make_topology({{0, 0}, {100, 0}}, {{0, 1}}, 2, 2, 2);
        NetworkState state(topo);
        auto& vt = state.virtual_topology();
        const auto a = vt.add_lightpath(0, 1, {0}, 0);
        const auto b = vt.add_lightpath(0, 1, {0}, 1);
        state.install_flow(make_flow(1, 0, 1, 4.0), make_virtual_route(vt, {a}));
        state.install_flow(make_flow(2, 0, 1, 4.0), make_virtual_route(vt, {a}));
        const auto report = fda_reroute(state);
        if (!(report.delay_after_s < report.delay_before_s))
            return v.fail("parallel instance: T did not decrease");
        if (vt.lightpath(a).flows.size() != 1 || vt.lightpath(b).flows.size() != 1)
            return v.fail("parallel instance: assignment not balanced");
        v.detail << "parallel: T " << report.delay_before_s << " -> " << report.delay_after_s << "; ";
    }

    std::mt19937_64 gen(31337);
    int instances = 0, moved = 0;
    while (instances < 100) {
        auto state = oracle::random_small_state(gen);
        if (state.flows().empty())
            continue;
        ++instances;
        const auto report = fda_reroute(state, kDefaultFdaTolerance, 100);
        moved += report.moves > 0;
        double previous = report.delay_before_s;
        for (double t : report.delay_per_pass_s) {
            if (t > previous)
                return v.fail("instance " + std::to_string(instances) + ": T increased across a pass");
            previous = t;
        }
        if (!state.audit_full().empty())
            return v.fail("instance " + std::to_string(instances) + ": audit failed");
        const double t = oracle::average_delay(state);
        const double best = oracle::best_single_move(state);
        const bool certified =
            std::isinf(t) ? std::isinf(best) : best >= t * (1 - kDefaultFdaTolerance) - 1e-12;
        if (!certified)
            return v.fail("instance " + std::to_string(instances) + ": improving single-flow move remains");
    }
    v.detail << instances << " random instances (" << moved << " with moves) certified locally optimal; ";

    // Marginal length against central differences of gamma*T: a probe flow of
    // rate x rides one lightpath and x is perturbed by +-h.
    double worst = 0.0;
    int checks = 0;
    std::mt19937_64 gen2(99);
    while (checks < 100) {
        auto state = oracle::random_small_state(gen2);
        auto& vt = state.virtual_topology();
        for (const auto& [id, lp] : vt.lightpaths()) {
            const double x = 0.25, h = 1e-4;
            if (lp.residual_gbps() < x + 1.0)
                continue;
            const auto gamma_t = [&, lid = id](double rate) {
                NetworkState probe = state;
                probe.install_flow(make_flow(1000, lp.src, lp.dst, rate),
                                   make_virtual_route(probe.virtual_topology(), {lid}));
                return average_packet_delay(probe) * probe.offered_gbps();
            };
            const double fd = (gamma_t(x + h) - gamma_t(x - h)) / (2 * h);
            const double m = marginal_delay_length(lp.capacity_gbps, lp.carried_gbps + x, lp.propagation_delay_s);
            worst = std::max(worst, std::abs(fd - m) / m);
            ++checks;
        }
    }
    if (worst > 1e-6)
        return v.fail("marginal length off by " + std::to_string(worst) + " relative");
    v.detail << "marginal vs finite differences: " << checks << " checks, worst rel err " << worst;
}

void traffic_moments(Verdict& v)
{
    const auto start = Clock::now();
    constexpr double kHorizon = 1e5;
    const auto check = [&](const std::string& name, double analytic, int reps,
                           const std::function<double(Rng&)>& sample) {
        std::vector<double> avgs;
        for (int r = 0; r < reps; ++r) {
            Rng rng(8086, static_cast<std::uint64_t>(r));
            avgs.push_back(sample(rng));
        }
        const auto s = mean_se(avgs);
        const double z = (s.mean - analytic) / s.se;
        v.detail << name << " " << s.mean << " vs " << analytic << " (z=" << z << "); ";
        if (std::abs(z) > 3.0)
            v.fail(name + ": empirical mean " + std::to_string(s.mean) + " outside 3 SE of " + std::to_string(analytic));
        return std::abs(z) <= 3.0;
    };
    const OnOffParams onoff;
    const MmppParams mmpp;
    const MgInfParams mginf;
    check("on-off", onoff.on_probability() * onoff.peak_gbps, 20,
          [&](Rng& rng) { return sample_onoff_path(onoff, rng, kHorizon).time_average(); }) &&
        check("MMPP-24", mmpp.n_sources * mmpp.per_source.on_probability() * mmpp.per_source.peak_gbps, 20,
              [&](Rng& rng) { return sample_mmpp_path(mmpp, rng, kHorizon).time_average(); }) &&
        check("M/G/inf", mginf.lambda_per_s * mginf.pareto_alpha * mginf.pareto_xmin_s / (mginf.pareto_alpha - 1) *
                             mginf.unit_gbps,
              20, [&](Rng& rng) { return sample_mginf_path(mginf, rng, kHorizon).time_average(); });
    const double t = seconds_since(start);
    if (v.pass && t >= 30.0)
        v.fail("took " + std::to_string(t) + " s");
    if (v.pass)
        v.detail << t << " s";
}

void invariant_soak(Verdict& v)
{
    for (const auto& [topo_name, traffic_name] :
         {std::pair{"topology1.json", "traffic1.csv"}, std::pair{"topology2.json", "traffic2.csv"}}) {
        SimulationOptions options;
        options.hours = 24;
        options.seed = 7;
        options.trace = false;
        options.full_audit_every = 10000;
        const auto start = Clock::now();
        SimulationResult result = [&] {
            try {
                return run_simulation(bundled(topo_name), bundled_traffic(traffic_name), options);
            } catch (const AuditError& e) {
                v.fail(std::string(topo_name) + ": " + e.what());
                throw;
            }
        }();
        const double t = seconds_since(start);
        const std::string tag = topo_name;
        if (result.events_processed < 100000)
            return v.fail(tag + ": only " + std::to_string(result.events_processed) + " events");
        if (result.audits.violations != 0 || result.audits.fast < result.events_processed ||
            result.audits.full < result.events_processed / options.full_audit_every)
            return v.fail(tag + ": audit counts off");
        for (const auto& s : result.hourly) {
            if (s.blocking_ratio < 0.0 || s.blocking_ratio > 1.0)
                return v.fail(tag + ": blocking ratio out of range");
            if (s.offered_flows != s.admitted_flows + s.blocked_flows)
                return v.fail(tag + ": hour " + std::to_string(s.hour) + " offered != admitted + blocked");
        }
        if (t >= 60.0)
            return v.fail(tag + ": took " + std::to_string(t) + " s");
        v.detail << tag << ": " << result.events_processed << " events, " << result.audits.fast << " fast + "
                 << result.audits.full << " full audits, 0 violations, blocking "
                 << static_cast<double>(result.blocked_flows) / static_cast<double>(result.offered_flows) << ", "
                 << t << " s; ";
    }
}

void determinism(Verdict& v)
{
    const auto root = fs::temp_directory_path() / "wdm_acceptance_determinism";
    fs::remove_all(root);
    for (const char* sub : {"a", "b"}) {
        std::ostringstream out, err;
        const int code = run_cli({"run", "--config", kData + "/run1.json", "--out", (root / sub).string()}, out, err);
        if (code != kExitOk)
            return v.fail(std::string("run ") + sub + " exited " + std::to_string(code) + ": " + err.str());
    }
    for (const char* name : {"virtual_topology.json", "routing_table.csv", "hourly_metrics.csv"}) {
        const auto a = read_file(root / "a" / name);
        if (a.empty() || a != read_file(root / "b" / name))
            return v.fail(std::string(name) + " differs");
        v.detail << name << " " << a.size() << " bytes identical; ";
    }
    fs::remove_all(root);
}

void cascade(Verdict& v)
{
    // 0 -> 1 -> 2 plus direct 0 -> 2, with reverse fibers.
    const auto triangle = [](int W, int tx0, int rx2) {
        std::vector<Node> nodes(3);
        const double xs[] = {0, 100, 200}, ys[] = {0, 80, 0};
        for (int i = 0; i < 3; ++i) {
            nodes[static_cast<size_t>(i)].id = i;
            nodes[static_cast<size_t>(i)].x_km = xs[i];
            nodes[static_cast<size_t>(i)].y_km = ys[i];
        }
        const std::pair<int, int> ends[] = {{0, 1}, {1, 2}, {0, 2}, {1, 0}, {2, 1}, {2, 0}};
        std::vector<FiberLink> links;
        for (int i = 0; i < 6; ++i) {
            FiberLink l;
            l.id = i;
            l.src = ends[i].first;
            l.dst = ends[i].second;
            l.num_wavelengths = W;
            links.push_back(l);
        }
        return std::make_shared<const PhysicalTopology>(
            PhysicalTopology::build(nodes, links, {tx0, 2, 2}, {2, 2, rx2}));
    };
    using S = AdmissionStage;
    struct Case {
        std::string name;
        std::function<NetworkState()> setup;
        AdmissionDecision want;
        std::vector<S> stages;
    };
    const std::vector<Case> cases{
        {"RoutedExisting",
         [&] {
             NetworkState s(triangle(2, 2, 2));
             s.virtual_topology().add_lightpath(0, 2, {2}, 0);
             return s;
         },
         AdmissionDecision::RoutedExisting, {S::ExistingRoute}},
        {"RoutedNewDirect", [&] { return NetworkState(triangle(2, 2, 2)); }, AdmissionDecision::RoutedNewDirect,
         {S::ExistingRoute, S::DirectLightpath}},
        {"ViaSourceAdjacent",
         [&] {
             NetworkState s(triangle(2, 1, 2));
             s.virtual_topology().add_lightpath(0, 1, {0}, 0);
             return s;
         },
         AdmissionDecision::RoutedViaSourceAdjacent, {S::ExistingRoute, S::DirectLightpath, S::SourceAdjacent}},
        {"ViaDestinationAdjacent",
         [&] {
             NetworkState s(triangle(2, 2, 1));
             s.virtual_topology().add_lightpath(1, 2, {1}, 0);
             return s;
         },
         AdmissionDecision::RoutedViaDestinationAdjacent,
         {S::ExistingRoute, S::DirectLightpath, S::SourceAdjacent, S::DestinationAdjacent}},
        {"Blocked",
         [&] {
             // Every fiber out of 0 has its single wavelength taken by a full lightpath.
             NetworkState s(triangle(1, 2, 2));
             auto& vt = s.virtual_topology();
             const auto a = vt.add_lightpath(0, 2, {2}, 0);
             const auto b = vt.add_lightpath(0, 1, {0}, 0);
             s.install_flow(make_flow(100, 0, 2, 10.0), make_virtual_route(vt, {a}));
             s.install_flow(make_flow(101, 0, 1, 10.0), make_virtual_route(vt, {b}));
             return s;
         },
         AdmissionDecision::Blocked,
         {S::ExistingRoute, S::DirectLightpath, S::SourceAdjacent, S::DestinationAdjacent}},
    };
    for (const auto& c : cases) {
        NetworkState state = c.setup();
        const NetworkState before = state;
        const auto out = admit_flow(state, make_flow(1, 0, 2, 3.0));
        std::string trace;
        for (auto s : out.stages_tried)
            trace += std::to_string(static_cast<int>(s));
        if (out.decision != c.want || out.stages_tried != c.stages)
            return v.fail(c.name + ": got " + std::string(to_string(out.decision)) + " after stages " + trace);
        if (!state.audit_full().empty())
            return v.fail(c.name + ": audit failed");
        if (c.want == AdmissionDecision::Blocked && !(state == before))
            return v.fail(c.name + ": blocked admission changed the state");
        v.detail << c.name << " [" << trace << "] ";
    }
}

void no_contention(Verdict& v)
{
    auto doc = nlohmann::json::parse(read_file(kData + "/topology1.json"));
    for (auto& link : doc["links"])
        link["num_wavelengths"] = 512;
    for (const char* key : {"max_transmitters", "max_receivers"})
        for (auto& x : doc[key])
            x = 512;
    auto topo = std::make_shared<const PhysicalTopology>(load_topology(doc));
    SimulationOptions options;
    options.hours = 24;
    options.seed = 3;
    options.trace = false;
    const auto result = run_simulation(topo, bundled_traffic("traffic1.csv"), options);
    for (const auto& s : result.hourly)
        if (s.blocking_ratio != 0.0)
            return v.fail("hour " + std::to_string(s.hour) + " blocking " + std::to_string(s.blocking_ratio));
    v.detail << "24 hours, " << result.offered_flows << " flows offered, blocking_ratio 0 in every hour";
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, void (*)(Verdict&)>> criteria{
        {"oracle equivalence: k-shortest paths", ksp_oracle},
        {"oracle equivalence: first-fit wavelength", first_fit_oracle},
        {"oracle equivalence: CSPF", cspf_oracle},
        {"flow deviation properties", fda_properties},
        {"traffic-model moments", traffic_moments},
        {"invariant soak", invariant_soak},
        {"determinism", determinism},
        {"cascade correctness", cascade},
        {"no-contention sanity", no_contention},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Verdict v;
        try {
            run(v);
        } catch (const std::exception& e) {
            v.fail(std::string("exception: ") + e.what());
        }
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail.str() << std::endl;
        failed += !v.pass;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
