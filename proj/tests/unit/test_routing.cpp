#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "wdm/routing.hpp"

using namespace wdm;

namespace {

std::vector<std::vector<LinkId>> links_of(const std::vector<PhysicalRoute>& routes)
{
    std::vector<std::vector<LinkId>> out;
    for (const auto& r : routes)
        out.push_back(r.links);
    return out;
}

} // namespace

TEST(Ksp, Triangle)
{
    // A=0, B=1, C=2; links A->B, B->C, A->C.
    auto topo = oracle::make_topology({{0, 0}, {1, 1}, {2, 0}}, {{0, 1}, {1, 2}, {0, 2}}, 1, 1, 1);
    const auto routes = k_shortest_paths(*topo, 0, 2, 2);
    ASSERT_EQ(routes.size(), 2u);
    EXPECT_EQ(routes[0].links, (std::vector<LinkId>{2}));
    EXPECT_EQ(routes[0].hop_count, 1);
    EXPECT_EQ(routes[1].links, (std::vector<LinkId>{0, 1}));
    EXPECT_EQ(routes[1].hop_count, 2);
}

TEST(Ksp, DisconnectedPairIsEmpty)
{
    auto topo = oracle::make_topology({{0, 0}, {1, 0}, {2, 0}}, {{0, 1}}, 1, 1, 1);
    EXPECT_TRUE(k_shortest_paths(*topo, 0, 2, 3).empty());
    EXPECT_TRUE(k_shortest_paths(*topo, 1, 0, 3).empty());
}

TEST(Ksp, RejectsBadArguments)
{
    auto topo = oracle::make_topology({{0, 0}, {1, 0}}, {{0, 1}}, 1, 1, 1);
    EXPECT_THROW(k_shortest_paths(*topo, 0, 0, 1), std::invalid_argument);
    EXPECT_THROW(k_shortest_paths(*topo, 0, 1, 0), std::invalid_argument);
    EXPECT_THROW(k_shortest_paths(*topo, 0, 5, 1), std::invalid_argument);
}

TEST(Ksp, FewerThanKRoutesAvailable)
{
    auto topo = oracle::make_topology({{0, 0}, {1, 1}, {2, 0}}, {{0, 1}, {1, 2}, {0, 2}}, 1, 1, 1);
    EXPECT_EQ(k_shortest_paths(*topo, 0, 2, 5).size(), 2u);
}

TEST(Ksp, ParallelFibersTieOnLinkIds)
{
    auto topo = oracle::make_topology({{0, 0}, {10, 0}}, {{0, 1}, {0, 1}, {0, 1}}, 1, 1, 1);
    const auto routes = k_shortest_paths(*topo, 0, 1, 3);
    EXPECT_EQ(links_of(routes), (std::vector<std::vector<LinkId>>{{0}, {1}, {2}}));
}

TEST(Ksp, MatchesBruteForceOnRandomDigraphs)
{
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3 + static_cast<int>(gen() % 6);
        const int m = n + static_cast<int>(gen() % 12);
        auto topo = oracle::random_digraph(gen, n, m);
        const int k = 1 + static_cast<int>(gen() % 5);
        for (int s = 0; s < n; ++s)
            for (int d = 0; d < n; ++d) {
                if (s == d)
                    continue;
                const auto got = k_shortest_paths(*topo, s, d, k);
                ASSERT_EQ(links_of(got), oracle::ksp(*topo, s, d, k)) << "trial " << trial << " " << s << "->" << d;
                for (const auto& r : got) {
                    EXPECT_TRUE(route_is_contiguous(*topo, r.links, s, d));
                    EXPECT_EQ(r.hop_count, static_cast<int>(r.links.size()));
                }
            }
    }
}

TEST(FirstFit, Examples)
{
    WavelengthOccupancy free_net(std::vector<int>{4, 4});
    EXPECT_EQ(first_fit_wavelength(free_net, std::vector<LinkId>{0, 1}), 0);

    WavelengthOccupancy second_busy(std::vector<int>{2, 2});
    second_busy.occupy(1, 0, 3);
    EXPECT_EQ(first_fit_wavelength(second_busy, std::vector<LinkId>{0, 1}), 1);

    WavelengthOccupancy exhausted(std::vector<int>{4, 1});
    exhausted.occupy(1, 0, 0);
    EXPECT_EQ(first_fit_wavelength(exhausted, std::vector<LinkId>{0, 1}), std::nullopt);

    // Only indices present on every fiber count.
    WavelengthOccupancy uneven(std::vector<int>{3, 1});
    uneven.occupy(0, 0, 0);
    EXPECT_EQ(first_fit_wavelength(uneven, std::vector<LinkId>{0, 1}), std::nullopt);
}

TEST(FirstFit, MatchesExhaustiveSearch)
{
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int links = 1 + static_cast<int>(gen() % 6);
        std::vector<int> w;
        for (int i = 0; i < links; ++i)
            w.push_back(1 + static_cast<int>(gen() % 5));
        WavelengthOccupancy occ(w);
        for (int i = 0; i < links; ++i)
            for (int c = 0; c < w[static_cast<size_t>(i)]; ++c)
                if (gen() % 3 == 0)
                    occ.occupy(i, c, static_cast<int>(gen() % 9));
        std::vector<LinkId> route;
        for (int i = 0; i < links; ++i)
            if (gen() % 2 == 0)
                route.push_back(i);
        if (route.empty())
            route.push_back(0);
        EXPECT_EQ(first_fit_wavelength(occ, route), oracle::first_fit(occ, route));
    }
}

TEST(Cspf, ResidualPruning)
{
    auto topo = oracle::make_topology({{0, 0}, {100, 0}}, {{0, 1}}, 1, 1, 1);
    VirtualTopology vt(topo);
    const auto lp = vt.add_lightpath(0, 1, {0}, 0);
    vt.attach_flow(lp, 1, 5.0);
    const auto ok = cspf_virtual_route(vt, 0, 1, 3.0);
    ASSERT_TRUE(ok);
    EXPECT_EQ(ok->virtual_hops, 1);
    EXPECT_EQ(ok->lightpath_ids, (std::vector<LightpathId>{lp}));
    EXPECT_DOUBLE_EQ(ok->delay_s, propagation_delay_s(100.0));
    EXPECT_FALSE(cspf_virtual_route(vt, 0, 1, 6.0));
    // Residual exactly equal to the rate is feasible.
    EXPECT_TRUE(cspf_virtual_route(vt, 0, 1, 5.0));
    EXPECT_FALSE(cspf_virtual_route(vt, 1, 0, 1.0));
}

TEST(Cspf, PrefersFewerHopsOverDelay)
{
    // 0 -> 2 direct over a long detour fiber vs two short lightpaths via 1.
    auto topo = oracle::make_topology({{0, 0}, {50, 0}, {100, 0}, {50, 500}},
                                      {{0, 1}, {1, 2}, {0, 3}, {3, 2}}, 1, 2, 2);
    VirtualTopology vt(topo);
    const auto a = vt.add_lightpath(0, 1, {0}, 0);
    const auto b = vt.add_lightpath(1, 2, {1}, 0);
    const auto direct = vt.add_lightpath(0, 2, {2, 3}, 0);
    const auto r = cspf_virtual_route(vt, 0, 2, 1.0);
    ASSERT_TRUE(r);
    EXPECT_EQ(r->lightpath_ids, (std::vector<LightpathId>{direct}));
    vt.attach_flow(direct, 1, 9.5);
    const auto two = cspf_virtual_route(vt, 0, 2, 1.0);
    ASSERT_TRUE(two);
    EXPECT_EQ(two->lightpath_ids, (std::vector<LightpathId>{a, b}));
}

TEST(Cspf, MatchesBruteForceOnRandomVirtualTopologies)
{
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 80; ++trial) {
        const int n = 3 + static_cast<int>(gen() % 4);
        auto topo = oracle::random_digraph(gen, n, 2 * n + static_cast<int>(gen() % 6), 8, 8);
        VirtualTopology vt(topo);
        const int wanted = 1 + static_cast<int>(gen() % 8);
        for (int tries = 0; tries < 40 && static_cast<int>(vt.lightpaths().size()) < wanted; ++tries) {
            const int s = static_cast<int>(gen() % static_cast<unsigned>(n));
            const int d = static_cast<int>(gen() % static_cast<unsigned>(n));
            if (s == d)
                continue;
            auto routes = k_shortest_paths(*topo, s, d, 3);
            if (routes.empty())
                continue;
            const auto& route = routes[gen() % routes.size()];
            auto w = first_fit_wavelength(vt.occupancy(), route.links);
            if (!w || !vt.transmitter_available(s) || !vt.receiver_available(d))
                continue;
            const auto id = vt.add_lightpath(s, d, route.links, *w);
            if (const double load = 0.5 * static_cast<double>(gen() % 20); load > 0.0)
                vt.attach_flow(id, trial * 100 + tries, load);
        }
        for (int s = 0; s < n; ++s)
            for (int d = 0; d < n; ++d) {
                if (s == d)
                    continue;
                const double rate = 0.5 * static_cast<double>(1 + gen() % 16);
                const auto got = cspf_virtual_route(vt, s, d, rate);
                const auto want = oracle::cspf(vt, s, d, rate);
                ASSERT_EQ(got.has_value(), want.has_value()) << "trial " << trial;
                if (got)
                    EXPECT_EQ(got->lightpath_ids, *want) << "trial " << trial;
            }
    }
}
