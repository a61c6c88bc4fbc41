// SPDX-License-Identifier: Apache-2.0
#include "mapio/map_model.hpp"
#include "mapio/pointer.hpp"
#include "mapio/prompt.hpp"
#include "mapio/spatial.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace mapio;

namespace {

const MapModel& midtown()
{
    static const MapModel m = load_map_file(std::string(MAPIO_FIXTURES_DIR) + "/midtown.json");
    return m;
}

void BM_ShortestRoute(benchmark::State& state)
{
    const auto& m = midtown();
    for (auto _ : state)
        benchmark::DoNotOptimize(spatial::shortest_route(Point2D{200, 340}, spatial::PoiRef{"p-esb"}, m));
}
BENCHMARK(BM_ShortestRoute);

void BM_ClosestEdge(benchmark::State& state)
{
    const auto& m = midtown();
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> ux(0, 500), uy(0, 380);
    for (auto _ : state)
        benchmark::DoNotOptimize(spatial::closest_edge({ux(rng), uy(rng)}, m));
}
BENCHMARK(BM_ClosestEdge);

void BM_Snap(benchmark::State& state)
{
    const auto& m = midtown();
    pointer::SnapState s;
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> ux(0, 500), uy(0, 380);
    for (auto _ : state)
        benchmark::DoNotOptimize(pointer::snap({ux(rng), uy(rng)}, m, s));
}
BENCHMARK(BM_Snap);

void BM_TrackerFrame(benchmark::State& state)
{
    auto m = std::make_shared<const MapModel>(midtown());
    pointer::PointerTracker t(m);
    long now = 0;
    for (auto _ : state)
    {
        const pointer::HandFrame f{pointer::Hand::Right, {200.0 + (now % 50), 340}, true};
        benchmark::DoNotOptimize(t.ingest(Millis(++now), std::span(&f, 1)));
    }
}
BENCHMARK(BM_TrackerFrame);

void BM_EstimateHomography(benchmark::State& state)
{
    std::vector<pointer::Correspondence> pairs;
    for (int i = 0; i < 8; ++i)
    {
        const Point2D p{40.0 * i + 3, 25.0 * (i % 3) + 7 * i};
        pairs.push_back({p, {0.5 * p.x - 45, 0.5 * p.y + 145}});
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(pointer::estimate_homography(pairs));
}
BENCHMARK(BM_EstimateHomography);

void BM_SystemInstructions(benchmark::State& state)
{
    const auto& m = midtown();
    for (auto _ : state)
        benchmark::DoNotOptimize(prompt::build_system_instructions(m, 8));
}
BENCHMARK(BM_SystemInstructions);

void BM_MapRoundTrip(benchmark::State& state)
{
    const auto text = serialize_map_document(midtown());
    for (auto _ : state)
        benchmark::DoNotOptimize(load_map(std::string_view(text)));
}
BENCHMARK(BM_MapRoundTrip);

} // namespace
