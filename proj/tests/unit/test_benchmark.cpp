// SPDX-License-Identifier: Apache-2.0
#include "support.hpp"

#include "mapio/benchmark.hpp"
#include "mapio/error.hpp"

#include <gtest/gtest.h>

using namespace mapio;
using namespace mapio::bench;
using json = nlohmann::json;
using mapio::fx::fixture;

namespace {

std::vector<BenchmarkQuery> parse(const json& doc)
{
    std::istringstream in(doc.dump());
    return load_benchmark(in);
}

std::shared_ptr<const MapModel> midtown()
{
    static auto m = std::make_shared<const MapModel>(load_map_file(fixture("midtown.json")));
    return m;
}

BackendFactory echo()
{
    auto doc = json::parse(fx::read_file(fixture("scripts/echo38.json")));
    return [doc](const BenchmarkQuery& q) {
        auto b = std::make_shared<prompt::ScriptedBackend>(doc);
        b->select_turn(q.id);
        return b;
    };
}

} // namespace

TEST(Benchmark, FixtureShape)
{
    const auto qs = load_benchmark_file(fixture("benchmark38.json"));
    ASSERT_EQ(qs.size(), 38u);
    std::map<QueryClass, int> classes;
    for (const auto& q : qs)
        ++classes[q.query_class];
    EXPECT_EQ(classes[QueryClass::Landmark], 14);
    EXPECT_EQ(classes[QueryClass::Route], 13);
    EXPECT_EQ(classes[QueryClass::Survey], 11);
}

TEST(Benchmark, LoaderValidation)
{
    const json q = {{"id", "a"}, {"prompt", "p"}, {"expected_answer", "e"}, {"class", "route"}};
    EXPECT_EQ(parse(json::array({q})).size(), 1u);
    EXPECT_EQ(parse(json{{"queries", json::array({q})}}).size(), 1u);
    EXPECT_THROW(parse(json::array({q, q})), Error);
    auto empty = q;
    empty["expected_answer"] = "";
    EXPECT_THROW(parse(json::array({empty})), Error);
    auto bad_class = q;
    bad_class["class"] = "vibes";
    EXPECT_THROW(parse(json::array({bad_class})), Error);
    auto with_ctx = q;
    with_ctx["context"] = {{"position", {10, 20}}, {"time", "Friday 18:00"}};
    const auto parsed = parse(json::array({with_ctx}));
    EXPECT_EQ(parsed[0].context.position, (Point2D{10, 20}));
    EXPECT_EQ(parsed[0].context.time, (WallTime{Weekday::Friday, 1080}));
}

TEST(Benchmark, PercentRoundingMatchesDecimalOracle)
{
    // half-up to hundredths, checked against long-double arithmetic away from ties
    for (int n = 1; n <= 60; ++n)
        for (int c = 0; c <= n; ++c)
        {
            const long double exact = 10000.0L * c / n;
            const long double frac = exact - std::floor(exact);
            if (std::abs(frac - 0.5L) < 1e-9L)
                continue;
            EXPECT_EQ(percent_hundredths(c, n), static_cast<int>(std::floor(exact + 0.5L))) << c << "/" << n;
        }
    EXPECT_EQ(percent_hundredths(1, 8), 1250);
    EXPECT_EQ(percent_hundredths(1, 16), 625);
    EXPECT_EQ(percent_hundredths(1, 32), 313); // 3.125 rounds up
    EXPECT_EQ(format_percent(9474), "94.74");
    EXPECT_EQ(format_percent(0), "0.00");
    EXPECT_EQ(format_percent(10000), "100.00");
}

TEST(Benchmark, ReportRequiresLabels)
{
    std::vector<RunRecord> records(2);
    records[0].query_id = "a";
    records[0].label = Label::Correct;
    records[1].query_id = "b";
    EXPECT_THROW(report(records), Error);
    records[1].label = Label::NotReplying;
    const auto r = report(records);
    EXPECT_EQ(r.n, 2);
    EXPECT_EQ(r.at(Label::Correct).hundredths, 5000);
}

TEST(Benchmark, LabelsOverrideHeuristics)
{
    std::vector<RunRecord> records(2);
    records[0].query_id = "a";
    records[0].heuristic.suggested = Label::Correct;
    records[1].query_id = "b";
    records[1].heuristic.suggested = Label::BlatantlyWrong;
    const std::map<std::string, Label> human = {{"b", Label::CorrectNotOptimal}};
    auto applied = apply_labels(records, human);
    EXPECT_EQ(applied.unlabeled, std::vector<std::string>{"a"});
    applied = apply_labels(records, human, true);
    EXPECT_TRUE(applied.unlabeled.empty());
    EXPECT_EQ(applied.records[0].label, Label::Correct);
    EXPECT_EQ(applied.records[0].labeler, Labeler::Heuristic);
    EXPECT_EQ(applied.records[1].label, Label::CorrectNotOptimal);
    EXPECT_EQ(applied.records[1].labeler, Labeler::Human);
}

TEST(Benchmark, LabelFiles)
{
    const auto row8 = load_labels_file(fixture("labels/row8.json"));
    EXPECT_EQ(row8.size(), 38u);
    std::istringstream bare(R"({"q1": "C", "q2": "deceptively wrong"})");
    const auto labels = load_labels(bare);
    EXPECT_EQ(labels.at("q2"), Label::DeceptivelyWrong);
    std::istringstream bad(R"({"q1": "brilliant"})");
    EXPECT_THROW(load_labels(bad), Error);
}

TEST(Benchmark, ReportTableAndJson)
{
    const auto r = report_from_counts({0, 0, 0, 0, 2, 36}, 8);
    const auto table = render_table(r);
    EXPECT_NE(table.find("| Iteration | DW | NRW | BW | PI | CNO | C |"), std::string::npos);
    EXPECT_NE(table.find("| 8 | 0.00 | 0.00 | 0.00 | 0.00 | 5.26 | 94.74 |"), std::string::npos);
    const auto j = to_json(r);
    EXPECT_EQ(j["n"], 38);
    EXPECT_THROW(report_from_counts({0, 0, 0, 0, 0, 0}, 8), Error);
}

TEST(Benchmark, RunIsDeterministicAcrossJobCounts)
{
    const auto qs = load_benchmark_file(fixture("benchmark38.json"));
    const std::vector<BenchmarkQuery> some(qs.begin(), qs.begin() + 10);
    RunOptions serial, parallel;
    parallel.jobs = 4;
    const auto a = run(some, 8, midtown(), echo(), serial);
    const auto b = run(some, 8, midtown(), echo(), parallel);
    ASSERT_EQ(a.size(), 10u);
    EXPECT_EQ(records_to_json(a).dump(), records_to_json(b).dump());
    for (const auto& r : a)
    {
        EXPECT_FALSE(r.error);
        EXPECT_EQ(r.heuristic.suggested, Label::Correct);
        EXPECT_EQ(r.system_hash, a.front().system_hash);
    }
}

TEST(Benchmark, PipelineErrorsAreRecorded)
{
    const auto qs = load_benchmark_file(fixture("benchmark38.json"));
    const std::vector<BenchmarkQuery> one(qs.begin(), qs.begin() + 1);
    const json failing = {{"version", 1}, {"turns", {{{"id", one[0].id}, {"steps", {{{"fail", "offline"}}}}}}}};
    const auto records = run(one, 8, midtown(), [&](const BenchmarkQuery&) {
        return std::make_shared<prompt::ScriptedBackend>(failing);
    });
    ASSERT_EQ(records.size(), 1u);
    ASSERT_TRUE(records[0].error);
    EXPECT_NE(records[0].error->find("offline"), std::string::npos);
}

TEST(Benchmark, RecordRoundTrip)
{
    const auto qs = load_benchmark_file(fixture("benchmark38.json"));
    const std::vector<BenchmarkQuery> some(qs.begin(), qs.begin() + 3);
    auto records = run(some, 8, midtown(), echo());
    records = apply_labels(records, {}, true).records;
    const auto doc = records_to_json(records);
    EXPECT_EQ(records_to_json(records_from_json(doc)), doc);
}
