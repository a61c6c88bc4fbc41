// SPDX-License-Identifier: Apache-2.0
// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "support.hpp"

#include "mapio/benchmark.hpp"
#include "mapio/chat.hpp"
#include "mapio/conversation.hpp"
#include "mapio/error.hpp"
#include "mapio/navigation.hpp"
#include "mapio/pointer.hpp"
#include "mapio/prompt.hpp"
#include "mapio/service.hpp"
#include "mapio/spatial.hpp"

#include <fmt/format.h>

#include <chrono>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

using namespace mapio;
using mapio::fx::fixture;
using json = nlohmann::json;

namespace {

struct Outcome
{
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::shared_ptr<const MapModel> midtown()
{
    static auto m = std::make_shared<const MapModel>(load_map_file(fixture("midtown.json")));
    return m;
}

// ---------------------------------------------------------------------------------------

Outcome report_arithmetic()
{
    // Printed percentages, columns DW NRW BW PI CNO C.
    const std::vector<std::array<std::string, 6>> printed = {
        {"5.26", "28.95", "2.63", "0.00", "13.16", "50.00"},  {"18.42", "0.00", "34.21", "0.00", "5.26", "42.11"},
        {"21.05", "0.00", "26.32", "0.00", "15.79", "36.84"}, {"10.53", "0.00", "10.53", "0.00", "15.79", "63.16"},
        {"2.63", "0.00", "2.63", "0.00", "13.16", "81.58"},   {"0.00", "0.00", "2.63", "0.00", "7.89", "89.47"},
        {"0.00", "0.00", "0.00", "0.00", "10.53", "89.47"},   {"0.00", "0.00", "0.00", "0.00", "5.26", "94.74"},
    };
    const auto t0 = Clock::now();
    int mismatches = 0;
    for (std::size_t row = 0; row < printed.size(); ++row)
    {
        std::vector<bench::RunRecord> records;
        int total = 0;
        for (std::size_t c = 0; c < 6; ++c)
        {
            const int count = static_cast<int>(std::lround(std::stod(printed[row][c]) * 38.0 / 100.0));
            total += count;
            for (int k = 0; k < count; ++k)
            {
                bench::RunRecord r;
                r.query_id = "q" + std::to_string(records.size());
                r.preset = static_cast<int>(row) + 1;
                r.label = kAllLabels[c];
                r.labeler = bench::Labeler::Human;
                records.push_back(std::move(r));
            }
        }
        if (total != 38)
        {
            ++mismatches;
            continue;
        }
        const auto rep = bench::report(records);
        for (std::size_t c = 0; c < 6; ++c)
            if (bench::format_percent(rep.categories[c].hundredths) != printed[row][c])
                ++mismatches;

        // the committed label fixture for the row must agree too
        const auto labels = bench::load_labels_file(fixture("labels/row" + std::to_string(row + 1) + ".json"));
        std::array<int, 6> counts{};
        for (const auto& [id, l] : labels)
            ++counts[static_cast<std::size_t>(l)];
        const auto from_fixture = bench::report_from_counts(counts, static_cast<int>(row) + 1);
        for (std::size_t c = 0; c < 6; ++c)
            if (bench::format_percent(from_fixture.categories[c].hundredths) != printed[row][c])
                ++mismatches;
    }
    const double s = seconds_since(t0);
    std::ostringstream d;
    d << "8 rows, " << mismatches << " mismatches, " << std::fixed << std::setprecision(3) << s << " s";
    return {mismatches == 0 && s < 1.0, d.str()};
}

Outcome routing_oracle()
{
    const auto t0 = Clock::now();
    int pairs = 0, mismatches = 0;
    for (unsigned seed = 1; seed <= 20; ++seed)
    {
        const int n = 3 + static_cast<int>(seed % 7); // 3..9 nodes
        const auto model = load_map(fx::random_connected_map(seed, n).dump());
        for (const auto& a : model.nodes())
            for (const auto& b : model.nodes())
            {
                ++pairs;
                const double expected = fx::brute_force_shortest(model, a.id, b.id);
                const double got =
                    spatial::shortest_route(spatial::NodeRef{a.id}, spatial::NodeRef{b.id}, model).total_length_m;
                if (std::abs(got - expected) > 1e-9 * std::max(1.0, expected))
                    ++mismatches;
            }
    }
    const double s = seconds_since(t0);
    std::ostringstream d;
    d << "20 graphs, " << pairs << " pairs, " << mismatches << " mismatches, " << std::fixed << std::setprecision(2)
      << s << " s";
    return {mismatches == 0 && s < 30.0, d.str()};
}

Outcome projection_oracle()
{
    const auto model = load_map_file(fixture("grid3x3.json"));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ux(0.0, model.frame().width_m), uy(0.0, model.frame().height_m);
    int violations = 0;
    double worst = -1e9;
    for (int i = 0; i < 10000; ++i)
    {
        const Point2D p{ux(rng), uy(rng)};
        const double got = spatial::closest_edge(p, model).distance_m;
        const double sampled = fx::dense_edge_distance(model, p);
        worst = std::max(worst, got - sampled);
        if (got > sampled + 1e-3)
            ++violations;
    }
    std::ostringstream d;
    d << "10000 points, " << violations << " violations, max excess " << std::scientific << std::setprecision(2)
      << worst << " m";
    return {violations == 0, d.str()};
}

Outcome homography()
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> fx(0.0, 640.0), fy(0.0, 480.0);
    double exact_err = 0.0;

    // identity and translation, both as constructed transforms and as estimates
    const pointer::Homography identity;
    const auto shift = pointer::Homography::translation(-45.0, 145.0);
    std::vector<pointer::Correspondence> id_pairs, shift_pairs;
    for (int i = 0; i < 8; ++i)
    {
        const Point2D p{fx(rng), fy(rng)};
        id_pairs.push_back({p, p});
        shift_pairs.push_back({p, {p.x - 45.0, p.y + 145.0}});
    }
    const auto id_est = pointer::estimate_homography(id_pairs);
    const auto shift_est = pointer::estimate_homography(shift_pairs);
    for (const auto& c : id_pairs)
    {
        exact_err = std::max(exact_err, distance(identity.apply(c.frame), c.map));
        exact_err = std::max(exact_err, distance(id_est.apply(c.frame), c.map));
    }
    for (const auto& c : shift_pairs)
    {
        exact_err = std::max(exact_err, distance(shift.apply(c.frame), c.map));
        exact_err = std::max(exact_err, distance(shift_est.apply(c.frame), c.map));
    }

    double recovery_err = 0.0;
    int failures = 0;
    for (unsigned seed = 1; seed <= 100; ++seed)
    {
        std::mt19937 r(seed);
        std::uniform_real_distribution<double> diag(0.3, 1.5), skew(-0.2, 0.2), off(-100.0, 100.0),
            persp(-2e-4, 2e-4);
        const std::array<double, 9> h = {diag(r), skew(r), off(r), skew(r), diag(r), off(r), persp(r), persp(r), 1.0};
        std::vector<pointer::Correspondence> pairs;
        std::uniform_real_distribution<double> px(0.0, 640.0), py(0.0, 480.0);
        for (int i = 0; i < 8; ++i)
        {
            const Point2D p{px(r), py(r)};
            pairs.push_back({p, fx::apply_h(h, p)});
        }
        try
        {
            const auto est = pointer::estimate_homography(pairs);
            for (const auto& c : pairs)
                recovery_err = std::max(recovery_err, distance(est.apply(c.frame), c.map));
        }
        catch (const Error&)
        {
            ++failures;
        }
    }
    std::ostringstream d;
    d << std::scientific << std::setprecision(2) << "identity/translation max error " << exact_err
      << ", 100 random H max error " << recovery_err << ", " << failures << " estimation failures";
    return {exact_err <= 1e-9 && recovery_err <= 1e-6 && failures == 0, d.str()};
}

Outcome snapping()
{
    const auto model = midtown();
    const double capture = 12.0, release = 20.0;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ux(0.0, model->frame().width_m), uy(0.0, model->frame().height_m);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    std::uniform_real_distribution<double> jitter(0.0, (release - capture) * 0.999);

    int switches = 0;
    for (int traj = 0; traj < 1000; ++traj)
    {
        pointer::SnapState state{std::nullopt, capture, release};
        Point2D p;
        pointer::FeatureHit acquired;
        do
        {
            state.current.reset();
            p = {ux(rng), uy(rng)};
            acquired = pointer::snap(p, *model, state);
        } while (!acquired.is_feature());
        for (int step = 0; step < 50; ++step)
        {
            const double a = angle(rng), r = jitter(rng);
            const auto hit = pointer::snap({p.x + r * std::cos(a), p.y + r * std::sin(a)}, *model, state);
            if (!hit.same_feature(acquired))
                ++switches;
        }
    }

    int disagreements = 0;
    for (int i = 0; i < 10000; ++i)
    {
        const Point2D p{ux(rng), uy(rng)};
        pointer::SnapState state{std::nullopt, capture, release};
        const auto hit = pointer::snap(p, *model, state);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : fx::all_features(*model, p))
            best = std::min(best, c.distance);
        if (best > capture)
        {
            if (hit.is_feature())
                ++disagreements;
            continue;
        }
        // the chosen feature must be one of the brute-force minimisers
        bool ok = false;
        for (const auto& c : fx::all_features(*model, p))
            if (c.kind == hit.kind && c.id == hit.id && std::abs(c.distance - best) <= 1e-9)
                ok = true;
        if (!ok)
            ++disagreements;
    }
    std::ostringstream d;
    d << "1000 trajectories x 50 steps, " << switches << " switches; 10000 reset snaps, " << disagreements
      << " disagreements";
    return {switches == 0 && disagreements == 0, d.str()};
}

std::vector<service::WireEvent> replay_fixture(const std::string& trace, const std::string& script)
{
    return service::replay(midtown(), service::load_trace_file(fixture("traces/" + trace)),
                           service::make_backend("scripted:" + fixture("scripts/" + script)),
                           service::EngineConfig{});
}

int count(const std::vector<service::WireEvent>& log, service::WireType t, const char* reason = nullptr)
{
    return static_cast<int>(std::count_if(log.begin(), log.end(), [&](const auto& e) {
        return e.type == t && (!reason || e.payload.value("reason", "") == reason);
    }));
}

Outcome guidance()
{
    using service::WireType;
    std::vector<std::string> problems;

    const auto on = replay_fixture("on_route.trace", "navigate_esb.json");
    {
        int steps = -1, done = 0;
        for (const auto& e : on)
        {
            if (e.type == WireType::NavStep && e.payload.contains("steps"))
                steps = e.payload["steps"].get<int>();
            if (e.type == WireType::NavStep && e.payload.contains("completed_step"))
                ++done;
        }
        if (steps <= 0 || done != steps || on.empty() || on.back().type != WireType::NavArrived)
            problems.push_back("on-route: " + std::to_string(done) + " steps done of " + std::to_string(steps));
    }

    const auto off = replay_fixture("off_route.trace", "navigate_esb.json");
    {
        const int wrong = count(off, WireType::NavReroute, "wrong_direction");
        const int rerouted = count(off, WireType::NavReroute, "rerouted");
        bool paired = false;
        for (std::size_t i = 0; i + 1 < off.size(); ++i)
            if (off[i].type == WireType::NavReroute && off[i].payload["reason"] == "wrong_direction" &&
                off[i + 1].type == WireType::NavReroute && off[i + 1].payload["reason"] == "rerouted")
                paired = true;
        if (wrong != 1 || rerouted != 1 || !paired || count(off, WireType::NavArrived) != 1)
            problems.push_back("off-route: wrong_direction=" + std::to_string(wrong) +
                               " rerouted=" + std::to_string(rerouted));
    }

    const auto spiral = replay_fixture("spiral.trace", "guide_spa.json");
    int spiral_cues = 0;
    double spiral_worst = 0.0;
    {
        // pointer position at each cue: last raw sample at or before the cue time
        const auto trace = service::load_trace_file(fixture("traces/spiral.trace"));
        const Point2D target = midtown()->poi("p-solle").position;
        int cues = 0, off_bearing = 0, increases = 0;
        double worst = 0.0, last_distance = std::numeric_limits<double>::infinity();
        for (const auto& e : spiral)
        {
            if (e.type != WireType::BeaconCue)
                continue;
            ++cues;
            const double d = e.payload["distance_m"].get<double>();
            if (d > last_distance)
                ++increases;
            last_distance = d;
            const long t = e.payload["t_ms"].get<long>();
            std::optional<Point2D> at;
            for (const auto& r : trace.records)
                if (r.kind == service::TraceRecord::Kind::Frame && r.at.count() <= t && !r.hands.empty())
                    at = r.hands.front().map_position;
            if (!at)
            {
                ++off_bearing;
                continue;
            }
            const double truth = fx::bearing_deg(target.x - at->x, target.y - at->y);
            const auto dir = e.payload["direction"].get<std::string>();
            double cue = -1;
            for (int c = 0; c < 8; ++c)
                if (spatial::cardinal_symbol(static_cast<spatial::Cardinal>(c)) == dir)
                    cue = spatial::cardinal_bearing(static_cast<spatial::Cardinal>(c));
            const double err = fx::angle_between(cue, truth);
            worst = std::max(worst, err);
            if (err > 45.0)
                ++off_bearing;
        }
        if (cues == 0 || off_bearing != 0 || increases != 0 || spiral.empty() ||
            spiral.back().type != WireType::BeaconArrived)
            problems.push_back("spiral: " + std::to_string(off_bearing) + " of " + std::to_string(cues) +
                               " cues off bearing (worst " + std::to_string(worst) + " deg), " +
                               std::to_string(increases) + " distance increases");
        spiral_cues = cues;
        spiral_worst = worst;
    }

    // byte-stable logs
    const std::pair<const char*, const std::vector<service::WireEvent>*> logs[] = {
        {"on_route", &on}, {"off_route", &off}, {"spiral", &spiral}};
    const std::pair<const char*, const char*> sources[] = {{"on_route.trace", "navigate_esb.json"},
                                                           {"off_route.trace", "navigate_esb.json"},
                                                           {"spiral.trace", "guide_spa.json"}};
    for (std::size_t i = 0; i < 3; ++i)
    {
        const auto text = service::to_json_lines(*logs[i].second);
        if (service::to_json_lines(replay_fixture(sources[i].first, sources[i].second)) != text)
            problems.push_back(std::string(logs[i].first) + ": replay not deterministic");
        if (!fx::matches_golden(std::string("replay_") + logs[i].first + ".ndjson", text))
            problems.push_back(std::string(logs[i].first) + ": differs from golden log");
    }

    std::string d = fmt::format("on-route, off-route, spiral ({} cues, worst {:.1f} deg)", spiral_cues, spiral_worst);
    for (const auto& p : problems)
        d += "; " + p;
    return {problems.empty(), d};
}

Outcome pcd_golden()
{
    const auto model = midtown();
    const auto& e01 = model->edge("e01");
    const Point2D a = model->node(e01.n1).position, b = model->node(e01.n2).position;
    const Point2D at = a + (b - a) * (100.0 / e01.length);
    const auto pcd = prompt::generate_pcd(at, *model, parse_wall_time("Monday 14:30"));
    std::vector<std::string> problems;
    if (std::abs(e01.length - 310.0) > 1e-9)
        problems.push_back("edge length " + std::to_string(e01.length));
    if (!pcd.edge || pcd.edge->edge_id != "e01")
        problems.push_back("projected onto the wrong edge");
    else
    {
        const double sum = pcd.edge->dist_from_n1_m + pcd.edge->dist_from_n2_m;
        if (std::abs(sum - 310.0) > 1e-6)
            problems.push_back("endpoint distances sum to " + std::to_string(sum));
        if (std::abs(pcd.edge->dist_from_n1_m - 100.0) > 1e-6 || std::abs(pcd.edge->dist_from_n2_m - 210.0) > 1e-6)
            problems.push_back("endpoint distances not 100/210");
    }
    if (pcd.text.find("100 m") == std::string::npos || pcd.text.find("210 m") == std::string::npos)
        problems.push_back("text lacks the endpoint distances");
    if (!fx::matches_golden("pcd_e01.txt", pcd.text))
        problems.push_back("text differs from golden");
    std::string d = "100 m / 210 m along e01";
    for (const auto& p : problems)
        d += "; " + p;
    return {problems.empty(), d};
}

struct TaskTurn
{
    const char* question;
    Point2D pointed;
    const char* wall;
};

const std::vector<TaskTurn>& task_turns()
{
    static const std::vector<TaskTurn> turns = {
        {"Where is Cooper Electrics?", {200, 332}, "Monday 14:00"},
        {"Does the Herald Hotel have wifi?", {110, 110}, "Monday 14:05"},
        {"Remember the Herald Hotel as my hotel.", {110, 110}, "Monday 14:06"},
        {"How far is my hotel from here?", {300, 340}, "Monday 14:10"},
        {"Is Duane Pharmacy open now?", {392, 220}, "Monday 22:00"},
        {"How long does it take to walk to the Empire State Building from here?", {300, 340}, "Monday 22:05"},
        {"Guide me to Solle Spa", {200, 340}, "Monday 22:10"},
        {"Navigate me to the Empire State Building", {300, 340}, "Monday 22:15"},
    };
    return turns;
}

struct TaskRun
{
    std::string transcript;
    std::vector<prompt::TurnResult> results;
};

TaskRun run_tasks()
{
    auto backend = prompt::ScriptedBackend::from_file(fixture("scripts/tasks.json"));
    prompt::Conversation conv(midtown(), 8, backend);
    TaskRun run;
    json all = json::array();
    for (const auto& t : task_turns())
    {
        auto r = conv.converse(t.question, t.pointed, parse_wall_time(t.wall));
        all.push_back(r.transcript);
        run.results.push_back(std::move(r));
    }
    run.transcript = all.dump(2) + "\n";
    return run;
}

bool near_equal(const json& a, double b)
{
    return a.is_number() && std::abs(a.get<double>() - b) <= 1e-9;
}

Outcome conversation_tasks()
{
    const auto model = midtown();
    std::vector<std::string> problems;
    TaskRun first, second;
    try
    {
        first = run_tasks();
        second = run_tasks();
    }
    catch (const std::exception& e)
    {
        return {false, std::string("task run failed: ") + e.what()};
    }
    if (first.transcript != second.transcript)
        problems.push_back("transcripts differ between runs");
    if (!fx::matches_golden("tasks_transcript.json", first.transcript))
        problems.push_back("transcript differs from golden");

    // dispatch fidelity: compare every tool result with a direct call
    const auto& turns = task_turns();
    const Poi& cooper = model->poi("p-cooper");
    const Poi& hotel = model->poi("p-hotel");
    const Poi& esb = model->poi("p-esb");
    const Poi& spa = model->poi("p-solle");
    int checked = 0;
    auto step = [&](std::size_t turn, std::size_t i) -> const json& {
        return first.results[turn].transcript["steps"][i]["result"];
    };
    auto expect = [&](bool ok, const std::string& what) {
        ++checked;
        if (!ok)
            problems.push_back(what);
    };
    const auto& R = first.results;
    if (R.size() != turns.size())
        return {false, "wrong number of turns"};

    expect(step(0, 0)["poi_id"] == cooper.id && step(0, 0)["discoverable"] == true, "find-poi result");
    expect(R[0].answer.find("West 36th Street") != std::string::npos, "find-poi answer");
    expect(std::find(hotel.facilities.begin(), hotel.facilities.end(), "wifi") != hotel.facilities.end() &&
               R[1].answer.find("wifi") != std::string::npos,
           "facility");
    expect(step(2, 0)["poi_id"] == hotel.id && step(2, 0)["alias"] == "my hotel", "bookmark");
    expect(step(3, 0)["poi_id"] == hotel.id, "bookmark resolution");
    expect(near_equal(step(3, 1)["distance_m"], spatial::distance(turns[3].pointed, hotel)), "bookmark distance");
    {
        const auto& pharmacy = model->poi("p-pharmacy");
        const bool open = pharmacy.opening_hours.is_open(parse_wall_time("Monday 22:00"));
        expect(!open && R[4].answer.find("closed") != std::string::npos, "opening hours at 22:00");
    }
    {
        const auto route = spatial::shortest_route(turns[5].pointed, spatial::PoiRef{esb.id}, *model);
        const double secs = route.total_length_m / 1.2;
        expect(near_equal(step(5, 0)["walking_distance_m"], route.total_length_m) &&
                   near_equal(step(5, 0)["walking_time_s"], secs) &&
                   step(5, 0)["walking_time"] == spatial::format_duration(secs) &&
                   near_equal(step(5, 0)["distance_m"], spatial::distance(turns[5].pointed, esb)),
               "walking time");
    }
    {
        const auto beacon = nav::start_flyme(spatial::PoiRef{spa.id}, *model);
        expect(step(6, 0)["target"] == beacon.target_name &&
                   near_equal(step(6, 0)["distance_m"], spatial::distance(turns[6].pointed, spa)) &&
                   R[6].guidance && std::holds_alternative<nav::BeaconSession>(*R[6].guidance),
               "fly-me-there start");
    }
    {
        const auto start = nav::start_street_nav(turns[7].pointed, spatial::PoiRef{esb.id}, *model);
        expect(start.first && step(7, 0)["first_instruction"] == start.first->text &&
                   step(7, 0)["steps"] == start.session.instructions.size() &&
                   near_equal(step(7, 0)["total_length_m"], start.session.route.total_length_m) && R[7].guidance &&
                   std::holds_alternative<nav::NavStart>(*R[7].guidance),
               "street navigation start");
    }

    std::string d = std::to_string(turns.size()) + " turns, " + std::to_string(checked) + " direct-call checks";
    for (const auto& p : problems)
        d += "; " + p;
    return {problems.empty(), d};
}

Outcome benchmark_substitute()
{
    const auto queries = bench::load_benchmark_file(fixture("benchmark38.json"));
    const auto script = fx::read_file(fixture("scripts/echo38.json"));
    const auto doc = json::parse(script);
    bench::RunOptions options;
    options.jobs = 4;
    const auto records = bench::run(
        queries, 8, midtown(),
        [&](const bench::BenchmarkQuery& q) {
            auto b = std::make_shared<prompt::ScriptedBackend>(doc);
            b->select_turn(q.id);
            return b;
        },
        options);
    int errors = 0, correct = 0;
    for (const auto& r : records)
    {
        if (r.error)
            ++errors;
        if (r.heuristic.suggested == Label::Correct)
            ++correct;
    }
    auto applied = bench::apply_labels(records, {}, true);
    const auto rep = bench::report(applied.records);
    const auto pct = bench::format_percent(rep.at(Label::Correct).hundredths);
    std::ostringstream d;
    d << records.size() << " queries, " << errors << " pipeline errors, heuristic Correct " << pct << "%";
    return {queries.size() == 38 && records.size() == 38 && errors == 0 && correct == 38 && pct == "100.00",
            d.str()};
}

Outcome busy_tick()
{
    json script = {{"version", 1},
                   {"turns", {{{"id", "slow"}, {"steps", {{{"answer", "Done."}, {"latency_ms", 15000}}}}}}}};
    service::EventBus bus;
    service::Session session(midtown(), service::EngineConfig{}, std::make_shared<prompt::ScriptedBackend>(script),
                             bus, service::TurnMode::Synchronous);
    const pointer::HandFrame hand{pointer::Hand::Right, {200, 332}, true};
    session.pointer_frame(Millis(0), std::span(&hand, 1));
    session.press_talk(Millis(0));
    session.question(Millis(0), "Is there a cafe nearby?");
    session.release_talk(Millis(0));
    for (long t = 100; t <= 20000; t += 100)
        session.advance(Millis(t));
    std::vector<long> ticks;
    long answered = -1;
    for (const auto& e : bus.since(0))
    {
        if (e.type == service::WireType::BusyTick)
            ticks.push_back(e.payload["t_ms"].get<long>());
        if (e.type == service::WireType::Answer)
            answered = e.payload["t_ms"].get<long>();
    }
    std::ostringstream d;
    d << ticks.size() << " ticks at";
    for (long t : ticks)
        d << ' ' << t << " ms";
    d << ", answer at " << answered << " ms";
    return {ticks == std::vector<long>{7000, 14000} && answered == 15000, d.str()};
}

} // namespace

int main()
{
    const std::pair<const char*, Outcome (*)()> criteria[] = {
        {"report-arithmetic", report_arithmetic},
        {"routing-oracle", routing_oracle},
        {"projection-oracle", projection_oracle},
        {"homography", homography},
        {"snapping-hysteresis", snapping},
        {"guidance-scenarios", guidance},
        {"pcd-golden", pcd_golden},
        {"conversation-tasks", conversation_tasks},
        {"benchmark-scripted", benchmark_substitute},
        {"busy-tick-cadence", busy_tick},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, fn] : criteria)
    {
        ++n;
        Outcome o;
        try
        {
            o = fn();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass)
            ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << n << "] " << name << ": " << o.detail << std::endl;
    }
    std::cout << (failed ? "FAILED " : "OK ") << (n - failed) << "/" << n << std::endl;
    return failed ? 1 : 0;
}
