// SPDX-License-Identifier: Apache-2.0
// mapio command line: service, one-shot questions, routing, benchmarks and trace replay.

#include "mapio/benchmark.hpp"
#include "mapio/conversation.hpp"
#include "mapio/error.hpp"
#include "mapio/map_model.hpp"
#include "mapio/prompt.hpp"
#include "mapio/service.hpp"
#include "mapio/spatial.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <csignal>
#include <fstream>
#include <iostream>

using namespace mapio;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

service::HttpService* g_service = nullptr;

std::shared_ptr<const MapModel> load_model(const std::string& path)
{
    return std::make_shared<const MapModel>(load_map_file(path));
}

/// "x,y", "node:<id>", "poi:<id>" or a POI name.
spatial::Endpoint parse_endpoint(const std::string& text, const MapModel& model)
{
    if (text.rfind("node:", 0) == 0)
    {
        const auto id = text.substr(5);
        model.node(id);
        return spatial::NodeRef{id};
    }
    if (text.rfind("poi:", 0) == 0)
    {
        const auto id = text.substr(4);
        model.poi(id);
        return spatial::PoiRef{id};
    }
    if (const auto comma = text.find(','); comma != std::string::npos)
    {
        try
        {
            return Point2D{std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
        }
        catch (const std::exception&)
        {
            fail(ErrorKind::Validation, "bad point \"" + text + "\"; expected x,y");
        }
    }
    if (const Poi* p = model.find_poi_by_name(text))
        return spatial::PoiRef{p->id};
    fail(ErrorKind::NotFound, "unknown location \"" + text + "\"");
}

std::optional<Point2D> parse_point(const std::string& text)
{
    if (text.empty())
        return std::nullopt;
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        fail(ErrorKind::Validation, "bad point \"" + text + "\"; expected x,y");
    try
    {
        return Point2D{std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    }
    catch (const std::exception&)
    {
        fail(ErrorKind::Validation, "bad point \"" + text + "\"; expected x,y");
    }
}

void write_output(const std::string& path, const std::string& content)
{
    if (path.empty() || path == "-")
    {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out)
        fail(ErrorKind::Runtime, "cannot write " + path);
    out << content;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Conversational tactile-map engine"};
    app.require_subcommand(1);

    std::string map_path;
    std::string config_path;
    std::string backend_spec;
    int preset = 0;

    const auto add_common = [&](CLI::App* cmd, bool needs_backend) {
        cmd->add_option("--map", map_path, "Map document")->required()->check(CLI::ExistingFile);
        cmd->add_option("--config", config_path, "Engine config file");
        cmd->add_option("--preset", preset, "Prompt preset 1-8 (default from config)")->check(CLI::Range(1, 8));
        if (needs_backend)
            cmd->add_option("--backend", backend_spec, "scripted:<file> or live")->required();
    };

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP service with an event stream");
    std::string host = "127.0.0.1";
    int port = 8080;
    add_common(serve, true);
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port, 0 for any free port");

    // ask
    auto* ask = app.add_subcommand("ask", "Ask one question and print the answer");
    std::string question;
    std::string at;
    std::string when = "Monday 12:00";
    std::string turn_id;
    bool show_transcript = false;
    add_common(ask, true);
    ask->add_option("question", question, "Question text")->required();
    ask->add_option("--at", at, "Pointed position x,y in map meters");
    ask->add_option("--time", when, "Wall time, e.g. \"Monday 22:00\"");
    ask->add_option("--turn", turn_id, "Scripted backend: play the turn with this id");
    ask->add_flag("--transcript", show_transcript, "Print the JSON transcript instead of the answer");

    // route
    auto* route = app.add_subcommand("route", "Print walking instructions between two locations");
    std::string from;
    std::string to;
    bool accessible = false;
    bool obey_one_way = false;
    route->add_option("--map", map_path, "Map document")->required()->check(CLI::ExistingFile);
    route->add_option("--from", from, "x,y | node:<id> | poi:<id> | POI name")->required();
    route->add_option("--to", to, "x,y | node:<id> | poi:<id> | POI name")->required();
    route->add_flag("--accessible", accessible, "Include accessibility notes");
    route->add_flag("--obey-one-way", obey_one_way, "Respect one-way streets");

    // bench
    auto* bench = app.add_subcommand("bench", "Benchmark runs and reports");
    bench->require_subcommand(1);
    auto* bench_run = bench->add_subcommand("run", "Run benchmark queries and write run records");
    std::string benchmark_path;
    std::string out_path;
    unsigned jobs = 1;
    add_common(bench_run, true);
    bench_run->add_option("--benchmark", benchmark_path, "Benchmark query file")->required()->check(CLI::ExistingFile);
    bench_run->add_option("--out", out_path, "Run records output (default stdout)");
    bench_run->add_option("--jobs", jobs, "Parallel queries")->check(CLI::PositiveNumber);

    auto* bench_report = bench->add_subcommand("report", "Aggregate labels into a results table");
    std::string records_path;
    std::string labels_path;
    bool accept_heuristic = false;
    bool report_json = false;
    int report_preset = 0;
    bench_report->add_option("--records", records_path, "Run records from bench run");
    bench_report->add_option("--labels", labels_path, "Label file (query id -> label)")->required();
    bench_report->add_option("--preset", report_preset, "Preset shown when reporting labels alone");
    bench_report->add_flag("--accept-heuristic", accept_heuristic, "Use heuristic suggestions for unlabeled runs");
    bench_report->add_flag("--json", report_json, "Print the report as JSON");

    // replay
    auto* replay = app.add_subcommand("replay", "Replay an interaction trace and print the event log");
    std::string trace_path;
    add_common(replay, true);
    replay->add_option("--trace", trace_path, "Trace file")->required();
    replay->add_option("--out", out_path, "Event log output (default stdout)");

    // catalog / system
    auto* catalog = app.add_subcommand("catalog", "Print the tool catalog of a preset");
    int catalog_preset = prompt::kPresetCount;
    catalog->add_option("--preset", catalog_preset, "Prompt preset 1-8")->check(CLI::Range(1, 8));

    auto* system = app.add_subcommand("system", "Print the system instructions for a map and preset");
    add_common(system, false);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return kExitValidation;
    }

    try
    {
        auto config = service::load_config(config_path);
        if (preset != 0)
            config.preset = preset;

        if (*serve)
        {
            auto model = load_model(map_path);
            const auto spec = backend_spec;
            service::HttpService svc(config, [spec] { return service::make_backend(spec); }, model);
            const int bound = svc.start(host, port);
            fmt::print("listening on http://{}:{}\n", host, bound);
            std::fflush(stdout);
            g_service = &svc;
            std::signal(SIGINT, [](int) {
                if (g_service)
                    g_service->stop();
            });
            std::signal(SIGTERM, [](int) {
                if (g_service)
                    g_service->stop();
            });
            svc.wait();
            g_service = nullptr;
            return 0;
        }
        if (*ask)
        {
            auto model = load_model(map_path);
            auto backend = service::make_backend(backend_spec);
            if (!turn_id.empty())
            {
                auto* scripted = dynamic_cast<prompt::ScriptedBackend*>(backend.get());
                if (!scripted)
                    fail(ErrorKind::Validation, "--turn needs a scripted backend");
                scripted->select_turn(turn_id);
            }
            prompt::Conversation conv(model, config.preset, std::move(backend), config.conversation);
            const auto turn = conv.converse(question, parse_point(at), parse_wall_time(when));
            if (show_transcript)
                fmt::print("{}\n", turn.transcript.dump(2));
            else
                fmt::print("{}\n", turn.answer);
            return 0;
        }
        if (*route)
        {
            auto model = load_model(map_path);
            const auto r = spatial::shortest_route(parse_endpoint(from, *model), parse_endpoint(to, *model), *model,
                                                   {.walking = !obey_one_way});
            const auto steps = spatial::route_instructions(
                r, *model, accessible ? spatial::Verbosity::Accessible : spatial::Verbosity::Concise);
            for (std::size_t i = 0; i < steps.size(); ++i)
                fmt::print("{}. {}\n", i + 1, steps[i].text);
            fmt::print("Total: {}, about {} on foot.\n", format_meters(r.total_length_m),
                       spatial::format_duration(spatial::walking_time_s(r.total_length_m,
                                                                        config.conversation.walking_speed_mps)));
            return 0;
        }
        if (*bench_run)
        {
            auto model = load_model(map_path);
            const auto queries = bench::load_benchmark_file(benchmark_path);
            const auto spec = backend_spec;
            bench::BackendFactory factory = [spec](const bench::BenchmarkQuery& q) {
                auto backend = service::make_backend(spec);
                if (auto* scripted = dynamic_cast<prompt::ScriptedBackend*>(backend.get()))
                    scripted->select_turn(q.id);
                return backend;
            };
            const auto records =
                bench::run(queries, config.preset, model, factory, {.jobs = jobs, .conversation = config.conversation});
            write_output(out_path, bench::records_to_json(records).dump(2) + "\n");
            return 0;
        }
        if (*bench_report)
        {
            const auto labels = bench::load_labels_file(labels_path);
            bench::Report rep;
            if (records_path.empty())
            {
                std::array<int, 6> counts{};
                for (const auto& [_, l] : labels)
                    ++counts[static_cast<std::size_t>(l)];
                rep = bench::report_from_counts(counts, report_preset);
            }
            else
            {
                std::ifstream in(records_path);
                if (!in)
                    fail(ErrorKind::NotFound, "cannot open records " + records_path);
                auto doc = nlohmann::json::parse(in, nullptr, false);
                if (doc.is_discarded())
                    fail(ErrorKind::Validation, "records file is not valid JSON");
                auto applied = bench::apply_labels(bench::records_from_json(doc), labels, accept_heuristic);
                if (!applied.unlabeled.empty())
                {
                    std::string ids;
                    for (const auto& id : applied.unlabeled)
                        ids += (ids.empty() ? "" : ", ") + id;
                    fail(ErrorKind::Validation, "unlabeled runs: " + ids);
                }
                rep = bench::report(applied.records);
            }
            if (report_json)
                fmt::print("{}\n", bench::to_json(rep).dump(2));
            else
                fmt::print("{}", bench::render_table(rep));
            return 0;
        }
        if (*replay)
        {
            auto model = load_model(map_path);
            const auto events =
                service::replay(model, service::load_trace_file(trace_path), service::make_backend(backend_spec), config);
            write_output(out_path, service::to_json_lines(events));
            return 0;
        }
        if (*catalog)
        {
            fmt::print("{}\n", prompt::tool_catalog(prompt::preset(catalog_preset)).dump(2));
            return 0;
        }
        if (*system)
        {
            auto model = load_model(map_path);
            fmt::print("{}", prompt::build_system_instructions(*model, config.preset).text);
            return 0;
        }
    }
    catch (const Error& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return e.kind() == ErrorKind::Validation || e.kind() == ErrorKind::NotFound ? kExitValidation : kExitRuntime;
    }
    catch (const std::exception& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitRuntime;
    }
    return 0;
}
