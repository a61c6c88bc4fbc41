// SPDX-License-Identifier: Apache-2.0
#include "mapio/benchmark.hpp"

#include "mapio/error.hpp"
#include "json_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <thread>

namespace mapio::bench {

using nlohmann::json;

std::string_view to_string(QueryClass c)
{
    switch (c)
    {
        case QueryClass::Landmark: return "landmark";
        case QueryClass::Route: return "route";
        case QueryClass::Survey: return "survey";
    }
    return "landmark";
}

namespace {

QueryClass parse_class(const std::string& text, const std::string& path)
{
    if (text == "landmark")
        return QueryClass::Landmark;
    if (text == "route")
        return QueryClass::Route;
    if (text == "survey")
        return QueryClass::Survey;
    detail::schema_error(path, "class must be landmark, route or survey");
}

std::string_view labeler_name(Labeler l)
{
    return l == Labeler::Human ? "human" : "heuristic";
}

} // namespace

std::vector<BenchmarkQuery> load_benchmark(std::istream& in)
{
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        fail(ErrorKind::Validation, "benchmark: not valid JSON");
    const json& list = doc.is_object() ? detail::require(doc, "queries", "") : doc;
    const std::string root = doc.is_object() ? "/queries" : "";
    detail::as_array(list, root);

    std::vector<BenchmarkQuery> out;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < list.size(); ++i)
    {
        const json& r = list[i];
        std::string path = detail::child(root, i);
        BenchmarkQuery q;
        q.id = detail::as_string(detail::require(r, "id", path), detail::child(path, "id"));
        path += " (" + q.id + ")";
        if (q.id.empty())
            detail::schema_error(path, "id must not be empty");
        if (!ids.insert(q.id).second)
            detail::schema_error(path, "duplicate id");
        q.user_prompt = detail::as_string(detail::require(r, "prompt", path), detail::child(path, "prompt"));
        q.expected_answer =
            detail::as_string(detail::require(r, "expected_answer", path), detail::child(path, "expected_answer"));
        if (q.expected_answer.empty())
            detail::schema_error(detail::child(path, "expected_answer"), "must not be empty");
        q.query_class =
            parse_class(detail::as_string(detail::require(r, "class", path), detail::child(path, "class")),
                        detail::child(path, "class"));
        if (const json* ctx = detail::optional_field(r, "context"))
        {
            const auto cpath = detail::child(path, "context");
            if (const json* pos = detail::optional_field(*ctx, "position"))
                q.context.position = detail::as_point(*pos, detail::child(cpath, "position"));
            if (const json* t = detail::optional_field(*ctx, "time"))
            {
                try
                {
                    q.context.time = parse_wall_time(detail::as_string(*t, detail::child(cpath, "time")));
                }
                catch (const Error& e)
                {
                    detail::schema_error(detail::child(cpath, "time"), e.what());
                }
            }
        }
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<BenchmarkQuery> load_benchmark_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::NotFound, "cannot open benchmark " + path);
    return load_benchmark(in);
}

json to_json(const RunRecord& r)
{
    json j = {{"query_id", r.query_id},
              {"preset", r.preset},
              {"system_hash", r.system_hash},
              {"transcript", r.transcript},
              {"answer", r.answer},
              {"heuristic",
               {{"suggested", to_string(r.heuristic.suggested)},
                {"needs_review", r.heuristic.needs_review},
                {"reason", r.heuristic.reason}}}};
    j["error"] = r.error ? json(*r.error) : json(nullptr);
    j["label"] = r.label ? json(to_string(*r.label)) : json(nullptr);
    j["labeler"] = r.labeler ? json(labeler_name(*r.labeler)) : json(nullptr);
    return j;
}

RunRecord record_from_json(const json& doc)
{
    RunRecord r;
    const std::string path = "/record";
    r.query_id = detail::as_string(detail::require(doc, "query_id", path), path + "/query_id");
    r.preset = detail::require(doc, "preset", path).get<int>();
    r.system_hash = detail::string_or(doc, "system_hash", path);
    r.transcript = doc.value("transcript", json::object());
    r.answer = detail::string_or(doc, "answer", path);
    if (const json* e = detail::optional_field(doc, "error"))
        r.error = e->get<std::string>();
    if (const json* h = detail::optional_field(doc, "heuristic"))
    {
        r.heuristic.suggested = parse_label(h->at("suggested").get<std::string>());
        r.heuristic.needs_review = h->value("needs_review", true);
        r.heuristic.reason = h->value("reason", std::string());
    }
    if (const json* l = detail::optional_field(doc, "label"))
        r.label = parse_label(l->get<std::string>());
    if (const json* l = detail::optional_field(doc, "labeler"))
        r.labeler = l->get<std::string>() == "human" ? Labeler::Human : Labeler::Heuristic;
    return r;
}

json records_to_json(std::span<const RunRecord> records)
{
    json out = json::array();
    for (const auto& r : records)
        out.push_back(to_json(r));
    return out;
}

std::vector<RunRecord> records_from_json(const json& doc)
{
    detail::as_array(doc, "");
    std::vector<RunRecord> out;
    for (const auto& r : doc)
        out.push_back(record_from_json(r));
    return out;
}

std::vector<RunRecord> run(std::span<const BenchmarkQuery> queries, int preset, std::shared_ptr<const MapModel> model,
                           const BackendFactory& backends, const RunOptions& options)
{
    const auto system_hash = prompt::build_system_instructions(*model, preset).hash();
    std::vector<RunRecord> records(queries.size());

    const auto one = [&](std::size_t i) {
        const auto& q = queries[i];
        RunRecord& r = records[i];
        r.query_id = q.id;
        r.preset = preset;
        r.system_hash = system_hash;
        try
        {
            prompt::Conversation conv(model, preset, backends(q), options.conversation);
            auto turn = conv.converse(q.user_prompt, q.context.position, q.context.time);
            r.answer = turn.answer;
            r.transcript = std::move(turn.transcript);
        }
        catch (const Error& e)
        {
            r.error = e.what();
            r.transcript = {{"error", e.what()}};
        }
        r.heuristic = prompt::classify_heuristic(r.answer, q.expected_answer);
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(queries.size())));
    if (jobs <= 1)
    {
        for (std::size_t i = 0; i < queries.size(); ++i)
            one(i);
    }
    else
    {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j)
        {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < queries.size(); i = next++)
                    one(i);
            });
        }
        for (auto& t : pool)
            t.join();
    }

    std::sort(records.begin(), records.end(),
              [](const RunRecord& a, const RunRecord& b) { return a.query_id < b.query_id; });
    return records;
}

std::map<std::string, Label> load_labels(std::istream& in)
{
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded())
        fail(ErrorKind::Validation, "labels: not valid JSON");
    const json& table = doc.contains("labels") ? doc["labels"] : doc;
    if (!table.is_object())
        fail(ErrorKind::Validation, "labels: expected an object mapping query id to label");
    std::map<std::string, Label> out;
    for (const auto& [id, value] : table.items())
    {
        if (!value.is_string())
            detail::schema_error("/labels/" + id, "expected a label name");
        try
        {
            out[id] = parse_label(value.get<std::string>());
        }
        catch (const Error& e)
        {
            detail::schema_error("/labels/" + id, e.what());
        }
    }
    return out;
}

std::map<std::string, Label> load_labels_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorKind::NotFound, "cannot open labels " + path);
    return load_labels(in);
}

LabelApplication apply_labels(std::vector<RunRecord> records, const std::map<std::string, Label>& labels,
                              bool accept_heuristic)
{
    LabelApplication out;
    for (auto& r : records)
    {
        if (auto it = labels.find(r.query_id); it != labels.end())
        {
            r.label = it->second;
            r.labeler = Labeler::Human;
        }
        else if (accept_heuristic && !r.label)
        {
            r.label = r.heuristic.suggested;
            r.labeler = Labeler::Heuristic;
        }
        if (!r.label)
            out.unlabeled.push_back(r.query_id);
    }
    out.records = std::move(records);
    return out;
}

int percent_hundredths(int count, int n)
{
    if (n <= 0)
        fail(ErrorKind::Validation, "percentages need a positive total");
    if (count < 0 || count > n)
        fail(ErrorKind::Validation, fmt::format("count {} outside 0..{}", count, n));
    const long long num = static_cast<long long>(count) * 10000 * 2 + n;
    return static_cast<int>(num / (2LL * n));
}

std::string format_percent(int hundredths)
{
    return fmt::format("{}.{:02d}", hundredths / 100, hundredths % 100);
}

Report report_from_counts(const std::array<int, 6>& counts, int preset)
{
    Report r;
    r.preset = preset;
    for (int c : counts)
    {
        if (c < 0)
            fail(ErrorKind::Validation, "counts must be non-negative");
        r.n += c;
    }
    for (std::size_t i = 0; i < kAllLabels.size(); ++i)
    {
        r.categories[i].label = kAllLabels[i];
        r.categories[i].count = counts[i];
        r.categories[i].hundredths = percent_hundredths(counts[i], r.n);
    }
    return r;
}

Report report(std::span<const RunRecord> records)
{
    if (records.empty())
        fail(ErrorKind::Validation, "cannot report over zero records");
    std::array<int, 6> counts{};
    const int preset = records.front().preset;
    for (const auto& r : records)
    {
        if (!r.label)
            fail(ErrorKind::Validation, "record " + r.query_id + " has no label");
        if (r.preset != preset)
            fail(ErrorKind::Validation, "records mix presets");
        ++counts[static_cast<std::size_t>(*r.label)];
    }
    return report_from_counts(counts, preset);
}

std::string render_table(const Report& r)
{
    std::string out = "| Iteration |";
    std::string rule = "|---|";
    for (Label l : kAllLabels)
    {
        out += fmt::format(" {} |", short_code(l));
        rule += "---:|";
    }
    out += "\n" + rule + "\n" + fmt::format("| {} |", r.preset);
    for (const auto& c : r.categories)
        out += fmt::format(" {} |", format_percent(c.hundredths));
    return out + "\n";
}

json to_json(const Report& r)
{
    json cats = json::array();
    for (const auto& c : r.categories)
    {
        cats.push_back({{"label", to_string(c.label)},
                        {"code", short_code(c.label)},
                        {"count", c.count},
                        {"percent", format_percent(c.hundredths)}});
    }
    return {{"preset", r.preset}, {"n", r.n}, {"categories", cats}};
}

} // namespace mapio::bench
