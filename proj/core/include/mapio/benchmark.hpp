// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mapio/chat.hpp"
#include "mapio/conversation.hpp"
#include "mapio/label.hpp"
#include "mapio/map_model.hpp"
#include "mapio/time.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mapio::bench {

enum class QueryClass { Landmark, Route, Survey };

std::string_view to_string(QueryClass c);

struct QueryContext
{
    std::optional<Point2D> position;
    WallTime time;
};

struct BenchmarkQuery
{
    std::string id;
    std::string user_prompt;
    QueryContext context;
    std::string expected_answer;
    QueryClass query_class = QueryClass::Landmark;
};

/// JSON array of queries; errors name the offending record.
std::vector<BenchmarkQuery> load_benchmark(std::istream& in);
std::vector<BenchmarkQuery> load_benchmark_file(const std::string& path);

enum class Labeler { Human, Heuristic };

struct RunRecord
{
    std::string query_id;
    int preset = 8;
    std::string system_hash;
    nlohmann::json transcript;
    std::string answer;
    std::optional<std::string> error; // pipeline failure for this query
    prompt::HeuristicVerdict heuristic;
    std::optional<Label> label;
    std::optional<Labeler> labeler;
};

nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& doc);
nlohmann::json records_to_json(std::span<const RunRecord> records);
std::vector<RunRecord> records_from_json(const nlohmann::json& doc);

/// A fresh backend per query, so queries are independent.
using BackendFactory = std::function<std::shared_ptr<prompt::ChatBackend>(const BenchmarkQuery&)>;

struct RunOptions
{
    unsigned jobs = 1;
    prompt::ConversationConfig conversation;
};

/// One record per query, ordered by query id.
std::vector<RunRecord> run(std::span<const BenchmarkQuery> queries, int preset, std::shared_ptr<const MapModel> model,
                           const BackendFactory& backends, const RunOptions& options = {});

/// id -> label document.
std::map<std::string, Label> load_labels(std::istream& in);
std::map<std::string, Label> load_labels_file(const std::string& path);

struct LabelApplication
{
    std::vector<RunRecord> records;
    std::vector<std::string> unlabeled; // ids still without a label
};

/// Human labels replace any prior label; with `accept_heuristic` the remaining records
/// take the heuristic suggestion.
LabelApplication apply_labels(std::vector<RunRecord> records, const std::map<std::string, Label>& labels,
                              bool accept_heuristic = false);

/// Half-up rounding of count / n to hundredths of a percent.
int percent_hundredths(int count, int n);
std::string format_percent(int hundredths); // "94.74"

struct CategoryResult
{
    Label label = Label::Correct;
    int count = 0;
    int hundredths = 0;
};

struct Report
{
    int preset = 0;
    int n = 0;
    std::array<CategoryResult, 6> categories{};

    const CategoryResult& at(Label l) const { return categories[static_cast<std::size_t>(l)]; }
};

Report report_from_counts(const std::array<int, 6>& counts, int preset);
/// Throws Validation unless every record is labeled.
Report report(std::span<const RunRecord> records);

std::string render_table(const Report& r);
nlohmann::json to_json(const Report& r);

} // namespace mapio::bench
