#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftpp/adaptive.hpp"
#include "driftpp/data.hpp"

namespace driftpp {

// reports.csv: one row per chunk, initial chunk first.
inline constexpr const char* kReportsHeader = "chunk_id,f1,auc,fnr,correct,incorrect,percent_correct,drift_alarm";

inline void format_reports_csv(std::span<const ChunkReport> reports, std::ostream& out)
{
    out << kReportsHeader << '\n';
    for (const auto& r : reports) {
        out << r.chunk_id << ',' << detail::format_double(r.f1) << ','
            << (r.auc ? detail::format_double(*r.auc) : std::string()) << ',' << detail::format_double(r.fnr) << ','
            << r.correct_count << ',' << r.incorrect_count << ',' << detail::format_double(r.percent_correct) << ','
            << (r.drift_alarm ? "true" : "false") << '\n';
    }
}

inline nlohmann::json to_json(const PredictionRecord& r)
{
    return {{"chunk_id", r.chunk_id},
            {"index", r.index},
            {"truth", r.truth.value()},
            {"predicted", r.predicted.value()},
            {"score", r.score}};
}

inline nlohmann::json to_json(const ChunkReport& r)
{
    nlohmann::json j{{"chunk_id", r.chunk_id},
                     {"initial", r.initial},
                     {"f1", r.f1},
                     {"auc", r.auc ? nlohmann::json(*r.auc) : nlohmann::json(nullptr)},
                     {"fnr", r.fnr},
                     {"correct", r.correct_count},
                     {"incorrect", r.incorrect_count},
                     {"percent_correct", r.percent_correct},
                     {"drift_alarm", r.drift_alarm}};
    if (r.error)
        j["error"] = *r.error;
    return j;
}

inline void format_records_jsonl(std::span<const PredictionRecord> records, std::ostream& out)
{
    for (const auto& r : records)
        out << to_json(r).dump() << '\n';
}

inline void format_events_jsonl(std::span<const ChunkReport> reports, std::ostream& out)
{
    for (const auto& r : reports)
        out << to_json(r).dump() << '\n';
}

/// Parses records.jsonl. Blank lines are skipped; anything else malformed throws
/// ParseError carrying its 1-based line number.
inline std::vector<PredictionRecord> parse_records_jsonl(std::istream& in)
{
    std::vector<PredictionRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty())
            continue;
        try {
            const auto j = nlohmann::json::parse(line);
            PredictionRecord r;
            r.chunk_id = j.at("chunk_id").get<std::string>();
            r.index = j.at("index").get<std::size_t>();
            r.truth = ClassLabel::from_int(j.at("truth").get<long long>());
            r.predicted = ClassLabel::from_int(j.at("predicted").get<long long>());
            r.score = j.at("score").get<double>();
            out.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
    }
    return out;
}

/// Rebuilds per-chunk reports from prediction records, chunks in first-seen order.
/// The first chunk is taken to be the pre-training chunk.
inline std::vector<ChunkReport> reports_from_records(std::span<const PredictionRecord> records, double drift_f1_drop,
                                                     std::size_t baseline_window)
{
    std::vector<std::string> order;
    std::vector<std::vector<PredictionRecord>> groups;
    for (const auto& r : records) {
        std::size_t g = 0;
        while (g < order.size() && order[g] != r.chunk_id)
            ++g;
        if (g == order.size()) {
            order.push_back(r.chunk_id);
            groups.emplace_back();
        }
        groups[g].push_back(r);
    }
    std::vector<ChunkReport> reports;
    for (std::size_t g = 0; g < order.size(); ++g) {
        reports.push_back(summarize(order[g], groups[g]));
        reports.back().initial = g == 0;
    }
    const auto alarms = evaluate_drift_alarms(reports, drift_f1_drop, baseline_window);
    for (std::size_t i = 0; i < reports.size(); ++i)
        reports[i].drift_alarm = alarms[i];
    return reports;
}

template <class Writer>
void write_text_file(const std::filesystem::path& path, Writer&& writer)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    writer(out);
    out.flush();
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace driftpp
