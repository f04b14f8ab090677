#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "driftpp/core.hpp"
#include "driftpp/learnpp.hpp"
#include "driftpp/log.hpp"
#include "driftpp/metrics.hpp"
#include "driftpp/reduce.hpp"

namespace driftpp {

/// How each chunk is brought down to `pc_count` features before learning.
enum class Reduction {
    pca,   // fit PCA on the chunk, keep the first pc_count component scores
    slice, // keep the first pc_count columns as-is (input already reduced)
    none,  // use every column; pc_count is ignored
};

struct RunConfig {
    LearnPPConfig learnpp;
    std::size_t pc_count = 75;
    Reduction reduction = Reduction::pca;
    bool standardize = true; // per-chunk z-scoring after reduction
    double drift_f1_drop = 0.2;
    std::size_t drift_baseline_window = 3;

    void validate() const
    {
        learnpp.validate();
        if (pc_count < 1)
            throw ConfigError("pc_count must be >= 1");
        if (!(drift_f1_drop > 0.0 && drift_f1_drop < 1.0))
            throw ConfigError("drift_f1_drop must lie in (0, 1)");
        if (drift_baseline_window < 1)
            throw ConfigError("drift_baseline_window must be >= 1");
    }
};

struct ChunkReport {
    std::string chunk_id;
    double f1 = 0.0;
    std::optional<double> auc; // unset when the chunk holds a single class
    double fnr = 0.0;
    std::size_t correct_count = 0;
    std::size_t incorrect_count = 0;
    double percent_correct = 0.0; // fraction in [0, 1]
    bool drift_alarm = false;
    bool initial = false;            // training-set report of the pre-trained model
    std::optional<std::string> error; // set when processing stopped part-way

    std::size_t size() const noexcept { return correct_count + incorrect_count; }

    friend bool operator==(const ChunkReport&, const ChunkReport&) = default;
};

/// Metrics over one chunk's prediction records. The drift alarm is left unset.
inline ChunkReport summarize(std::string chunk_id, std::span<const PredictionRecord> records)
{
    ChunkReport r;
    r.chunk_id = std::move(chunk_id);
    const auto counts = confusion(records);
    r.f1 = f1(counts);
    r.fnr = fnr(counts);
    r.correct_count = counts.correct();
    r.incorrect_count = counts.incorrect();
    r.percent_correct = counts.total() == 0 ? 0.0
                                            : static_cast<double>(counts.correct()) / static_cast<double>(counts.total());
    try {
        r.auc = auc(records);
    } catch (const UndefinedAUC&) {
        r.auc.reset();
    }
    return r;
}

/// Recomputes every alarm from the report sequence alone.
///
/// A non-empty adaptive chunk alarms when its F1 falls more than drift_f1_drop below
/// the mean F1 of up to drift_baseline_window preceding non-empty adaptive chunks.
/// Initial (training-set) reports never alarm and never enter the baseline.
inline std::vector<bool> evaluate_drift_alarms(std::span<const ChunkReport> reports, double drift_f1_drop,
                                               std::size_t baseline_window)
{
    std::vector<bool> alarms(reports.size(), false);
    std::vector<double> history;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        if (r.initial || r.size() == 0)
            continue;
        if (!history.empty()) {
            const std::size_t m = std::min(baseline_window, history.size());
            double mean = 0.0;
            for (std::size_t j = history.size() - m; j < history.size(); ++j)
                mean += history[j];
            mean /= static_cast<double>(m);
            alarms[i] = r.f1 < mean - drift_f1_drop;
        }
        history.push_back(r.f1);
    }
    return alarms;
}

/// Validates a raw chunk and applies the configured reduction and scaling.
inline Chunk prepare_chunk(const Chunk& chunk, const RunConfig& config)
{
    const auto check = validate_chunk(chunk);
    if (!check) {
        const auto& v = check.violations.front();
        throw DimensionError("chunk " + chunk.id + " is invalid at row " + std::to_string(v.row) + ": " + v.reason);
    }
    if (chunk.empty()) {
        Chunk out = chunk;
        if (config.reduction != Reduction::none)
            out.dimensionality = config.pc_count;
        return out;
    }
    Chunk reduced;
    switch (config.reduction) {
    case Reduction::pca:
        reduced = pca_reduce(chunk, config.pc_count);
        break;
    case Reduction::slice:
        reduced = slice_features(chunk, config.pc_count);
        break;
    case Reduction::none:
        reduced = chunk;
        break;
    }
    return config.standardize ? standardize(reduced) : reduced;
}

struct PretrainResult {
    LearnPPModel model;
    ChunkReport report;
    std::vector<PredictionRecord> records;
};

/// Builds the initial model with one full-window round over the initial chunk
/// (uniform weights) and reports its performance on that same chunk.
inline PretrainResult pretrain(const Chunk& initial, const RunConfig& config)
{
    config.validate();
    if (!trainable_window(initial.instances))
        throw PretrainFailed("initial chunk " + initial.id + " needs at least two instances of both classes");
    const Chunk prepared = prepare_chunk(initial, config);
    LearnPPModel model(config.learnpp);
    try {
        model.fit_window(prepared.instances, init_weights(prepared.size()));
    } catch (const RoundFailed& e) {
        throw PretrainFailed(std::string("pre-training failed: ") + e.what());
    }
    if (model.hypotheses().empty())
        throw PretrainFailed("pre-training produced no hypotheses");

    std::vector<PredictionRecord> records;
    records.reserve(prepared.size());
    for (const auto& inst : prepared.instances) {
        const auto p = model.predict(inst.features);
        records.push_back({initial.id, inst.index, inst.label, p.label, p.score});
    }
    ChunkReport report = summarize(initial.id, records);
    report.initial = true;
    log::logger().info("pre-trained on {} ({} instances, {} hypotheses, F1 {:.4f})", initial.id, initial.size(),
                       model.hypotheses().size(), report.f1);
    return {std::move(model), std::move(report), std::move(records)};
}

struct ChunkOutcome {
    ChunkReport report;
    std::vector<PredictionRecord> records;
};

/// Test-then-train pass over one chunk.
///
/// Every instance is predicted by the current model before its label is used, then
/// handed to partial_fit together with whether that prediction was right. `history`
/// holds the reports of earlier chunks and feeds the drift alarm. A RoundFailed
/// stops the pass; the report then covers the instances seen so far and carries the
/// error text.
inline ChunkOutcome process_chunk(LearnPPModel& model, const Chunk& chunk, const RunConfig& config,
                                  std::span<const ChunkReport> history = {})
{
    const Chunk prepared = prepare_chunk(chunk, config);
    if (!config.learnpp.window_size && !prepared.empty())
        model.set_window_size(prepared.size());

    ChunkOutcome out;
    out.records.reserve(prepared.size());
    for (const auto& inst : prepared.instances) {
        const auto p = model.predict(inst.features);
        out.records.push_back({chunk.id, inst.index, inst.label, p.label, p.score});
        try {
            model.partial_fit(inst, p.label == inst.label);
        } catch (const RoundFailed& e) {
            out.report = summarize(chunk.id, out.records);
            out.report.error = e.what();
            log::logger().error("chunk {}: {}", chunk.id, e.what());
            return out;
        }
    }
    out.report = summarize(chunk.id, out.records);

    std::vector<ChunkReport> sequence(history.begin(), history.end());
    sequence.push_back(out.report);
    out.report.drift_alarm =
        evaluate_drift_alarms(sequence, config.drift_f1_drop, config.drift_baseline_window).back();
    log::logger().info("chunk {}: F1 {:.4f}, {} / {} correct{}", chunk.id, out.report.f1, out.report.correct_count,
                       out.report.size(), out.report.drift_alarm ? ", drift alarm" : "");
    return out;
}

struct ExperimentResult {
    std::vector<ChunkReport> reports; // initial report first
    std::vector<PredictionRecord> records;
    std::optional<LearnPPModel> model;
    std::optional<std::string> error; // first chunk-level failure, if any

    bool any_drift_alarm() const noexcept
    {
        for (const auto& r : reports)
            if (r.drift_alarm)
                return true;
        return false;
    }
};

/// Pre-trains on `initial`, then processes `chunks` in order. Stops at the first
/// chunk whose processing fails.
inline ExperimentResult run_experiment(const Chunk& initial, std::span<const Chunk> chunks, const RunConfig& config)
{
    std::set<std::string> ids{initial.id};
    for (const auto& c : chunks)
        if (!ids.insert(c.id).second)
            throw ConfigError("duplicate chunk id " + c.id);

    auto pre = pretrain(initial, config);
    ExperimentResult result;
    result.reports.push_back(std::move(pre.report));
    result.records = std::move(pre.records);
    LearnPPModel model = std::move(pre.model);
    for (const auto& chunk : chunks) {
        auto outcome = process_chunk(model, chunk, config, result.reports);
        result.records.insert(result.records.end(), outcome.records.begin(), outcome.records.end());
        const bool failed = outcome.report.error.has_value();
        if (failed)
            result.error = "chunk " + chunk.id + ": " + *outcome.report.error;
        result.reports.push_back(std::move(outcome.report));
        if (failed)
            break;
    }
    result.model = std::move(model);
    return result;
}

} // namespace driftpp
