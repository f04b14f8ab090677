#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "driftpp/core.hpp"
#include "driftpp/knn.hpp"
#include "driftpp/log.hpp"

namespace driftpp {

struct LearnPPConfig {
    std::size_t n_estimators = 3;
    /// Instances per training window. Unset means "one window per chunk"; the
    /// adaptive harness then resizes the window at the start of every chunk.
    std::optional<std::size_t> window_size;
    double error_threshold = 0.5;
    std::size_t max_retries = 10;
    /// Number of most recent window groups kept. Unset keeps everything.
    std::optional<std::size_t> max_window_ensembles;
    KnnConfig knn;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (n_estimators < 1)
            throw ConfigError("n_estimators must be >= 1");
        if (!(error_threshold > 0.0 && error_threshold < 1.0))
            throw ConfigError("error_threshold must lie in (0, 1)");
        if (max_retries < 1)
            throw ConfigError("max_retries must be >= 1");
        if (window_size && *window_size < 1)
            throw ConfigError("window_size must be >= 1");
        if (max_window_ensembles && *max_window_ensembles < 1)
            throw ConfigError("max_window_ensembles must be >= 1");
        knn.validate();
    }
};

/// Sampling weights over a window. Always normalised to sum to one.
class WeightDistribution {
public:
    WeightDistribution() = default;

    static WeightDistribution uniform(std::size_t n)
    {
        if (n == 0)
            throw EmptyWindow();
        WeightDistribution d;
        d.weights_.assign(n, 1.0 / static_cast<double>(n));
        return d;
    }

    /// Normalises non-negative raw weights. Throws if every entry is zero.
    static WeightDistribution from_raw(std::vector<double> raw)
    {
        if (raw.empty())
            throw EmptyWindow();
        double total = 0.0;
        for (double w : raw) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw Error("weights must be finite and non-negative");
            total += w;
        }
        if (!(total > 0.0))
            throw Error("weight distribution has no mass");
        for (double& w : raw)
            w /= total;
        WeightDistribution d;
        d.weights_ = std::move(raw);
        return d;
    }

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t i) const noexcept { return weights_[i]; }
    std::span<const double> weights() const noexcept { return weights_; }
    double sum() const noexcept { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

    friend bool operator==(const WeightDistribution&, const WeightDistribution&) = default;

private:
    std::vector<double> weights_;
};

/// Stand-in for beta when a weak hypothesis makes no weighted error at all.
inline constexpr double kBetaFloor = 1e-10;

struct WeakHypothesis {
    KnnModel model;
    double error = 0.0; // weighted error on its window at acceptance
    double beta = 1.0;
    double vote_weight = 0.0; // ln(1 / beta)
    std::size_t window_ordinal = 0;

    friend bool operator==(const WeakHypothesis&, const WeakHypothesis&) = default;
};

struct VotePrediction {
    ClassLabel label;
    double score; // V(1) / (V(0) + V(1)), 0.5 when no votes
};

inline WeightDistribution init_weights(std::size_t n)
{
    return WeightDistribution::uniform(n);
}

/// Draws ceil(n/2) window positions with replacement, proportional to D.
template <class Rng>
std::vector<std::size_t> sample_training_subset(const WeightDistribution& dist, Rng& rng)
{
    if (dist.size() == 0)
        throw EmptyWindow();
    std::discrete_distribution<std::size_t> pick(dist.weights().begin(), dist.weights().end());
    std::vector<std::size_t> out((dist.size() + 1) / 2);
    for (auto& i : out)
        i = pick(rng);
    return out;
}

/// Sum of D(i) over positions whose prediction disagrees with the truth.
inline double weighted_error(std::span<const ClassLabel> predicted, std::span<const LabeledInstance> window,
                             const WeightDistribution& dist)
{
    if (predicted.size() != window.size() || window.size() != dist.size()) {
        throw DimensionError("weighted error: window of " + std::to_string(window.size()) + ", " +
                             std::to_string(dist.size()) + " weights, " + std::to_string(predicted.size()) +
                             " predictions");
    }
    double e = 0.0;
    for (std::size_t i = 0; i < window.size(); ++i)
        if (predicted[i] != window[i].label)
            e += dist[i];
    return e;
}

inline std::vector<ClassLabel> predict_labels(const KnnModel& model, std::span<const LabeledInstance> window)
{
    std::vector<ClassLabel> out;
    out.reserve(window.size());
    for (const auto& inst : window)
        out.push_back(model.predict(inst.features).label);
    return out;
}

inline double hypothesis_error(const KnnModel& model, std::span<const LabeledInstance> window,
                               const WeightDistribution& dist)
{
    if (window.size() != dist.size())
        throw DimensionError("hypothesis_error: window and distribution sizes differ");
    return weighted_error(predict_labels(model, window), window, dist);
}

/// beta = e / (1 - e), floored at kBetaFloor for a perfect hypothesis.
/// Errors at or above `threshold` must be discarded by the caller; passing one throws.
inline double normalize_error(double e, double threshold = 0.5)
{
    if (!(e >= 0.0) || !(e < threshold))
        throw Error("normalize_error: error " + std::to_string(e) + " outside [0, threshold)");
    return std::max(e / (1.0 - e), kBetaFloor);
}

/// Weighted-majority combination of per-hypothesis labels. Votes for class y are the
/// summed weights of voters predicting y; the argmax keeps the lowest label on ties.
inline VotePrediction combine_votes(std::span<const ClassLabel> labels, std::span<const double> weights)
{
    std::array<double, kNumClasses> votes{};
    for (std::size_t t = 0; t < labels.size(); ++t)
        votes[static_cast<std::size_t>(labels[t].value())] += weights[t];
    std::size_t best = 0;
    for (std::size_t y = 1; y < kNumClasses; ++y)
        if (votes[y] > votes[best])
            best = y;
    const double total = votes[0] + votes[1];
    const double score = total > 0.0 ? votes[1] / total : 0.5;
    return {best == 1 ? ClassLabel::up() : ClassLabel::down(), score};
}

inline VotePrediction composite_vote(std::span<const WeakHypothesis> hypotheses, std::span<const double> x)
{
    if (hypotheses.empty())
        throw EmptyEnsemble();
    std::vector<ClassLabel> labels;
    std::vector<double> weights;
    labels.reserve(hypotheses.size());
    weights.reserve(hypotheses.size());
    for (const auto& h : hypotheses) {
        labels.push_back(h.model.predict(x).label);
        weights.push_back(h.vote_weight);
    }
    return combine_votes(labels, weights);
}

inline double composite_error(std::span<const WeakHypothesis> hypotheses, std::span<const LabeledInstance> window,
                              const WeightDistribution& dist)
{
    if (window.size() != dist.size())
        throw DimensionError("composite_error: window and distribution sizes differ");
    std::vector<ClassLabel> predicted;
    predicted.reserve(window.size());
    for (const auto& inst : window)
        predicted.push_back(composite_vote(hypotheses, inst.features).label);
    return weighted_error(predicted, window, dist);
}

/// B = E / (1 - E) for E in (0, 0.5). Outside that range there is no valid update
/// and nullopt is returned: E == 0 means nothing left to learn, E >= 0.5 means the
/// composite is no better than chance on this window.
inline std::optional<double> normalize_composite_error(double composite)
{
    if (!(composite > 0.0 && composite < 0.5))
        return std::nullopt;
    return composite / (1.0 - composite);
}

/// Scales weights of correctly classified positions by B and renormalises.
inline WeightDistribution update_weights(const WeightDistribution& dist, const std::vector<bool>& correct,
                                         double composite_beta)
{
    if (correct.size() != dist.size())
        throw DimensionError("update_weights: mask and distribution sizes differ");
    if (!(composite_beta > 0.0 && composite_beta < 1.0))
        throw Error("update_weights: B must lie in (0, 1)");
    std::vector<double> raw(dist.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = correct[i] ? dist[i] * composite_beta : dist[i];
    return WeightDistribution::from_raw(std::move(raw));
}

/// One accepted hypothesis and the composite state right after it joined.
struct RoundStep {
    double error;
    double beta;
    double composite_error;
    std::optional<double> composite_beta; // nullopt: weights were left unchanged
    double weight_sum;
    std::size_t composite_misclassified;
};

struct RoundResult {
    std::vector<WeakHypothesis> hypotheses;
    WeightDistribution final_weights;
    std::vector<RoundStep> steps;
    std::size_t discarded = 0; // hypotheses rejected for error >= threshold
    bool stopped_early = false;
    bool skipped = false; // window too small or single-class; nothing trained
};

/// True when the window has at least two instances and both classes.
inline bool trainable_window(std::span<const LabeledInstance> window)
{
    if (window.size() < 2)
        return false;
    const bool first = window.front().label.is_up();
    return std::any_of(window.begin(), window.end(), [&](const auto& i) { return i.label.is_up() != first; });
}

/// Trains up to n_estimators weak hypotheses on one window.
///
/// Each attempt fits a KNN on a weighted resample and scores it on the whole window
/// under the current weights. Attempts at or above the error threshold are thrown
/// away; max_retries consecutive rejections raise RoundFailed. After every acceptance
/// the composite of `prior` plus this round's hypotheses re-weights the window, and
/// the round ends early once that composite makes no mistakes on it.
template <class Rng>
RoundResult run_round(std::span<const LabeledInstance> window, const WeightDistribution& initial,
                      std::span<const WeakHypothesis> prior, const LearnPPConfig& config, Rng& rng,
                      std::size_t window_ordinal = 0)
{
    if (window.empty())
        throw EmptyWindow();
    if (initial.size() != window.size())
        throw DimensionError("run_round: distribution size does not match window");

    RoundResult result;
    result.final_weights = initial;
    if (!trainable_window(window)) {
        result.skipped = true;
        return result;
    }

    const std::size_t n = window.size();
    // Predictions of every voter on the window, cached: voters never change once accepted.
    std::vector<std::vector<ClassLabel>> voter_labels;
    std::vector<double> voter_weights;
    voter_labels.reserve(prior.size() + config.n_estimators);
    for (const auto& h : prior) {
        voter_labels.push_back(predict_labels(h.model, window));
        voter_weights.push_back(h.vote_weight);
    }

    WeightDistribution dist = initial;
    std::size_t consecutive_failures = 0;
    std::vector<LabeledInstance> subset;
    while (result.hypotheses.size() < config.n_estimators) {
        const auto picks = sample_training_subset(dist, rng);
        subset.clear();
        for (auto i : picks)
            subset.push_back(window[i]);
        KnnModel model(config.knn, subset);
        auto predicted = predict_labels(model, window);
        const double e = weighted_error(predicted, window, dist);
        if (e >= config.error_threshold) {
            ++result.discarded;
            if (++consecutive_failures >= config.max_retries) {
                throw RoundFailed("no weak hypothesis below error threshold " +
                                  std::to_string(config.error_threshold) + " after " +
                                  std::to_string(consecutive_failures) + " attempts (last error " +
                                  std::to_string(e) + ")");
            }
            continue;
        }
        consecutive_failures = 0;

        const double beta = normalize_error(e, config.error_threshold);
        result.hypotheses.push_back({std::move(model), e, beta, std::log(1.0 / beta), window_ordinal});
        voter_labels.push_back(std::move(predicted));
        voter_weights.push_back(result.hypotheses.back().vote_weight);

        std::vector<bool> correct(n);
        std::vector<ClassLabel> composite(n);
        std::vector<ClassLabel> column(voter_labels.size());
        std::size_t misclassified = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < voter_labels.size(); ++t)
                column[t] = voter_labels[t][i];
            composite[i] = combine_votes(column, voter_weights).label;
            correct[i] = composite[i] == window[i].label;
            misclassified += correct[i] ? 0U : 1U;
        }
        const double big_e = weighted_error(composite, window, dist);
        const auto big_b = normalize_composite_error(big_e);
        if (big_b)
            dist = update_weights(dist, correct, *big_b);
        result.steps.push_back({e, beta, big_e, big_b, dist.sum(), misclassified});

        if (misclassified == 0) {
            result.stopped_early = result.hypotheses.size() < config.n_estimators;
            break;
        }
    }
    result.final_weights = std::move(dist);
    return result;
}

struct BufferedInstance {
    LabeledInstance instance;
    bool misclassified_online = false;
};

/// Emphasis given, before normalisation, to instances the live model got wrong.
inline constexpr double kMisclassifiedEmphasis = 2.0;

/// Starting weights for a buffered window: online mistakes count double.
inline WeightDistribution online_window_weights(std::span<const BufferedInstance> buffer)
{
    std::vector<double> raw;
    raw.reserve(buffer.size());
    for (const auto& b : buffer)
        raw.push_back(b.misclassified_online ? kMisclassifiedEmphasis : 1.0);
    return WeightDistribution::from_raw(std::move(raw));
}

/// Incremental Learn++ ensemble.
///
/// Instances arrive one at a time through partial_fit and are buffered until a full
/// window is available; each full window runs one training round whose hypotheses
/// join the ensemble. Older window groups are pruned when max_window_ensembles is set.
/// Not thread-safe for writers: serialise partial_fit externally.
class LearnPPModel {
public:
    explicit LearnPPModel(LearnPPConfig config) : config_(std::move(config)), rng_(config_.seed)
    {
        config_.validate();
        window_size_ = config_.window_size;
    }

    /// Rebuilds a model around existing hypotheses (grouped by window ordinal).
    static LearnPPModel restore(LearnPPConfig config, std::vector<WeakHypothesis> hypotheses)
    {
        LearnPPModel m(std::move(config));
        m.hypotheses_ = std::move(hypotheses);
        if (!m.hypotheses_.empty()) {
            m.dim_ = m.hypotheses_.front().model.dimensionality();
            m.windows_completed_ = m.hypotheses_.back().window_ordinal + 1;
        }
        return m;
    }

    const LearnPPConfig& config() const noexcept { return config_; }
    std::span<const WeakHypothesis> hypotheses() const noexcept { return hypotheses_; }
    std::span<const BufferedInstance> buffer() const noexcept { return buffer_; }
    std::size_t windows_completed() const noexcept { return windows_completed_; }
    std::size_t skipped_windows() const noexcept { return skipped_windows_; }
    std::optional<std::size_t> window_size() const noexcept { return window_size_; }
    std::optional<std::size_t> dimensionality() const noexcept { return dim_; }
    const std::optional<RoundResult>& last_round() const noexcept { return last_round_; }

    /// Resizes the training window; a buffer already at the new size trains immediately.
    void set_window_size(std::size_t n)
    {
        if (n < 1)
            throw ConfigError("window_size must be >= 1");
        window_size_ = n;
        if (buffer_.size() >= n)
            train_buffer();
    }

    VotePrediction predict(std::span<const double> x) const
    {
        if (hypotheses_.empty())
            throw EmptyEnsemble();
        return composite_vote(hypotheses_, x);
    }

    /// Trains one round over a complete window with the given starting weights.
    void fit_window(std::span<const LabeledInstance> window, const WeightDistribution& initial)
    {
        check_dimensionality(window);
        auto round = run_round(window, initial, std::span<const WeakHypothesis>(hypotheses_), config_, rng_,
                               windows_completed_);
        if (round.skipped) {
            ++skipped_windows_;
            log::logger().warn("dropping window of {} instances: a trainable window needs both classes",
                               window.size());
        } else {
            for (auto& h : round.hypotheses)
                hypotheses_.push_back(std::move(h));
            round.hypotheses.clear();
            ++windows_completed_;
            prune();
        }
        last_round_ = std::move(round);
    }

    /// Buffers one labelled instance; a full buffer triggers a training round.
    /// On RoundFailed the buffer is kept so the caller can resize or clear it.
    void partial_fit(const LabeledInstance& instance, bool was_correct)
    {
        if (!window_size_)
            throw ConfigError("partial_fit needs a window size");
        if (dim_ && instance.features.size() != *dim_) {
            throw DimensionError("partial_fit: instance has " + std::to_string(instance.features.size()) +
                                 " features, model expects " + std::to_string(*dim_));
        }
        buffer_.push_back({instance, !was_correct});
        peak_buffer_ = std::max(peak_buffer_, buffer_.size());
        if (buffer_.size() >= *window_size_)
            train_buffer();
    }

    void clear_buffer() noexcept { buffer_.clear(); }

    /// Largest buffer length observed, including the instant before a round fires.
    std::size_t peak_buffer() const noexcept { return peak_buffer_; }

private:
    void train_buffer()
    {
        std::vector<LabeledInstance> window;
        window.reserve(buffer_.size());
        for (const auto& b : buffer_)
            window.push_back(b.instance);
        fit_window(window, online_window_weights(buffer_));
        buffer_.clear();
    }

    void check_dimensionality(std::span<const LabeledInstance> window)
    {
        for (const auto& inst : window) {
            if (!dim_)
                dim_ = inst.features.size();
            if (inst.features.size() != *dim_)
                throw DimensionError("window instance dimensionality does not match the model");
        }
    }

    void prune()
    {
        if (!config_.max_window_ensembles || hypotheses_.empty())
            return;
        const std::size_t newest = hypotheses_.back().window_ordinal;
        const std::size_t keep = *config_.max_window_ensembles;
        if (newest + 1 <= keep)
            return;
        const std::size_t oldest_kept = newest + 1 - keep;
        std::erase_if(hypotheses_, [&](const WeakHypothesis& h) { return h.window_ordinal < oldest_kept; });
    }

    LearnPPConfig config_;
    std::mt19937_64 rng_;
    std::optional<std::size_t> window_size_;
    std::optional<std::size_t> dim_;
    std::vector<WeakHypothesis> hypotheses_;
    std::vector<BufferedInstance> buffer_;
    std::size_t windows_completed_ = 0;
    std::size_t skipped_windows_ = 0;
    std::size_t peak_buffer_ = 0;
    std::optional<RoundResult> last_round_;
};

} // namespace driftpp
