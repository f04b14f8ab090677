#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "driftpp/core.hpp"

namespace driftpp {

/// Confusion matrix with class 1 (UP) as the positive class.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    std::size_t correct() const noexcept { return tp + tn; }
    std::size_t incorrect() const noexcept { return fp + fn; }

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(std::span<const PredictionRecord> records)
{
    ConfusionCounts c;
    for (const auto& r : records) {
        if (r.truth.is_up())
            ++(r.predicted.is_up() ? c.tp : c.fn);
        else
            ++(r.predicted.is_up() ? c.fp : c.tn);
    }
    return c;
}

/// Harmonic mean of precision and recall; 0 when there are no true positives.
inline double f1(const ConfusionCounts& c) noexcept
{
    if (c.tp == 0)
        return 0.0;
    const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    return 2.0 * precision * recall / (precision + recall);
}

/// fn / (fn + tp); 0 when there are no positives.
inline double fnr(const ConfusionCounts& c) noexcept
{
    const std::size_t positives = c.fn + c.tp;
    return positives == 0 ? 0.0 : static_cast<double>(c.fn) / static_cast<double>(positives);
}

/// Mann-Whitney estimate of P(score of a positive > score of a negative), ties
/// counting one half, computed from mid-ranks in O(n log n).
inline double auc(std::span<const PredictionRecord> records)
{
    const std::size_t n = records.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return records[a].score < records[b].score; });

    double positive_rank_sum = 0.0;
    std::size_t positives = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && records[order[j]].score == records[order[i]].score)
            ++j;
        // Ranks are 1-based; the tied group [i, j) shares the mean rank.
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) {
            if (records[order[k]].truth.is_up()) {
                positive_rank_sum += mid_rank;
                ++positives;
            }
        }
        i = j;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0)
        throw UndefinedAUC();
    const double np = static_cast<double>(positives);
    const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * static_cast<double>(negatives));
}

} // namespace driftpp
