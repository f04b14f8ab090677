#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "driftpp/core.hpp"

namespace driftpp {

struct KnnConfig {
    std::size_t k = 3;
    double p = 2.0; // Minkowski power; 2 is Euclidean

    void validate() const
    {
        if (k < 1)
            throw ConfigError("knn k must be >= 1");
        if (!(p >= 1.0) || !std::isfinite(p))
            throw ConfigError("knn p must be a finite value >= 1");
    }

    friend bool operator==(const KnnConfig&, const KnnConfig&) = default;
};

namespace detail {

// p = 1 and p = 2 get exact fast paths; every caller ranks neighbours by this value.
inline double minkowski_unchecked(const double* a, const double* b, std::size_t n, double p) noexcept
{
    double acc = 0.0;
    if (p == 2.0) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = a[i] - b[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    if (p == 1.0) {
        for (std::size_t i = 0; i < n; ++i)
            acc += std::abs(a[i] - b[i]);
        return acc;
    }
    for (std::size_t i = 0; i < n; ++i)
        acc += std::pow(std::abs(a[i] - b[i]), p);
    return std::pow(acc, 1.0 / p);
}

} // namespace detail

inline double minkowski_distance(std::span<const double> a, std::span<const double> b, double p)
{
    if (a.size() != b.size()) {
        throw DimensionError("minkowski_distance: lengths " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()) + " differ");
    }
    if (!(p >= 1.0))
        throw ConfigError("minkowski_distance: p must be >= 1");
    return detail::minkowski_unchecked(a.data(), b.data(), a.size(), p);
}

struct KnnPrediction {
    ClassLabel label;
    double score; // fraction of class-1 labels among the neighbours
};

/// Lazy k-nearest-neighbour classifier. Stores its training pairs verbatim and
/// answers queries with an exhaustive linear scan.
///
/// Fewer stored points than k: all of them vote. Equal distances are ordered by
/// stored position. A 0.5 vote share predicts class 0.
class KnnModel {
public:
    KnnModel() = default;

    KnnModel(KnnConfig config, std::span<const LabeledInstance> data) : config_(config)
    {
        config_.validate();
        if (data.empty())
            throw EmptyTrainingSet();
        dim_ = data.front().features.size();
        points_.reserve(data.size() * dim_);
        labels_.reserve(data.size());
        for (const auto& inst : data)
            add_point(inst.features, inst.label);
    }

    const KnnConfig& config() const noexcept { return config_; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t dimensionality() const noexcept { return dim_; }
    bool empty() const noexcept { return labels_.empty(); }

    std::span<const double> point(std::size_t i) const noexcept
    {
        return {points_.data() + i * dim_, dim_};
    }
    ClassLabel label(std::size_t i) const noexcept { return labels_[i]; }

    /// Stored-point positions of the min(k, size) nearest neighbours, nearest first.
    std::vector<std::size_t> neighbours(std::span<const double> x) const
    {
        check_query(x);
        const std::size_t m = std::min(config_.k, labels_.size());
        // (distance, position) kept sorted; lexicographic order realises the tie rule.
        std::vector<std::pair<double, std::size_t>> best;
        best.reserve(m + 1);
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            const double dist = detail::minkowski_unchecked(x.data(), points_.data() + i * dim_, dim_, config_.p);
            if (best.size() == m && !(dist < best.back().first))
                continue;
            auto it = std::upper_bound(best.begin(), best.end(), std::make_pair(dist, i));
            best.insert(it, {dist, i});
            if (best.size() > m)
                best.pop_back();
        }
        std::vector<std::size_t> out;
        out.reserve(best.size());
        for (const auto& [dist, i] : best)
            out.push_back(i);
        return out;
    }

    KnnPrediction predict(std::span<const double> x) const
    {
        const auto nn = neighbours(x);
        std::size_t ups = 0;
        for (auto i : nn)
            ups += labels_[i].is_up() ? 1U : 0U;
        const double score = static_cast<double>(ups) / static_cast<double>(nn.size());
        return {label_for_score(score), score};
    }

    friend bool operator==(const KnnModel&, const KnnModel&) = default;

private:
    void add_point(const FeatureVector& f, ClassLabel y)
    {
        if (f.size() != dim_)
            throw DimensionError("knn_fit: training vectors have mixed dimensionality");
        points_.insert(points_.end(), f.begin(), f.end());
        labels_.push_back(y);
    }

    void check_query(std::span<const double> x) const
    {
        if (labels_.empty())
            throw EmptyTrainingSet();
        if (x.size() != dim_) {
            throw DimensionError("knn query has " + std::to_string(x.size()) + " features, model expects " +
                                 std::to_string(dim_));
        }
    }

    KnnConfig config_;
    std::size_t dim_ = 0;
    std::vector<double> points_; // row-major, size() * dim_
    std::vector<ClassLabel> labels_;
};

inline KnnModel knn_fit(const KnnConfig& config, std::span<const LabeledInstance> data)
{
    return KnnModel(config, data);
}

inline KnnPrediction knn_predict(const KnnModel& model, std::span<const double> x)
{
    return model.predict(x);
}

} // namespace driftpp
