#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftpp/error.hpp"

namespace driftpp {

/// Binary class label. Only DOWN (0) and UP (1) are constructible.
class ClassLabel {
public:
    /// DOWN.
    constexpr ClassLabel() noexcept = default;

    static constexpr ClassLabel down() noexcept { return ClassLabel(0); }
    static constexpr ClassLabel up() noexcept { return ClassLabel(1); }

    /// Throws LabelError for anything other than 0 or 1.
    static ClassLabel from_int(long long v)
    {
        if (v != 0 && v != 1)
            throw LabelError("class label must be 0 or 1, got " + std::to_string(v), 0);
        return ClassLabel(static_cast<std::uint8_t>(v));
    }

    constexpr int value() const noexcept { return value_; }
    constexpr bool is_up() const noexcept { return value_ == 1; }
    constexpr ClassLabel flipped() const noexcept { return ClassLabel(value_ ^ 1U); }

    friend constexpr bool operator==(ClassLabel, ClassLabel) = default;

private:
    constexpr explicit ClassLabel(std::uint8_t v) noexcept : value_(v) {}
    std::uint8_t value_ = 0;
};

inline constexpr std::size_t kNumClasses = 2;
inline constexpr double kDecisionThreshold = 0.5;

/// Class for a class-1 confidence score. Ties at the threshold go to class 0.
inline constexpr ClassLabel label_for_score(double score) noexcept
{
    return score > kDecisionThreshold ? ClassLabel::up() : ClassLabel::down();
}

using FeatureVector = std::vector<double>;

struct LabeledInstance {
    FeatureVector features;
    ClassLabel label = ClassLabel::down();
    std::size_t index = 0;

    friend bool operator==(const LabeledInstance&, const LabeledInstance&) = default;
};

struct Chunk {
    std::string id;
    std::vector<LabeledInstance> instances;
    std::size_t dimensionality = 0;

    std::size_t size() const noexcept { return instances.size(); }
    bool empty() const noexcept { return instances.empty(); }

    friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct PredictionRecord {
    std::string chunk_id;
    std::size_t index = 0;
    ClassLabel truth = ClassLabel::down();
    ClassLabel predicted = ClassLabel::down();
    double score = 0.0;

    friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct Violation {
    std::size_t row;
    std::string reason;
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    explicit operator bool() const noexcept { return ok(); }
};

inline ValidationResult validate_chunk(const Chunk& chunk)
{
    ValidationResult result;
    if (chunk.dimensionality == 0)
        result.violations.push_back({0, "dimensionality must be positive"});
    std::vector<bool> seen(chunk.instances.size(), false);
    for (std::size_t row = 0; row < chunk.instances.size(); ++row) {
        const auto& inst = chunk.instances[row];
        if (inst.features.size() != chunk.dimensionality) {
            result.violations.push_back({row, "expected " + std::to_string(chunk.dimensionality) +
                                                  " features, found " +
                                                  std::to_string(inst.features.size())});
        }
        for (std::size_t c = 0; c < inst.features.size(); ++c) {
            if (std::isnan(inst.features[c])) {
                result.violations.push_back({row, "NaN in feature " + std::to_string(c)});
            } else if (!std::isfinite(inst.features[c])) {
                result.violations.push_back({row, "infinite value in feature " + std::to_string(c)});
            }
        }
        if (inst.index >= seen.size() || seen[inst.index]) {
            result.violations.push_back({row, "index " + std::to_string(inst.index) +
                                                  " is duplicated or out of range"});
        } else {
            seen[inst.index] = true;
        }
    }
    return result;
}

/// Keep the first `k` feature columns of every instance.
inline Chunk slice_features(const Chunk& chunk, std::size_t k)
{
    if (k == 0 || k > chunk.dimensionality) {
        throw DimensionError("cannot slice " + std::to_string(chunk.dimensionality) +
                             " features down to " + std::to_string(k));
    }
    Chunk out{chunk.id, {}, k};
    out.instances.reserve(chunk.instances.size());
    for (const auto& inst : chunk.instances) {
        if (inst.features.size() < k)
            throw DimensionError("instance " + std::to_string(inst.index) + " is shorter than slice width");
        out.instances.push_back(
            {FeatureVector(inst.features.begin(), inst.features.begin() + static_cast<std::ptrdiff_t>(k)),
             inst.label, inst.index});
    }
    return out;
}

/// Per-column zero-mean / unit-variance scaling. Constant columns are only centred.
class Standardizer {
public:
    static Standardizer fit(const Chunk& chunk)
    {
        Standardizer s;
        const std::size_t d = chunk.dimensionality;
        s.mean_.assign(d, 0.0);
        s.scale_.assign(d, 1.0);
        const std::size_t n = chunk.instances.size();
        if (n == 0)
            return s;
        for (const auto& inst : chunk.instances)
            for (std::size_t c = 0; c < d; ++c)
                s.mean_[c] += inst.features[c];
        for (auto& m : s.mean_)
            m /= static_cast<double>(n);
        std::vector<double> var(d, 0.0);
        for (const auto& inst : chunk.instances) {
            for (std::size_t c = 0; c < d; ++c) {
                const double delta = inst.features[c] - s.mean_[c];
                var[c] += delta * delta;
            }
        }
        for (std::size_t c = 0; c < d; ++c) {
            const double sd = std::sqrt(var[c] / static_cast<double>(n));
            s.scale_[c] = sd > 1e-12 ? sd : 1.0;
        }
        return s;
    }

    Chunk apply(const Chunk& chunk) const
    {
        if (chunk.dimensionality != mean_.size())
            throw DimensionError("standardizer width does not match chunk");
        Chunk out = chunk;
        for (auto& inst : out.instances)
            for (std::size_t c = 0; c < mean_.size(); ++c)
                inst.features[c] = (inst.features[c] - mean_[c]) / scale_[c];
        return out;
    }

    std::span<const double> mean() const noexcept { return mean_; }
    std::span<const double> scale() const noexcept { return scale_; }

private:
    std::vector<double> mean_;
    std::vector<double> scale_;
};

/// Fits on the chunk itself and applies the result.
inline Chunk standardize(const Chunk& chunk)
{
    return Standardizer::fit(chunk).apply(chunk);
}

} // namespace driftpp
