#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "driftpp/core.hpp"

namespace driftpp {

/// Principal axes of one chunk, strongest first.
///
/// `components` holds one unit row per axis. `explained_variance_ratio[i]` is the
/// i-th eigenvalue over the total variance of all axes, so the kept ratios sum to at
/// most one. Each axis is signed so that its largest-magnitude entry is positive.
struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components; // n_components x dimensionality
    Eigen::VectorXd explained_variance;
    Eigen::VectorXd explained_variance_ratio;

    std::size_t n_components() const noexcept { return static_cast<std::size_t>(components.rows()); }
    std::size_t dimensionality() const noexcept { return static_cast<std::size_t>(components.cols()); }
};

namespace detail {

inline Eigen::MatrixXd to_matrix(const Chunk& chunk)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(chunk.size()), static_cast<Eigen::Index>(chunk.dimensionality));
    for (std::size_t r = 0; r < chunk.size(); ++r) {
        const auto& f = chunk.instances[r].features;
        if (f.size() != chunk.dimensionality)
            throw DimensionError("instance " + std::to_string(r) + " does not match chunk dimensionality");
        for (std::size_t c = 0; c < f.size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = f[c];
    }
    return m;
}

} // namespace detail

/// Covariance eigendecomposition of the mean-centred chunk.
inline PcaModel pca_fit(const Chunk& chunk, std::size_t n_components)
{
    const std::size_t n = chunk.size();
    const std::size_t d = chunk.dimensionality;
    if (n < 2)
        throw DegenerateData("pca_fit needs at least two instances");
    if (n_components == 0 || n_components > std::min(n, d)) {
        throw DimensionError("pca_fit: n_components " + std::to_string(n_components) + " exceeds min(" +
                             std::to_string(n) + ", " + std::to_string(d) + ")");
    }
    const Eigen::MatrixXd x = detail::to_matrix(chunk);
    PcaModel model;
    model.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centred = x.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov = (centred.transpose() * centred) / static_cast<double>(n - 1);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw DegenerateData("covariance eigendecomposition did not converge");
    // Eigen returns ascending eigenvalues; round-off can leave tiny negatives.
    const Eigen::VectorXd values = solver.eigenvalues().cwiseMax(0.0).reverse();
    const double total = values.sum();
    if (!(total > 0.0))
        throw DegenerateData("chunk has zero total variance");

    const auto k = static_cast<Eigen::Index>(n_components);
    model.components.resize(k, static_cast<Eigen::Index>(d));
    model.explained_variance = values.head(k);
    model.explained_variance_ratio = values.head(k) / total;
    const Eigen::MatrixXd& vectors = solver.eigenvectors();
    for (Eigen::Index i = 0; i < k; ++i) {
        Eigen::VectorXd axis = vectors.col(static_cast<Eigen::Index>(d) - 1 - i);
        Eigen::Index pivot = 0;
        axis.cwiseAbs().maxCoeff(&pivot);
        if (axis(pivot) < 0.0)
            axis = -axis;
        model.components.row(i) = axis.transpose();
    }
    return model;
}

/// Scores of every instance on the first k axes; labels, indices and order kept.
inline Chunk pca_transform(const PcaModel& model, const Chunk& chunk, std::size_t k)
{
    if (k == 0 || k > model.n_components()) {
        throw DimensionError("pca_transform: k " + std::to_string(k) + " exceeds " +
                             std::to_string(model.n_components()) + " components");
    }
    if (chunk.dimensionality != model.dimensionality())
        throw DimensionError("pca_transform: chunk dimensionality does not match the model");
    const auto axes = model.components.topRows(static_cast<Eigen::Index>(k));
    Chunk out{chunk.id, {}, k};
    out.instances.reserve(chunk.size());
    Eigen::VectorXd v(static_cast<Eigen::Index>(chunk.dimensionality));
    for (const auto& inst : chunk.instances) {
        for (std::size_t c = 0; c < chunk.dimensionality; ++c)
            v(static_cast<Eigen::Index>(c)) = inst.features[c];
        const Eigen::VectorXd scores = axes * (v - model.mean);
        out.instances.push_back({FeatureVector(scores.data(), scores.data() + scores.size()), inst.label, inst.index});
    }
    return out;
}

/// Maps component scores back to the original feature space.
inline Chunk pca_inverse_transform(const PcaModel& model, const Chunk& scores)
{
    if (scores.dimensionality == 0 || scores.dimensionality > model.n_components())
        throw DimensionError("pca_inverse_transform: too many score columns");
    const auto axes = model.components.topRows(static_cast<Eigen::Index>(scores.dimensionality));
    Chunk out{scores.id, {}, model.dimensionality()};
    out.instances.reserve(scores.size());
    for (const auto& inst : scores.instances) {
        const Eigen::Map<const Eigen::VectorXd> s(inst.features.data(), static_cast<Eigen::Index>(inst.features.size()));
        const Eigen::VectorXd x = axes.transpose() * s + model.mean;
        out.instances.push_back({FeatureVector(x.data(), x.data() + x.size()), inst.label, inst.index});
    }
    return out;
}

/// Total explained variance ratio of the first k components.
inline double tevr(const PcaModel& model, std::size_t k)
{
    if (k > model.n_components())
        throw DimensionError("tevr: k exceeds the number of components");
    return model.explained_variance_ratio.head(static_cast<Eigen::Index>(k)).sum();
}

/// Fits PCA on the chunk and keeps its first k component scores.
inline Chunk pca_reduce(const Chunk& chunk, std::size_t k)
{
    return pca_transform(pca_fit(chunk, k), chunk, k);
}

/// CSV `component,ratio,cumulative`, one row per kept component (1-based).
inline void write_tevr_csv(const PcaModel& model, std::ostream& out)
{
    auto put = [&](double v) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof(buf), v);
        out.write(buf, res.ptr - buf);
    };
    out << "component,ratio,cumulative\n";
    double cumulative = 0.0;
    for (Eigen::Index i = 0; i < model.explained_variance_ratio.size(); ++i) {
        cumulative += model.explained_variance_ratio(i);
        out << (i + 1) << ',';
        put(model.explained_variance_ratio(i));
        out << ',';
        put(cumulative);
        out << '\n';
    }
}

} // namespace driftpp
