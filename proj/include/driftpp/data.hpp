#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "driftpp/core.hpp"

namespace driftpp {

// ---------------------------------------------------------------------------
// CSV chunk format: optional header `f0,...,f{d-1},label`, numeric columns,
// the label (0 or 1) last. Floats are written in shortest round-trip form.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) noexcept
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return fields;
}

inline bool parse_double(std::string_view text, double& out) noexcept
{
    if (!text.empty() && text.front() == '+')
        text.remove_prefix(1);
    if (text.empty())
        return false;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

} // namespace detail

/// Parses CSV text. `id` becomes the chunk id; line numbers in errors are 1-based.
inline Chunk parse_chunk_csv(std::istream& in, std::string id, bool has_header)
{
    Chunk chunk{std::move(id), {}, 0};
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = has_header;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty())
            continue;
        const auto fields = detail::split_commas(line);
        if (header_pending) {
            header_pending = false;
            columns = fields.size();
            if (columns < 2)
                throw ParseError("line " + std::to_string(line_no) + ": header needs a feature and a label column", line_no);
            continue;
        }
        if (columns == 0) {
            columns = fields.size();
            if (columns < 2)
                throw ParseError("line " + std::to_string(line_no) + ": need at least one feature and a label", line_no);
        }
        if (fields.size() != columns) {
            throw RaggedRow("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                                " columns, found " + std::to_string(fields.size()),
                            line_no);
        }
        LabeledInstance inst;
        inst.index = chunk.instances.size();
        inst.features.resize(columns - 1);
        for (std::size_t c = 0; c + 1 < columns; ++c) {
            if (!detail::parse_double(fields[c], inst.features[c]) || !std::isfinite(inst.features[c])) {
                throw ParseError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                     ": not a finite number: '" + std::string(fields[c]) + "'",
                                 line_no);
            }
        }
        double label = 0.0;
        if (!detail::parse_double(fields.back(), label) || (label != 0.0 && label != 1.0)) {
            throw LabelError("line " + std::to_string(line_no) + ": label must be 0 or 1, found '" +
                                 std::string(fields.back()) + "'",
                             line_no);
        }
        inst.label = label == 1.0 ? ClassLabel::up() : ClassLabel::down();
        chunk.instances.push_back(std::move(inst));
    }
    chunk.dimensionality = columns > 0 ? columns - 1 : 0;
    return chunk;
}

/// Reads one chunk; its id is the file stem.
inline Chunk read_chunk_csv(const std::filesystem::path& path, bool has_header = true)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open chunk file " + path.string());
    try {
        return parse_chunk_csv(in, path.stem().string(), has_header);
    } catch (const LabelError& e) {
        throw LabelError(path.string() + ": " + e.what(), e.line());
    } catch (const RaggedRow& e) {
        throw RaggedRow(path.string() + ": " + e.what(), e.line());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

inline void format_chunk_csv(const Chunk& chunk, std::ostream& out, bool header = true)
{
    if (header) {
        for (std::size_t c = 0; c < chunk.dimensionality; ++c)
            out << 'f' << c << ',';
        out << "label\n";
    }
    for (const auto& inst : chunk.instances) {
        for (double v : inst.features)
            out << detail::format_double(v) << ',';
        out << inst.label.value() << '\n';
    }
}

inline void write_chunk_csv(const Chunk& chunk, const std::filesystem::path& path, bool header = true)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    format_chunk_csv(chunk, out, header);
    out.flush();
    if (!out)
        throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Synthetic stream generator.
// ---------------------------------------------------------------------------

enum class DriftKind { none, sudden, gradual };

struct DriftSpec {
    DriftKind kind = DriftKind::none;
    std::size_t at_chunk = 1;
    double magnitude = 1.0; // fraction of a 90 degree boundary rotation
    std::size_t gradual_span = 1;
};

struct StreamSpec {
    std::size_t n_chunks = 6;
    std::size_t chunk_size = 2000;
    std::size_t dimensionality = 20;
    double class_balance = 0.5;
    double noise = 0.0;
    std::uint64_t seed = 0;
    DriftSpec drift;

    void validate() const
    {
        if (n_chunks < 1 || chunk_size < 1)
            throw ConfigError("n_chunks and chunk_size must be positive");
        if (dimensionality < 2)
            throw ConfigError("dimensionality must be at least 2");
        if (!(class_balance > 0.0 && class_balance < 1.0))
            throw ConfigError("class_balance must lie in (0, 1)");
        if (!(noise >= 0.0 && noise < 1.0))
            throw ConfigError("noise must lie in [0, 1)");
        if (drift.kind != DriftKind::none) {
            if (drift.at_chunk < 1)
                throw ConfigError("drift at_chunk must be >= 1");
            if (!(drift.magnitude > 0.0 && drift.magnitude <= 1.0))
                throw ConfigError("drift magnitude must lie in (0, 1]");
            if (drift.kind == DriftKind::gradual && drift.gradual_span < 1)
                throw ConfigError("gradual_span must be >= 1");
        }
    }
};

/// Geometry shared by every generated chunk.
///
/// Two Gaussian clusters sit at +/- kSeparation/2 along feature 0. Every other
/// feature is independent noise with a spread that shrinks with the column index,
/// so principal axes come out in column order. The label is the side of a
/// hyperplane through the origin whose normal starts on feature 0 and rotates
/// toward feature 1 as the concept drifts.
struct StreamGeometry {
    static constexpr double kSeparation = 6.0;
    static constexpr double kClusterSpread = 0.5;
    static constexpr double kLeadingSpread = 1.0;
    static constexpr double kSpreadDecay = 0.8;

    static double spread(std::size_t column) noexcept
    {
        return column == 0 ? kClusterSpread : kLeadingSpread * std::pow(kSpreadDecay, static_cast<double>(column - 1));
    }
};

/// Rotation of the decision boundary, in radians, for chunk `chunk_index`.
inline double boundary_angle(const DriftSpec& drift, std::size_t chunk_index) noexcept
{
    const double full = drift.magnitude * std::numbers::pi / 2.0;
    switch (drift.kind) {
    case DriftKind::none:
        return 0.0;
    case DriftKind::sudden:
        return chunk_index >= drift.at_chunk ? full : 0.0;
    case DriftKind::gradual: {
        if (chunk_index < drift.at_chunk)
            return 0.0;
        const double progress = static_cast<double>(chunk_index - drift.at_chunk + 1) /
                                static_cast<double>(drift.gradual_span);
        return full * std::min(progress, 1.0);
    }
    }
    return 0.0;
}

/// Noise-free label of a point under the boundary rotated by `angle`.
inline ClassLabel boundary_label(std::span<const double> x, double angle) noexcept
{
    const double side = std::cos(angle) * x[0] + std::sin(angle) * x[1];
    return side > 0.0 ? ClassLabel::up() : ClassLabel::down();
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::string chunk_name(std::size_t i)
{
    std::string digits = std::to_string(i);
    if (digits.size() < 3)
        digits.insert(0, 3 - digits.size(), '0');
    return "chunk_" + digits;
}

} // namespace detail

/// Generates one chunk of the stream; chunks are independent given (seed, index).
inline Chunk generate_chunk(const StreamSpec& spec, std::size_t chunk_index)
{
    std::mt19937_64 rng(detail::splitmix64(spec.seed ^ detail::splitmix64(chunk_index)));
    std::bernoulli_distribution cluster_up(spec.class_balance);
    std::bernoulli_distribution flip(spec.noise);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double angle = boundary_angle(spec.drift, chunk_index);

    Chunk chunk{detail::chunk_name(chunk_index), {}, spec.dimensionality};
    chunk.instances.reserve(spec.chunk_size);
    for (std::size_t i = 0; i < spec.chunk_size; ++i) {
        FeatureVector x(spec.dimensionality);
        const double centre = (cluster_up(rng) ? 0.5 : -0.5) * StreamGeometry::kSeparation;
        for (std::size_t c = 0; c < x.size(); ++c)
            x[c] = StreamGeometry::spread(c) * gauss(rng);
        x[0] += centre;
        ClassLabel y = boundary_label(x, angle);
        if (flip(rng))
            y = y.flipped();
        chunk.instances.push_back({std::move(x), y, i});
    }
    return chunk;
}

inline std::vector<Chunk> generate_stream(const StreamSpec& spec)
{
    spec.validate();
    std::vector<Chunk> chunks;
    chunks.reserve(spec.n_chunks);
    for (std::size_t i = 0; i < spec.n_chunks; ++i)
        chunks.push_back(generate_chunk(spec, i));
    return chunks;
}

} // namespace driftpp
