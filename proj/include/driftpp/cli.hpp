#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "driftpp/adaptive.hpp"
#include "driftpp/data.hpp"
#include "driftpp/io.hpp"

namespace driftpp::cli {

/// Exit codes of the driftpp tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDrift = 2;

// ---------------------------------------------------------------------------
// Flat key=value configuration. `#` starts a comment; blank lines are ignored.
// ---------------------------------------------------------------------------

struct ConfigEntry {
    std::string value;
    std::size_t line;
};

inline const std::set<std::string, std::less<>>& known_keys()
{
    static const std::set<std::string, std::less<>> keys{
        // run
        "initial_chunk", "chunks", "has_header", "pc_count", "reduction", "standardize", "n_estimators",
        "window_size", "error_threshold", "max_retries", "max_window_ensembles", "knn_k", "knn_p",
        "drift_f1_drop", "drift_baseline_window",
        // generate
        "n_chunks", "chunk_size", "dimensionality", "class_balance", "noise", "drift", "drift_at_chunk",
        "drift_magnitude", "drift_gradual_span",
        // shared
        "seed"};
    return keys;
}

class Config {
public:
    static Config parse(std::istream& in, std::filesystem::path base_dir = {})
    {
        Config cfg;
        cfg.base_dir_ = std::move(base_dir);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string_view text = line;
            if (const auto hash = text.find('#'); hash != std::string_view::npos)
                text = text.substr(0, hash);
            text = detail::trim(text);
            if (text.empty())
                continue;
            const auto eq = text.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
            const std::string key(detail::trim(text.substr(0, eq)));
            const std::string value(detail::trim(text.substr(eq + 1)));
            if (!known_keys().contains(key))
                throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
            if (cfg.entries_.contains(key)) {
                throw ConfigError("config line " + std::to_string(line_no) + ": key '" + key +
                                  "' repeats line " + std::to_string(cfg.entries_[key].line));
            }
            cfg.entries_[key] = {value, line_no};
        }
        return cfg;
    }

    static Config load(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open config file " + path.string());
        return parse(in, path.parent_path());
    }

    bool has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

    const ConfigEntry& require(std::string_view key) const
    {
        const auto it = entries_.find(key);
        if (it == entries_.end())
            throw ConfigError("config is missing required key '" + std::string(key) + "'");
        return it->second;
    }

    std::string text(std::string_view key, std::string fallback) const
    {
        const auto it = entries_.find(key);
        return it == entries_.end() ? std::move(fallback) : it->second.value;
    }

    template <class T>
    T number(std::string_view key, T fallback) const
    {
        const auto it = entries_.find(key);
        return it == entries_.end() ? fallback : convert<T>(key, it->second);
    }

    template <class T>
    T required_number(std::string_view key) const
    {
        return convert<T>(key, require(key));
    }

    bool flag(std::string_view key, bool fallback) const
    {
        const auto it = entries_.find(key);
        if (it == entries_.end())
            return fallback;
        const auto& v = it->second.value;
        if (v == "true" || v == "1" || v == "yes")
            return true;
        if (v == "false" || v == "0" || v == "no")
            return false;
        throw invalid(key, it->second, "expected true or false");
    }

    std::size_t line_of(std::string_view key) const
    {
        const auto it = entries_.find(key);
        return it == entries_.end() ? 0 : it->second.line;
    }

    /// Resolves a path value relative to the config file's directory.
    std::filesystem::path resolve(std::string_view value) const
    {
        std::filesystem::path p{std::string(value)};
        return p.is_absolute() || base_dir_.empty() ? p : base_dir_ / p;
    }

    ConfigError invalid(std::string_view key, const ConfigEntry& e, std::string_view why) const
    {
        return ConfigError("config line " + std::to_string(e.line) + ": invalid value '" + e.value + "' for '" +
                           std::string(key) + "': " + std::string(why));
    }

private:
    template <class T>
    T convert(std::string_view key, const ConfigEntry& e) const
    {
        T out{};
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        const auto res = std::from_chars(first, last, out);
        if (e.value.empty() || res.ec != std::errc() || res.ptr != last)
            throw invalid(key, e, "not a number");
        return out;
    }

    std::map<std::string, ConfigEntry, std::less<>> entries_;
    std::filesystem::path base_dir_;
};

inline StreamSpec stream_spec_from(const Config& cfg)
{
    StreamSpec spec;
    spec.n_chunks = cfg.required_number<std::size_t>("n_chunks");
    spec.chunk_size = cfg.required_number<std::size_t>("chunk_size");
    spec.dimensionality = cfg.required_number<std::size_t>("dimensionality");
    spec.class_balance = cfg.number<double>("class_balance", spec.class_balance);
    spec.noise = cfg.number<double>("noise", spec.noise);
    spec.seed = cfg.number<std::uint64_t>("seed", spec.seed);
    const auto kind = cfg.text("drift", "none");
    if (kind == "none")
        spec.drift.kind = DriftKind::none;
    else if (kind == "sudden")
        spec.drift.kind = DriftKind::sudden;
    else if (kind == "gradual")
        spec.drift.kind = DriftKind::gradual;
    else
        throw cfg.invalid("drift", cfg.require("drift"), "expected none, sudden or gradual");
    spec.drift.at_chunk = cfg.number<std::size_t>("drift_at_chunk", spec.drift.at_chunk);
    spec.drift.magnitude = cfg.number<double>("drift_magnitude", spec.drift.magnitude);
    spec.drift.gradual_span = cfg.number<std::size_t>("drift_gradual_span", spec.drift.gradual_span);
    spec.validate();
    return spec;
}

inline RunConfig run_config_from(const Config& cfg)
{
    RunConfig rc;
    rc.pc_count = cfg.number<std::size_t>("pc_count", rc.pc_count);
    const auto reduction = cfg.text("reduction", "pca");
    if (reduction == "pca")
        rc.reduction = Reduction::pca;
    else if (reduction == "slice")
        rc.reduction = Reduction::slice;
    else if (reduction == "none")
        rc.reduction = Reduction::none;
    else
        throw cfg.invalid("reduction", cfg.require("reduction"), "expected pca, slice or none");
    rc.standardize = cfg.flag("standardize", rc.standardize);
    rc.drift_f1_drop = cfg.number<double>("drift_f1_drop", rc.drift_f1_drop);
    rc.drift_baseline_window = cfg.number<std::size_t>("drift_baseline_window", rc.drift_baseline_window);

    auto& lp = rc.learnpp;
    lp.n_estimators = cfg.number<std::size_t>("n_estimators", lp.n_estimators);
    if (cfg.has("window_size") && cfg.text("window_size", "") != "chunk")
        lp.window_size = cfg.required_number<std::size_t>("window_size");
    lp.error_threshold = cfg.number<double>("error_threshold", lp.error_threshold);
    lp.max_retries = cfg.number<std::size_t>("max_retries", lp.max_retries);
    if (cfg.has("max_window_ensembles") && cfg.text("max_window_ensembles", "") != "unbounded")
        lp.max_window_ensembles = cfg.required_number<std::size_t>("max_window_ensembles");
    lp.knn.k = cfg.number<std::size_t>("knn_k", lp.knn.k);
    lp.knn.p = cfg.number<double>("knn_p", lp.knn.p);
    lp.seed = cfg.number<std::uint64_t>("seed", lp.seed);
    rc.validate();
    return rc;
}

// ---------------------------------------------------------------------------
// Chunk lists: comma-separated entries, each a path or a file-name glob.
// ---------------------------------------------------------------------------

inline bool wildcard_match(std::string_view pattern, std::string_view name) noexcept
{
    std::size_t p = 0, n = 0, star = std::string_view::npos, resume = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            resume = n;
        } else if (star != std::string_view::npos) {
            p = star + 1;
            n = ++resume;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*')
        ++p;
    return p == pattern.size();
}

/// Expands one entry; globs match file names inside a literal directory, sorted.
inline std::vector<std::filesystem::path> expand_chunk_entry(const std::filesystem::path& entry)
{
    const std::string name = entry.filename().string();
    if (name.find_first_of("*?") == std::string::npos)
        return {entry};
    const auto dir = entry.has_parent_path() ? entry.parent_path() : std::filesystem::path(".");
    std::vector<std::filesystem::path> out;
    std::error_code ec;
    for (const auto& item : std::filesystem::directory_iterator(dir, ec))
        if (item.is_regular_file() && wildcard_match(name, item.path().filename().string()))
            out.push_back(item.path());
    if (ec)
        throw IoError("cannot list directory " + dir.string());
    std::sort(out.begin(), out.end());
    if (out.empty())
        throw IoError("no chunk files match " + entry.string());
    return out;
}

inline std::vector<std::filesystem::path> chunk_paths_from(const Config& cfg)
{
    const auto& entry = cfg.require("chunks");
    std::vector<std::filesystem::path> out;
    std::string_view rest = entry.value;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto item = detail::trim(rest.substr(0, comma));
        if (!item.empty())
            for (auto& p : expand_chunk_entry(cfg.resolve(item)))
                out.push_back(std::move(p));
        if (comma == std::string_view::npos)
            break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

inline std::string sha256_hex(std::string_view data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

// ---------------------------------------------------------------------------
// Commands. Each returns the process exit code and reports problems on `err`.
// ---------------------------------------------------------------------------

struct RunOptions {
    std::filesystem::path config_path;
    std::filesystem::path output_dir;
    std::optional<std::uint64_t> seed;
};

struct GenerateOptions {
    std::filesystem::path config_path;
    std::filesystem::path output_dir;
};

struct ReportOptions {
    std::filesystem::path records_path;
    double drift_f1_drop = RunConfig{}.drift_f1_drop;
    std::size_t drift_baseline_window = RunConfig{}.drift_baseline_window;
};

/// Writes chunk_000.csv ... plus manifest.json with the spec and SHA-256 digests.
inline int cmd_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err)
{
    try {
        const auto cfg = Config::load(opts.config_path);
        const auto spec = stream_spec_from(cfg);
        std::filesystem::create_directories(opts.output_dir);
        nlohmann::json files = nlohmann::json::array();
        for (std::size_t i = 0; i < spec.n_chunks; ++i) {
            const Chunk chunk = generate_chunk(spec, i);
            std::ostringstream body;
            format_chunk_csv(chunk, body);
            const std::string text = body.str();
            const auto name = chunk.id + ".csv";
            write_text_file(opts.output_dir / name, [&](std::ostream& f) { f << text; });
            files.push_back({{"file", name}, {"instances", chunk.size()}, {"sha256", sha256_hex(text)}});
        }
        static constexpr const char* kinds[] = {"none", "sudden", "gradual"};
        const nlohmann::json manifest{
            {"spec",
             {{"n_chunks", spec.n_chunks},
              {"chunk_size", spec.chunk_size},
              {"dimensionality", spec.dimensionality},
              {"class_balance", spec.class_balance},
              {"noise", spec.noise},
              {"seed", spec.seed},
              {"drift",
               {{"kind", kinds[static_cast<int>(spec.drift.kind)]},
                {"at_chunk", spec.drift.at_chunk},
                {"magnitude", spec.drift.magnitude},
                {"gradual_span", spec.drift.gradual_span}}}}},
            {"chunks", files}};
        write_text_file(opts.output_dir / "manifest.json", [&](std::ostream& f) { f << manifest.dump(2) << '\n'; });
        out << "wrote " << spec.n_chunks << " chunks to " << opts.output_dir.string() << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "driftpp generate: " << e.what() << '\n';
        return kExitFailure;
    }
}

/// Runs one experiment and writes reports.csv, records.jsonl and events.jsonl.
/// Exit code 2 signals that at least one chunk raised a drift alarm.
inline int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err)
{
    try {
        const auto cfg = Config::load(opts.config_path);
        auto rc = run_config_from(cfg);
        if (opts.seed)
            rc.learnpp.seed = *opts.seed;
        const bool header = cfg.flag("has_header", true);
        const Chunk initial = read_chunk_csv(cfg.resolve(cfg.require("initial_chunk").value), header);
        std::vector<Chunk> chunks;
        for (const auto& p : chunk_paths_from(cfg))
            chunks.push_back(read_chunk_csv(p, header));

        const auto result = run_experiment(initial, chunks, rc);
        std::filesystem::create_directories(opts.output_dir);
        write_text_file(opts.output_dir / "reports.csv",
                        [&](std::ostream& f) { format_reports_csv(result.reports, f); });
        write_text_file(opts.output_dir / "records.jsonl",
                        [&](std::ostream& f) { format_records_jsonl(result.records, f); });
        write_text_file(opts.output_dir / "events.jsonl",
                        [&](std::ostream& f) { format_events_jsonl(result.reports, f); });
        format_reports_csv(result.reports, out);
        if (result.error) {
            err << "driftpp run: " << *result.error << '\n';
            return kExitFailure;
        }
        return result.any_drift_alarm() ? kExitDrift : kExitOk;
    } catch (const std::exception& e) {
        err << "driftpp run: " << e.what() << '\n';
        return kExitFailure;
    }
}

/// Recomputes the per-chunk table from records.jsonl; output matches reports.csv.
inline int cmd_report(const ReportOptions& opts, std::ostream& out, std::ostream& err)
{
    try {
        std::ifstream in(opts.records_path);
        if (!in)
            throw IoError("cannot open records file " + opts.records_path.string());
        const auto records = parse_records_jsonl(in);
        const auto reports = reports_from_records(records, opts.drift_f1_drop, opts.drift_baseline_window);
        format_reports_csv(reports, out);
        return kExitOk;
    } catch (const std::exception& e) {
        err << "driftpp report: " << opts.records_path.string() << ": " << e.what() << '\n';
        return kExitFailure;
    }
}

} // namespace driftpp::cli
