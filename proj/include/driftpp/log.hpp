#pragma once

#include <cstdlib>
#include <memory>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace driftpp::log {

/// Maps a DRIFTPP_LOG value to a level; unknown or empty values fall back to warn.
inline spdlog::level::level_enum parse_level(std::string_view name) noexcept
{
    if (name == "error")
        return spdlog::level::err;
    if (name == "info")
        return spdlog::level::info;
    if (name == "debug")
        return spdlog::level::debug;
    return spdlog::level::warn;
}

/// Library-wide stderr logger, levelled from the DRIFTPP_LOG environment variable.
inline spdlog::logger& logger()
{
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto lg = std::make_shared<spdlog::logger>("driftpp", std::make_shared<spdlog::sinks::stderr_sink_mt>());
        const char* env = std::getenv("DRIFTPP_LOG");
        lg->set_level(parse_level(env != nullptr ? env : ""));
        lg->set_pattern("[driftpp] [%l] %v");
        return lg;
    }();
    return *instance;
}

} // namespace driftpp::log
