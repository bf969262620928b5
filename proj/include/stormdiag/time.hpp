#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace stormdiag {

using TimePoint = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;

/// Parses "YYYY-MM-DDTHH:MM[:SS][Z]" as UTC. Throws stormdiag::Error.
TimePoint parse_time(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_time(TimePoint t);

/// Compact form used in file names: "YYYYMMDDTHHMMSSZ".
std::string compact_time(TimePoint t);

inline TimePoint hours_after(TimePoint t, double hours) {
    return t + Seconds(static_cast<long long>(hours * 3600.0));
}

}  // namespace stormdiag
