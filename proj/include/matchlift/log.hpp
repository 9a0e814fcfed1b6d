#pragma once

#include <string>
#include <string_view>

namespace matchlift::log {

enum class Level { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3, kOff = 4 };

void set_level(Level level);
Level level();
/// Parses debug|info|warn|error|off; throws InvalidParams otherwise.
Level parse_level(std::string_view name);

/// Writes one `level=<l> <fields>` line to stderr when enabled. `fields` is a
/// space-separated list of key=value pairs.
void write(Level level, std::string_view fields);

inline void debug(std::string_view fields) { write(Level::kDebug, fields); }
inline void info(std::string_view fields) { write(Level::kInfo, fields); }
inline void warn(std::string_view fields) { write(Level::kWarn, fields); }
inline void error(std::string_view fields) { write(Level::kError, fields); }

}  // namespace matchlift::log
