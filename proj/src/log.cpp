#include "matchlift/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

#include "matchlift/error.hpp"

namespace matchlift::log {

namespace {

std::atomic<Level> g_level{Level::kWarn};
std::mutex g_mutex;

const char* name(Level l) {
  switch (l) {
    case Level::kDebug: return "debug";
    case Level::kInfo: return "info";
    case Level::kWarn: return "warn";
    case Level::kError: return "error";
    case Level::kOff: return "off";
  }
  return "?";
}

}  // namespace

void set_level(Level l) { g_level.store(l); }
Level level() { return g_level.load(); }

Level parse_level(std::string_view s) {
  for (Level l : {Level::kDebug, Level::kInfo, Level::kWarn, Level::kError, Level::kOff}) {
    if (s == name(l)) return l;
  }
  throw Error(ErrorCode::kInvalidParams, "unknown log level '" + std::string(s) + "'");
}

void write(Level l, std::string_view fields) {
  if (l < g_level.load() || g_level.load() == Level::kOff) return;
  std::lock_guard lock(g_mutex);
  std::fprintf(stderr, "level=%s %.*s\n", name(l), static_cast<int>(fields.size()), fields.data());
}

}  // namespace matchlift::log
