#pragma once

// Leveled logging to standard error. NETSEG_LOG selects the threshold:
// error, warn (default), info or debug.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>

namespace netseg::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline Level parse_level(std::string_view s) {
  if (s == "error") return Level::Error;
  if (s == "info") return Level::Info;
  if (s == "debug") return Level::Debug;
  return Level::Warn;
}

inline Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("NETSEG_LOG");
    return env ? parse_level(env) : Level::Warn;
  }();
  return level;
}

inline bool enabled(Level l) { return static_cast<int>(l) <= static_cast<int>(threshold()); }

template <class... Args>
void write(Level l, const Args&... args) {
  if (!enabled(l)) return;
  static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
  std::ostringstream line;
  line << "[netseg " << kNames[static_cast<int>(l)] << "] ";
  (line << ... << args);
  line << '\n';
  std::cerr << line.str();
}

template <class... Args>
void error(const Args&... args) { write(Level::Error, args...); }
template <class... Args>
void warn(const Args&... args) { write(Level::Warn, args...); }
template <class... Args>
void info(const Args&... args) { write(Level::Info, args...); }
template <class... Args>
void debug(const Args&... args) { write(Level::Debug, args...); }

}  // namespace netseg::log
