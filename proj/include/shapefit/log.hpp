#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>

namespace shapefit::log {

enum class Level
{
  debug = 0,
  info = 1,
  warn = 2,
  error = 3,
  off = 4
};

inline Level
parse_level(std::string_view s)
{
  if (s == "debug")
    return Level::debug;
  if (s == "info")
    return Level::info;
  if (s == "warn" || s == "warning")
    return Level::warn;
  if (s == "error")
    return Level::error;
  if (s == "off" || s == "none")
    return Level::off;
  return Level::warn;
}

inline Level&
threshold()
{
  static Level level = [] {
    const char* env = std::getenv("SHAPEFIT_LOG");
    return env ? parse_level(env) : Level::warn;
  }();
  return level;
}

inline void
set_level(Level level)
{
  threshold() = level;
}

template<typename... Args>
void
write(Level level, std::string_view tag, Args&&... args)
{
  if (level < threshold())
    return;
  std::ostringstream oss;
  oss << "[shapefit " << tag << "] ";
  (oss << ... << std::forward<Args>(args));
  oss << '\n';
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  std::cerr << oss.str();
}

template<typename... Args>
void
debug(Args&&... args)
{
  write(Level::debug, "debug", std::forward<Args>(args)...);
}

template<typename... Args>
void
info(Args&&... args)
{
  write(Level::info, "info", std::forward<Args>(args)...);
}

template<typename... Args>
void
warn(Args&&... args)
{
  write(Level::warn, "warn", std::forward<Args>(args)...);
}

} // namespace shapefit::log
