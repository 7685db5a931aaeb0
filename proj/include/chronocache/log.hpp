#pragma once

namespace chronocache::log {

// Level comes from CHRONOCACHE_LOG (error|warn|info|debug), default warn.
enum class Level : int { error = 0, warn = 1, info = 2, debug = 3 };

Level level();
void set_level(Level lv);

void error(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void warn(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void info(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void debug(const char* fmt, ...) __attribute__((format(printf, 1, 2)));

} // namespace chronocache::log
