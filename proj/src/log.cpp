#include "chronocache/log.hpp"

#include <atomic>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <mutex>

namespace chronocache::log {

namespace {

std::atomic<int> g_level{-1};

Level level_from_env() {
    const char* env = std::getenv("CHRONOCACHE_LOG");
    if (!env)
        return Level::warn;
    if (std::strcmp(env, "error") == 0) return Level::error;
    if (std::strcmp(env, "warn") == 0) return Level::warn;
    if (std::strcmp(env, "info") == 0) return Level::info;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    return Level::warn;
}

const char* tag(Level lv) {
    switch (lv) {
    case Level::error: return "ERROR";
    case Level::warn: return "WARN";
    case Level::info: return "INFO";
    case Level::debug: return "DEBUG";
    }
    return "?";
}

void vwrite(Level lv, const char* fmt, va_list args) {
    if (static_cast<int>(lv) > static_cast<int>(level()))
        return;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::fprintf(stderr, "[%s] ", tag(lv));
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
}

} // namespace

Level level() {
    int lv = g_level.load(std::memory_order_relaxed);
    if (lv < 0) {
        lv = static_cast<int>(level_from_env());
        g_level.store(lv, std::memory_order_relaxed);
    }
    return static_cast<Level>(lv);
}

void set_level(Level lv) {
    g_level.store(static_cast<int>(lv), std::memory_order_relaxed);
}

#define CHRONOCACHE_DEFINE_LOG(name, lv)                                       \
    void name(const char* fmt, ...) {                                          \
        va_list args;                                                          \
        va_start(args, fmt);                                                   \
        vwrite(lv, fmt, args);                                                 \
        va_end(args);                                                          \
    }

CHRONOCACHE_DEFINE_LOG(error, Level::error)
CHRONOCACHE_DEFINE_LOG(warn, Level::warn)
CHRONOCACHE_DEFINE_LOG(info, Level::info)
CHRONOCACHE_DEFINE_LOG(debug, Level::debug)

#undef CHRONOCACHE_DEFINE_LOG

} // namespace chronocache::log
