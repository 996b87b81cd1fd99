#include "senatus/logging.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace senatus {

namespace {

std::atomic<LogLevel> g_level{LogLevel::kWarn};
std::mutex g_mutex;

const char* level_name(LogLevel level) {
    switch (level) {
        case LogLevel::kError: return "error";
        case LogLevel::kWarn: return "warn";
        case LogLevel::kInfo: return "info";
        case LogLevel::kDebug: return "debug";
    }
    return "?";
}

} // namespace

LogLevel log_level() { return g_level.load(std::memory_order_relaxed); }

void set_log_level(LogLevel level) { g_level.store(level, std::memory_order_relaxed); }

bool parse_log_level(const std::string& name, LogLevel& out) {
    if (name == "error") out = LogLevel::kError;
    else if (name == "warn") out = LogLevel::kWarn;
    else if (name == "info") out = LogLevel::kInfo;
    else if (name == "debug") out = LogLevel::kDebug;
    else return false;
    return true;
}

void log_message(LogLevel level, const std::string& msg) {
    if (static_cast<int>(level) > static_cast<int>(log_level())) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "[%s] %s\n", level_name(level), msg.c_str());
}

} // namespace senatus
