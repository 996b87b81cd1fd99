// logging.hpp - leveled logging to stderr; data output stays on stdout
#pragma once

#include <string>

namespace senatus {

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

LogLevel log_level();
void set_log_level(LogLevel level);

// Parses "error" | "warn" | "info" | "debug"; returns false on unknown names.
bool parse_log_level(const std::string& name, LogLevel& out);

void log_message(LogLevel level, const std::string& msg);

inline void log_error(const std::string& msg) { log_message(LogLevel::kError, msg); }
inline void log_warn(const std::string& msg) { log_message(LogLevel::kWarn, msg); }
inline void log_info(const std::string& msg) { log_message(LogLevel::kInfo, msg); }
inline void log_debug(const std::string& msg) { log_message(LogLevel::kDebug, msg); }

} // namespace senatus
