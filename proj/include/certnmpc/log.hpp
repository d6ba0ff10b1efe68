#pragma once

#include <string>

namespace certnmpc {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

/// Active verbosity, parsed once from the CERT_NMPC_LOG environment variable
/// ("error", "info" or "debug"; default "error").
LogLevel log_level();

/// Write a line to stderr if `level` is enabled.
void log(LogLevel level, const std::string& message);

inline void log_info(const std::string& message) { log(LogLevel::kInfo, message); }
inline void log_debug(const std::string& message) { log(LogLevel::kDebug, message); }

}  // namespace certnmpc
