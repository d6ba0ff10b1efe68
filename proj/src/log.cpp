#include "certnmpc/log.hpp"

#include <cstdlib>
#include <iostream>

namespace certnmpc {

static LogLevel parse_level() {
  const char* env = std::getenv("CERT_NMPC_LOG");
  if (env == nullptr) return LogLevel::kError;
  const std::string value(env);
  if (value == "debug") return LogLevel::kDebug;
  if (value == "info") return LogLevel::kInfo;
  return LogLevel::kError;
}

LogLevel log_level() {
  static const LogLevel level = parse_level();
  return level;
}

void log(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = level == LogLevel::kError ? "error" : (level == LogLevel::kInfo ? "info" : "debug");
  std::cerr << "[cert-nmpc:" << tag << "] " << message << "\n";
}

}  // namespace certnmpc
