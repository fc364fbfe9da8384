#include "obkit/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <string>

#include "obkit/error.hpp"

namespace obkit::log {
namespace {

// Diagnostics go to stderr so command output on stdout stays clean.
spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> l = [] {
    auto existing = spdlog::get("obkit");
    return existing ? existing : spdlog::stderr_logger_mt("obkit");
  }();
  return *l;
}

}  // namespace

Level parse_level(std::string_view name) {
  if (name == "trace") return Level::trace;
  if (name == "debug") return Level::debug;
  if (name == "info") return Level::info;
  if (name == "warn" || name == "warning") return Level::warn;
  if (name == "error" || name == "err") return Level::error;
  if (name == "off") return Level::off;
  throw Error(ErrorCode::InvalidArgument, "unknown log level '" + std::string(name) + "'");
}

void set_level(Level level) {
  switch (level) {
    case Level::trace: logger().set_level(spdlog::level::trace); break;
    case Level::debug: logger().set_level(spdlog::level::debug); break;
    case Level::info: logger().set_level(spdlog::level::info); break;
    case Level::warn: logger().set_level(spdlog::level::warn); break;
    case Level::error: logger().set_level(spdlog::level::err); break;
    case Level::off: logger().set_level(spdlog::level::off); break;
  }
}

void info(std::string_view message) { logger().info("{}", message); }
void warn(std::string_view message) { logger().warn("{}", message); }
void debug(std::string_view message) { logger().debug("{}", message); }

}  // namespace obkit::log
