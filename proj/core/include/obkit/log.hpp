#pragma once

#include <string_view>

namespace obkit::log {

enum class Level { trace, debug, info, warn, error, off };

// Level parsing accepts the spdlog names ("trace" .. "off").
Level parse_level(std::string_view name);
void set_level(Level level);

void info(std::string_view message);
void warn(std::string_view message);
void debug(std::string_view message);

}  // namespace obkit::log
