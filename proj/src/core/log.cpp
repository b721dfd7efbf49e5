#include "trackgen/core/log.hpp"

#include <spdlog/spdlog.h>

namespace trackgen::log {

void info(std::string_view message) { spdlog::info("{}", message); }

void warn(std::string_view message) { spdlog::warn("{}", message); }

}  // namespace trackgen::log
