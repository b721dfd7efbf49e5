#pragma once

#include <string_view>

namespace trackgen::log {

// Thin wrappers so translation units that include torch (which bundles its own
// fmt) never see the spdlog headers.
void info(std::string_view message);
void warn(std::string_view message);

}  // namespace trackgen::log
