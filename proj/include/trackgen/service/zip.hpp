#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace trackgen::service {

/// Uncompressed (stored) zip archive of the given name/content pairs.
std::string store_zip(const std::vector<std::pair<std::string, std::vector<uint8_t>>>& files);

}  // namespace trackgen::service
