#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace trackgen {

nlohmann::json read_json_file(const std::filesystem::path& path);
std::vector<uint8_t> read_bytes(const std::filesystem::path& path);

// Writes go to a sibling temp file which is then renamed over the target.
void write_bytes_atomic(const std::filesystem::path& path, std::span<const uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, std::string_view text);
void write_json_atomic(const std::filesystem::path& path, const nlohmann::json& j);

/// Creates the directory (and parents); throws IoError if that fails or the
/// location is not writable.
void ensure_directory(const std::filesystem::path& dir);

/// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

std::string base64_encode(std::span<const uint8_t> bytes);
std::vector<uint8_t> base64_decode(std::string_view text);

/// UTC timestamp, ISO-8601 with seconds resolution.
std::string utc_timestamp();

}  // namespace trackgen
