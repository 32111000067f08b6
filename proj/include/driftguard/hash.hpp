#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace driftguard {

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 over the IEEE-754 bit patterns of a sequence (little-endian).
std::string fingerprint(std::span<const double> values);

/// SHA-256 of a file's contents.
std::string file_sha256(const std::filesystem::path& path);

}  // namespace driftguard
