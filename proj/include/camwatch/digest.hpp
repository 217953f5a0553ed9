#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace camwatch {

inline constexpr std::string_view kDigestAlgorithm = "sha256";

// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

}  // namespace camwatch
