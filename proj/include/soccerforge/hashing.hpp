#pragma once

#include <string>
#include <string_view>

namespace soccerforge {

// Lowercase hex SHA-256 of the given bytes.
std::string sha256_hex(std::string_view bytes);

// First `n` hex chars of sha256_hex, used for compact identifiers.
std::string short_hash(std::string_view bytes, std::size_t n = 8);

}  // namespace soccerforge
