#pragma once

// Key files hold 32 hex digits (K[0]..K[3], big-endian). Whitespace anywhere
// is ignored; anything else is rejected.

#include <cctype>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "etea/cipher.hpp"
#include "etea/error.hpp"

namespace etea {

inline Key128 parse_key(std::string_view text) {
  Key128 key;
  std::size_t digits = 0;
  for (const char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw Error(ErrorCode::BadKeyFile, std::string("invalid character '") + c + "' in key");
    if (digits == 32) throw Error(ErrorCode::BadKeyFile, "key has more than 32 hex digits");
    auto& word = key.k[digits / 8];
    word = (word << 4) | static_cast<std::uint32_t>(v);
    ++digits;
  }
  if (digits != 32) throw Error(ErrorCode::BadKeyFile, "key must have exactly 32 hex digits, got " + std::to_string(digits));
  return key;
}

inline std::string render_key(const Key128& key) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(33);
  for (const auto word : key.k)
    for (int shift = 28; shift >= 0; shift -= 4) out.push_back(kHex[(word >> shift) & 0xF]);
  out.push_back('\n');
  return out;
}

inline Key128 random_key() {
  std::random_device rd;
  Key128 key;
  for (auto& w : key.k) w = static_cast<std::uint32_t>(rd());
  return key;
}

}  // namespace etea
