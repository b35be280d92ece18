#pragma once

// Sealed payload container:
//
//   "ETEA" | version u8 (=1) | original_length u64 BE | ciphertext | crc32 u32 BE
//
// The ciphertext is the padded plaintext under ECB. Padding appends N bytes of
// value N (1..8), adding a whole block when the input is already aligned. The
// CRC covers every byte before it and only detects corruption; it is not a
// MAC and gives no authentication. ECB leaks equal plaintext blocks.

#include <algorithm>
#include <cstdint>
#include <string>

#include "etea/bytes.hpp"
#include "etea/cipher.hpp"
#include "etea/error.hpp"

namespace etea {

inline constexpr std::array<std::uint8_t, 4> kSealMagic{'E', 'T', 'E', 'A'};
inline constexpr std::uint8_t kSealVersion = 1;
inline constexpr std::size_t kSealHeaderSize = 4 + 1 + 8;
inline constexpr std::size_t kSealOverhead = kSealHeaderSize + 4;

struct SealedPayload {
  std::uint8_t version = kSealVersion;
  std::uint64_t original_length = 0;
  Bytes ciphertext;
  std::uint32_t checksum = 0;

  friend bool operator==(const SealedPayload&, const SealedPayload&) = default;
};

inline Bytes pad(ByteView data) {
  const auto n = static_cast<std::uint8_t>(kBlockSize - data.size() % kBlockSize);
  Bytes out(data.begin(), data.end());
  out.insert(out.end(), n, n);
  return out;
}

// Returns the unpadded length, or throws BadPadding.
inline std::size_t unpadded_length(ByteView padded) {
  if (padded.empty() || padded.size() % kBlockSize != 0)
    throw Error(ErrorCode::BadPadding, "padded data is not block aligned");
  const std::uint8_t n = padded.back();
  if (n == 0 || n > kBlockSize) throw Error(ErrorCode::BadPadding, "pad count out of range");
  const auto tail = padded.last(n);
  if (!std::all_of(tail.begin(), tail.end(), [n](std::uint8_t b) { return b == n; }))
    throw Error(ErrorCode::BadPadding, "inconsistent pad bytes");
  return padded.size() - n;
}

namespace detail {

inline std::uint32_t seal_checksum(const SealedPayload& s) {
  std::array<std::uint8_t, kSealHeaderSize> head{};
  std::copy(kSealMagic.begin(), kSealMagic.end(), head.begin());
  head[4] = s.version;
  store_be<std::uint64_t>(head.data() + 5, s.original_length);
  return crc32(s.ciphertext, crc32(head));
}

}  // namespace detail

inline SealedPayload seal(ByteView plaintext, const Key128& key) {
  SealedPayload s;
  s.original_length = plaintext.size();
  s.ciphertext = pad(plaintext);
  encrypt_blocks(s.ciphertext, key);
  s.checksum = detail::seal_checksum(s);
  return s;
}

inline Bytes serialize(const SealedPayload& s) {
  Bytes out(kSealOverhead + s.ciphertext.size());
  auto* p = std::copy(kSealMagic.begin(), kSealMagic.end(), out.data());
  *p++ = s.version;
  store_be<std::uint64_t>(p, s.original_length);
  p = std::copy(s.ciphertext.begin(), s.ciphertext.end(), p + 8);
  store_be<std::uint32_t>(p, s.checksum);
  return out;
}

// Structural parse plus checksum verification. Decryption happens in open().
inline SealedPayload parse_sealed(ByteView bytes) {
  if (bytes.size() < kSealMagic.size() || !std::equal(kSealMagic.begin(), kSealMagic.end(), bytes.begin()))
    throw Error(ErrorCode::BadMagic, "not a sealed payload");
  if (bytes.size() < kSealOverhead) throw Error(ErrorCode::Malformed, "sealed payload truncated");

  const auto body = bytes.first(bytes.size() - 4);
  const auto stored = load_be<std::uint32_t>(bytes.data() + body.size());
  if (crc32(body) != stored) throw Error(ErrorCode::BadChecksum, "sealed payload checksum mismatch");

  SealedPayload s;
  s.version = bytes[4];
  s.original_length = load_be<std::uint64_t>(bytes.data() + 5);
  s.ciphertext.assign(body.begin() + kSealHeaderSize, body.end());
  s.checksum = stored;
  if (s.version != kSealVersion)
    throw Error(ErrorCode::Malformed, "unsupported sealed payload version " + std::to_string(s.version));
  if (s.ciphertext.empty() || s.ciphertext.size() % kBlockSize != 0)
    throw Error(ErrorCode::Malformed, "ciphertext length is not a positive multiple of 8");
  return s;
}

inline Bytes open(const SealedPayload& s, const Key128& key) {
  if (detail::seal_checksum(s) != s.checksum)
    throw Error(ErrorCode::BadChecksum, "sealed payload checksum mismatch");
  if (s.ciphertext.empty() || s.ciphertext.size() % kBlockSize != 0)
    throw Error(ErrorCode::Malformed, "ciphertext length is not a positive multiple of 8");

  Bytes plain = s.ciphertext;
  decrypt_blocks(plain, key);
  const auto n = unpadded_length(plain);
  if (n != s.original_length)
    throw Error(ErrorCode::LengthMismatch, "recorded length " + std::to_string(s.original_length) +
                                               " disagrees with padding (" + std::to_string(n) + ")");
  plain.resize(n);
  return plain;
}

inline Bytes open(ByteView sealed_bytes, const Key128& key) { return open(parse_sealed(sealed_bytes), key); }

}  // namespace etea
