#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <zlib.h>

namespace etea {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

// Big-endian (network order) integer helpers. All on-disk and on-wire
// integers in this library use them.

template <typename UInt>
constexpr UInt load_be(const std::uint8_t* p) noexcept {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v = static_cast<UInt>((v << 8) | p[i]);
  return v;
}

template <typename UInt>
constexpr void store_be(std::uint8_t* p, UInt v) noexcept {
  for (std::size_t i = sizeof(UInt); i-- > 0;) {
    p[i] = static_cast<std::uint8_t>(v & 0xFF);
    v = static_cast<UInt>(v >> 8);
  }
}

template <typename UInt>
inline void append_be(Bytes& out, UInt v) {
  const auto at = out.size();
  out.resize(at + sizeof(UInt));
  store_be<UInt>(out.data() + at, v);
}

inline void append(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

inline void append(Bytes& out, std::string_view text) { out.insert(out.end(), text.begin(), text.end()); }

inline ByteView as_bytes(std::string_view text) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()};
}

// CRC-32 (IEEE 802.3 / zip polynomial, reflected). Incremental: pass the
// previous value as `crc` to continue a running checksum.
inline std::uint32_t crc32(ByteView data, std::uint32_t crc = 0) noexcept {
  // zlib takes uInt lengths; feed large buffers in slices.
  constexpr std::size_t kSlice = 1u << 30;
  uLong c = crc;
  while (!data.empty()) {
    const auto n = data.size() < kSlice ? data.size() : kSlice;
    c = ::crc32(c, data.data(), static_cast<uInt>(n));
    data = data.subspan(n);
  }
  return static_cast<std::uint32_t>(c);
}

}  // namespace etea
