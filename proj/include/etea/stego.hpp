#pragma once

// Append-style carrier embedding:
//
//   carrier | payload | payload_length u64 BE | "ETEASTEG"
//
// The carrier bytes are never touched, so formats that ignore trailing data
// (MP4, AVI, MKV, most players) still open the result. A fixed trailing magic
// is trivially detectable; this hides nothing from a steganalyst.

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>

#include "etea/bytes.hpp"
#include "etea/error.hpp"

namespace etea {

inline constexpr std::array<std::uint8_t, 8> kStegoMagic{'E', 'T', 'E', 'A', 'S', 'T', 'E', 'G'};
inline constexpr std::size_t kTrailerSize = 16;

struct Extracted {
  Bytes carrier;
  Bytes payload;
};

inline bool has_stego_trailer(ByteView file) noexcept {
  return file.size() >= kStegoMagic.size() &&
         std::equal(kStegoMagic.begin(), kStegoMagic.end(), file.end() - kStegoMagic.size());
}

// With `force`, a carrier that already holds a payload is wrapped again;
// extract() then returns the outermost payload.
inline Bytes embed(ByteView carrier, ByteView payload, bool force = false) {
  if (carrier.empty()) throw Error(ErrorCode::EmptyCarrier, "carrier is empty");
  if (!force && has_stego_trailer(carrier))
    throw Error(ErrorCode::AlreadyEmbedded, "carrier already contains an embedded payload");

  Bytes out;
  out.reserve(carrier.size() + payload.size() + kTrailerSize);
  append(out, carrier);
  append(out, payload);
  append_be<std::uint64_t>(out, payload.size());
  append(out, kStegoMagic);
  return out;
}

inline Extracted extract(ByteView stego) {
  if (stego.size() < kTrailerSize || !has_stego_trailer(stego))
    throw Error(ErrorCode::NoMagic, "no embedded payload found");
  const auto body = stego.size() - kTrailerSize;
  const auto length = load_be<std::uint64_t>(stego.data() + body);
  if (length > body)
    throw Error(ErrorCode::CorruptTrailer, "payload length " + std::to_string(length) + " exceeds file size");
  const auto carrier_size = body - static_cast<std::size_t>(length);
  return {Bytes(stego.begin(), stego.begin() + carrier_size),
          Bytes(stego.begin() + carrier_size, stego.begin() + body)};
}

}  // namespace etea
