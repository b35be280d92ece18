#pragma once

// ETEA block cipher: a TEA-family Feistel cipher over 64-bit blocks with a
// 128-bit key, 32 cycles (64 rounds). Each cycle updates the left half from
// the right, then the right half from the freshly updated left.
//
// Known structural property: the MSBs of K[0]/K[1] (and of K[2]/K[3]) cancel
// in pairs, so every key has three equivalents and only 126 key bits matter.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>

#include "etea/bytes.hpp"

namespace etea {

inline constexpr std::uint32_t kDelta = 0x9E3779B9u;
inline constexpr int kCycles = 32;
inline constexpr std::size_t kBlockSize = 8;
inline constexpr std::size_t kKeySize = 16;

struct Key128 {
  std::array<std::uint32_t, 4> k{};

  constexpr std::uint32_t operator[](std::size_t i) const noexcept { return k[i]; }
  friend constexpr bool operator==(const Key128&, const Key128&) = default;
  friend constexpr auto operator<=>(const Key128&, const Key128&) = default;
};

struct Block64 {
  std::uint32_t left = 0;
  std::uint32_t right = 0;

  friend constexpr bool operator==(const Block64&, const Block64&) = default;
};

// Running key-schedule sum for cycle `i` (1-based): i * delta mod 2^32.
constexpr std::uint32_t delta_sum(int cycle) noexcept {
  return static_cast<std::uint32_t>(static_cast<std::uint32_t>(cycle) * kDelta);
}

constexpr std::array<std::uint32_t, kCycles> delta_schedule() noexcept {
  std::array<std::uint32_t, kCycles> sums{};
  std::uint32_t sum = 0;
  for (auto& s : sums) s = (sum += kDelta);
  return sums;
}

// F(m) = ((m << 4) + ka) ^ (m + delta_i) ^ ((m >> 5) + kb), all mod 2^32.
constexpr std::uint32_t round_f(std::uint32_t m, std::uint32_t ka, std::uint32_t kb,
                                std::uint32_t delta_i) noexcept {
  return ((m << 4) + ka) ^ (m + delta_i) ^ ((m >> 5) + kb);
}

// `Cycles` is a parameter only so analysis code can measure reduced-round
// variants; production callers use the default.
template <int Cycles = kCycles>
constexpr Block64 encrypt_block(Block64 b, const Key128& key) noexcept {
  static_assert(Cycles >= 0);
  std::uint32_t sum = 0;
  for (int i = 0; i < Cycles; ++i) {
    sum += kDelta;
    b.left += round_f(b.right, key[0], key[1], sum);
    b.right += round_f(b.left, key[2], key[3], sum);
  }
  return b;
}

template <int Cycles = kCycles>
constexpr Block64 decrypt_block(Block64 b, const Key128& key) noexcept {
  static_assert(Cycles >= 0);
  std::uint32_t sum = delta_sum(Cycles);
  for (int i = 0; i < Cycles; ++i) {
    b.right -= round_f(b.left, key[2], key[3], sum);
    b.left -= round_f(b.right, key[0], key[1], sum);
    sum -= kDelta;
  }
  return b;
}

// Byte <-> word conversion, big-endian.

constexpr Block64 load_block(const std::uint8_t* p) noexcept {
  return {load_be<std::uint32_t>(p), load_be<std::uint32_t>(p + 4)};
}

constexpr void store_block(std::uint8_t* p, const Block64& b) noexcept {
  store_be<std::uint32_t>(p, b.left);
  store_be<std::uint32_t>(p + 4, b.right);
}

constexpr Key128 load_key(const std::uint8_t* p) noexcept {
  return {{load_be<std::uint32_t>(p), load_be<std::uint32_t>(p + 4), load_be<std::uint32_t>(p + 8),
           load_be<std::uint32_t>(p + 12)}};
}

constexpr std::array<std::uint8_t, kKeySize> key_bytes(const Key128& key) noexcept {
  std::array<std::uint8_t, kKeySize> out{};
  for (std::size_t i = 0; i < 4; ++i) store_be<std::uint32_t>(out.data() + 4 * i, key[i]);
  return out;
}

// In-place ECB over whole blocks. `data.size()` must be a multiple of 8.
template <int Cycles = kCycles>
inline void encrypt_blocks(std::span<std::uint8_t> data, const Key128& key) noexcept {
  for (std::size_t off = 0; off + kBlockSize <= data.size(); off += kBlockSize)
    store_block(data.data() + off, encrypt_block<Cycles>(load_block(data.data() + off), key));
}

template <int Cycles = kCycles>
inline void decrypt_blocks(std::span<std::uint8_t> data, const Key128& key) noexcept {
  for (std::size_t off = 0; off + kBlockSize <= data.size(); off += kBlockSize)
    store_block(data.data() + off, decrypt_block<Cycles>(load_block(data.data() + off), key));
}

}  // namespace etea
