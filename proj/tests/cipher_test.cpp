#include <gtest/gtest.h>

#include <random>

#include "etea/cipher.hpp"
#include "test_support.hpp"

namespace etea {
namespace {

Key128 random_key(std::mt19937_64& rng) {
  return {{static_cast<std::uint32_t>(rng()), static_cast<std::uint32_t>(rng()), static_cast<std::uint32_t>(rng()),
           static_cast<std::uint32_t>(rng())}};
}

Block64 random_block(std::mt19937_64& rng) {
  return {static_cast<std::uint32_t>(rng()), static_cast<std::uint32_t>(rng())};
}

TEST(RoundF, ZeroInputs) {
  EXPECT_EQ(round_f(0, 0, 0, 0), 0u);
  EXPECT_EQ(round_f(0, 0, 0, 0x9E3779B9), 0x9E3779B9u);
}

TEST(RoundF, MatchesStraightLineTranscription) {
  // (1<<4)+2 = 0x12, 1+delta = 0x9E3779BA, (1>>5)+3 = 3; 0x12^0x9E3779BA^3.
  EXPECT_EQ(round_f(1, 2, 3, 0x9E3779B9), 0x9E3779ABu);
}

TEST(RoundF, WrapsModulo2To32) {
  EXPECT_EQ(round_f(0xFFFFFFFF, 0, 0, 1), (0xFFFFFFF0u) ^ 0u ^ 0x07FFFFFFu);
}

TEST(DeltaSchedule, ExactMultiples) {
  constexpr auto sums = delta_schedule();
  static_assert(sums[0] == 0x9E3779B9u);
  for (int i = 1; i < kCycles; ++i) EXPECT_EQ(static_cast<std::uint32_t>(sums[i] - sums[i - 1]), kDelta);
  EXPECT_EQ(sums[31], 0xC6EF3720u);  // 32 * delta mod 2^32, the classic TEA decode start
  EXPECT_EQ(delta_sum(32), sums[31]);
}

TEST(EncryptBlock, ZeroVectorMatchesReferenceRoutine) {
  std::uint32_t v[2] = {0, 0};
  const std::uint32_t k[4] = {0, 0, 0, 0};
  test::reference_tea_code(v, k);
  ASSERT_EQ(v[0], 0x41EA3A0Au);
  ASSERT_EQ(v[1], 0x94BAA940u);

  constexpr auto c = encrypt_block(Block64{0, 0}, Key128{});
  static_assert(c == Block64{0x41EA3A0A, 0x94BAA940});
  EXPECT_EQ(decrypt_block(c, Key128{}), (Block64{0, 0}));
}

TEST(EncryptBlock, PublishedTeaVector) {
  const Key128 key{{0x00112233, 0x44556677, 0x8899AABB, 0xCCDDEEFF}};
  const auto c = encrypt_block({0x01234567, 0x89ABCDEF}, key);
  EXPECT_EQ(c, (Block64{0x126C6B92, 0xC0653A3E}));
}

TEST(EncryptBlock, AgreesWithReferenceOnRandomInputs) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const auto key = random_key(rng);
    const auto b = random_block(rng);
    std::uint32_t v[2] = {b.left, b.right};
    test::reference_tea_code(v, key.k.data());
    const auto c = encrypt_block(b, key);
    ASSERT_EQ(c, (Block64{v[0], v[1]}));
    test::reference_tea_decode(v, key.k.data());
    ASSERT_EQ(decrypt_block(c, key), (Block64{v[0], v[1]}));
  }
}

TEST(DecryptBlock, InvertsEncrypt) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10'000; ++i) {
    const auto key = random_key(rng);
    const auto b = random_block(rng);
    ASSERT_EQ(decrypt_block(encrypt_block(b, key), key), b);
  }
}

TEST(DecryptBlock, SingleBitCorruptionYieldsDifferentBlock) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    const auto key = random_key(rng);
    const auto b = random_block(rng);
    auto c = encrypt_block(b, key);
    const auto bit = rng() % 64;
    if (bit < 32) c.left ^= 1u << bit;
    else c.right ^= 1u << (bit - 32);
    EXPECT_NE(decrypt_block(c, key), b);
  }
}

TEST(EncryptBlock, PairedMsbFlipsAreEquivalentKeys) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const auto key = random_key(rng);
    auto low = key, high = key, both = key;
    low.k[0] ^= 0x80000000u, low.k[1] ^= 0x80000000u;
    high.k[2] ^= 0x80000000u, high.k[3] ^= 0x80000000u;
    both.k = {key[0] ^ 0x80000000u, key[1] ^ 0x80000000u, key[2] ^ 0x80000000u, key[3] ^ 0x80000000u};
    const auto b = random_block(rng);
    const auto c = encrypt_block(b, key);
    EXPECT_EQ(encrypt_block(b, low), c);
    EXPECT_EQ(encrypt_block(b, high), c);
    EXPECT_EQ(encrypt_block(b, both), c);
  }
}

TEST(EncryptBlock, ZeroCyclesIsIdentity) {
  const Block64 b{0xDEADBEEF, 0x01234567};
  EXPECT_EQ(encrypt_block<0>(b, Key128{{1, 2, 3, 4}}), b);
  EXPECT_EQ(decrypt_block<0>(b, Key128{{1, 2, 3, 4}}), b);
}

TEST(BlockBytes, BigEndianLayout) {
  const std::uint8_t raw[8] = {0x01, 0x23, 0x45, 0x67, 0x89, 0xAB, 0xCD, 0xEF};
  const auto b = load_block(raw);
  EXPECT_EQ(b, (Block64{0x01234567, 0x89ABCDEF}));
  std::uint8_t back[8]{};
  store_block(back, b);
  EXPECT_TRUE(std::equal(std::begin(raw), std::end(raw), std::begin(back)));

  const Key128 key{{0x00112233, 0x44556677, 0x8899AABB, 0xCCDDEEFF}};
  const auto kb = key_bytes(key);
  EXPECT_EQ(kb[0], 0x00);
  EXPECT_EQ(kb[15], 0xFF);
  EXPECT_EQ(load_key(kb.data()), key);
}

TEST(EncryptBlocks, EcbIsBlockwise) {
  std::mt19937_64 rng(19);
  const auto key = random_key(rng);
  auto data = test::random_bytes(rng, 64);
  const auto original = data;
  encrypt_blocks(data, key);
  for (std::size_t off = 0; off < 64; off += 8)
    EXPECT_EQ(load_block(data.data() + off), encrypt_block(load_block(original.data() + off), key));
  decrypt_blocks(data, key);
  EXPECT_EQ(data, original);
}

}  // namespace
}  // namespace etea
