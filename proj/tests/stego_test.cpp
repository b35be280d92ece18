#include <gtest/gtest.h>

#include <random>

#include "etea/stego.hpp"
#include "test_support.hpp"

namespace etea {
namespace {

ErrorCode error_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an etea::Error";
  return ErrorCode::IoError;
}

TEST(Embed, EmptyPayloadAddsOnlyTrailer) {
  const Bytes carrier(100, 0x42);
  const auto out = embed(carrier, {});
  ASSERT_EQ(out.size(), 116u);
  const auto parts = extract(out);
  EXPECT_EQ(parts.carrier, carrier);
  EXPECT_TRUE(parts.payload.empty());
}

TEST(Embed, TrailerLayout) {
  const Bytes carrier{1, 2, 3};
  const Bytes payload{9, 9};
  const auto out = embed(carrier, payload);
  const Bytes expect{1, 2, 3, 9, 9, 0, 0, 0, 0, 0, 0, 0, 2, 'E', 'T', 'E', 'A', 'S', 'T', 'E', 'G'};
  EXPECT_EQ(out, expect);
}

TEST(Embed, RoundTripPreservesCarrier) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 200; ++i) {
    const auto c = test::random_bytes(rng, 1 + rng() % 2000);
    const auto p = test::random_bytes(rng, rng() % 2000);
    const auto out = embed(c, p);
    ASSERT_TRUE(std::equal(c.begin(), c.end(), out.begin()));
    const auto parts = extract(out);
    ASSERT_EQ(parts.carrier, c);
    ASSERT_EQ(parts.payload, p);
  }
}

TEST(Embed, Errors) {
  EXPECT_EQ(error_of([] { embed(ByteView{}, as_bytes("x")); }), ErrorCode::EmptyCarrier);
  const auto once = embed(as_bytes("video"), as_bytes("secret"));
  EXPECT_EQ(error_of([&] { embed(once, as_bytes("again")); }), ErrorCode::AlreadyEmbedded);
}

TEST(Embed, ForceWrapsAndExtractReturnsOutermost) {
  const auto once = embed(as_bytes("video"), as_bytes("inner"));
  const auto twice = embed(once, as_bytes("outer"), true);
  const auto parts = extract(twice);
  EXPECT_EQ(parts.payload, Bytes(as_bytes("outer").begin(), as_bytes("outer").end()));
  EXPECT_EQ(parts.carrier, once);
}

TEST(Extract, PlainFileHasNoMagic) {
  EXPECT_EQ(error_of([] { extract(as_bytes("\x00\x00\x00\x18" "ftypisom plain mp4 bytes")); }), ErrorCode::NoMagic);
  EXPECT_EQ(error_of([] { extract(as_bytes("short")); }), ErrorCode::NoMagic);
  EXPECT_EQ(error_of([] { extract(ByteView{}); }), ErrorCode::NoMagic);
}

TEST(Extract, TruncatedFileNeverYieldsPayload) {
  auto out = embed(as_bytes("some carrier bytes"), as_bytes("payload"));
  out.pop_back();
  const auto code = error_of([&] { extract(out); });
  EXPECT_TRUE(code == ErrorCode::NoMagic || code == ErrorCode::CorruptTrailer);
}

TEST(Extract, OversizedLengthIsCorruptTrailer) {
  Bytes file{1, 2, 3};
  append_be<std::uint64_t>(file, 4);
  append(file, kStegoMagic);
  EXPECT_EQ(error_of([&] { extract(file); }), ErrorCode::CorruptTrailer);
  Bytes huge;
  append_be<std::uint64_t>(huge, ~std::uint64_t{0});
  append(huge, kStegoMagic);
  EXPECT_EQ(error_of([&] { extract(huge); }), ErrorCode::CorruptTrailer);
}

}  // namespace
}  // namespace etea
