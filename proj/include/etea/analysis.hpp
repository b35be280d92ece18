#pragma once

// Empirical checks of the cipher's structure: the four-key equivalence
// classes behind the 126-bit effective keyspace, and the avalanche effect.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

#include "etea/cipher.hpp"

namespace etea::analysis {

inline constexpr std::uint32_t kMsb = 0x80000000u;

// {K, K^msb(K0,K1), K^msb(K2,K3), K^all four}. All four encrypt identically.
inline std::array<Key128, 4> equivalent_keys(const Key128& key) noexcept {
  auto flip = [&key](bool low_pair, bool high_pair) {
    Key128 k = key;
    if (low_pair) k.k[0] ^= kMsb, k.k[1] ^= kMsb;
    if (high_pair) k.k[2] ^= kMsb, k.k[3] ^= kMsb;
    return k;
  };
  return {flip(false, false), flip(true, false), flip(false, true), flip(true, true)};
}

struct AvalancheReport {
  std::uint64_t trials = 0;
  double mean_flipped_bits = 0.0;
  double stddev = 0.0;
  std::array<std::uint64_t, 65> histogram{};

  friend bool operator==(const AvalancheReport&, const AvalancheReport&) = default;
};

// Per-trial engine derived from (seed, trial index), so any partition of the
// trials over threads gives the same report. Raw engine output is used
// directly because std distributions are not specified bit-for-bit.
inline std::mt19937_64 trial_engine(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

template <int Cycles = kCycles>
int avalanche_trial(std::uint64_t seed, std::uint64_t trial) {
  auto rng = trial_engine(seed, trial);
  const auto kw = rng();
  const auto kw2 = rng();
  const Key128 key{{static_cast<std::uint32_t>(kw >> 32), static_cast<std::uint32_t>(kw),
                    static_cast<std::uint32_t>(kw2 >> 32), static_cast<std::uint32_t>(kw2)}};
  const auto pw = rng();
  const int bit = static_cast<int>(rng() >> 58);  // 0..63

  const Block64 p{static_cast<std::uint32_t>(pw >> 32), static_cast<std::uint32_t>(pw)};
  const auto flipped = pw ^ (std::uint64_t{1} << bit);
  const Block64 q{static_cast<std::uint32_t>(flipped >> 32), static_cast<std::uint32_t>(flipped)};

  const auto c1 = encrypt_block<Cycles>(p, key);
  const auto c2 = encrypt_block<Cycles>(q, key);
  const auto diff = (std::uint64_t{c1.left ^ c2.left} << 32) | (c1.right ^ c2.right);
  return std::popcount(diff);
}

template <int Cycles = kCycles>
AvalancheReport avalanche(std::uint64_t trials, std::uint64_t seed, unsigned threads = 0) {
  AvalancheReport report;
  report.trials = trials;
  if (trials == 0) return report;

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

  std::vector<std::array<std::uint64_t, 65>> partial(threads);
  {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (std::uint64_t i = t; i < trials; i += threads) ++partial[t][avalanche_trial<Cycles>(seed, i)];
      });
    }
  }
  for (const auto& h : partial)
    for (std::size_t b = 0; b < h.size(); ++b) report.histogram[b] += h[b];

  // Moments from the integer histogram: order-independent, hence reproducible.
  std::uint64_t sum = 0, sum_sq = 0;
  for (std::uint64_t b = 0; b < report.histogram.size(); ++b) {
    sum += b * report.histogram[b];
    sum_sq += b * b * report.histogram[b];
  }
  const double n = static_cast<double>(trials);
  report.mean_flipped_bits = static_cast<double>(sum) / n;
  const double var = static_cast<double>(sum_sq) / n - report.mean_flipped_bits * report.mean_flipped_bits;
  report.stddev = std::sqrt(std::max(0.0, var));
  return report;
}

inline void write_text(std::ostream& os, const AvalancheReport& r, std::uint64_t seed) {
  os << "avalanche trials=" << r.trials << " seed=" << seed << '\n'
     << "mean_flipped_bits=" << r.mean_flipped_bits << '\n'
     << "stddev=" << r.stddev << '\n';
  for (std::size_t b = 0; b < r.histogram.size(); ++b)
    if (r.histogram[b] != 0) os << "bits[" << b << "]=" << r.histogram[b] << '\n';
}

inline void write_csv(std::ostream& os, const AvalancheReport& r, std::uint64_t seed) {
  os << "metric,value\n"
     << "trials," << r.trials << '\n'
     << "seed," << seed << '\n'
     << "mean_flipped_bits," << r.mean_flipped_bits << '\n'
     << "stddev," << r.stddev << '\n'
     << "flipped_bits,count\n";
  for (std::size_t b = 0; b < r.histogram.size(); ++b) os << b << ',' << r.histogram[b] << '\n';
}

struct EquivalenceSummary {
  std::uint64_t keys = 0;
  std::uint64_t blocks_per_key = 0;
  std::uint64_t class_mismatches = 0;     // must be 0
  std::uint64_t single_flip_differs = 0;  // control: expected ~= keys * blocks
};

// Random keys x random blocks: the four class members must agree everywhere,
// while flipping MSB(K[0]) alone must change the ciphertext.
inline EquivalenceSummary check_equivalent_keys(std::uint64_t keys, std::uint64_t blocks, std::uint64_t seed) {
  EquivalenceSummary s{keys, blocks, 0, 0};
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = 0; i < keys; ++i) {
    const auto a = rng(), b = rng();
    const Key128 key{{static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(a),
                      static_cast<std::uint32_t>(b >> 32), static_cast<std::uint32_t>(b)}};
    const auto cls = equivalent_keys(key);
    Key128 lone = key;
    lone.k[0] ^= kMsb;
    for (std::uint64_t j = 0; j < blocks; ++j) {
      const auto w = rng();
      const Block64 p{static_cast<std::uint32_t>(w >> 32), static_cast<std::uint32_t>(w)};
      const auto ref = encrypt_block(p, cls[0]);
      for (std::size_t m = 1; m < cls.size(); ++m)
        if (encrypt_block(p, cls[m]) != ref) ++s.class_mismatches;
      if (encrypt_block(p, lone) != ref) ++s.single_flip_differs;
    }
  }
  return s;
}

}  // namespace etea::analysis
