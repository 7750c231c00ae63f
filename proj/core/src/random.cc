// Copyright 2026 The fmoo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fmoo/random.h"

#include <cmath>
#include <numbers>

namespace fmoo {
namespace {

constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;

inline void MulHiLo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

// splitmix64 finalizer; decorrelates nearby seeds before they become keys.
std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Philox4x32::Counter Philox4x32::Generate(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    MulHiLo(kPhiloxM0, ctr[0], lo0, hi0);
    MulHiLo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, StreamDomain domain, std::uint32_t lane,
                           std::uint32_t client, std::uint32_t round, std::uint32_t step) {
  const std::uint64_t k =
      Mix64(Mix64(seed) ^ (static_cast<std::uint64_t>(domain) << 32 | lane));
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  base_ = {0, step, round, client};
}

std::uint32_t RandomStream::NextU32() {
  if (used_ == 4) {
    Philox4x32::Counter ctr = base_;
    ctr[0] = block_++;
    buffer_ = Philox4x32::Generate(ctr, key_);
    used_ = 0;
  }
  return buffer_[used_++];
}

std::uint64_t RandomStream::NextU64() {
  const std::uint64_t hi = NextU32();
  return hi << 32 | NextU32();
}

double RandomStream::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

double RandomStream::UniformOpen() {
  return (static_cast<double>(NextU64() >> 11) + 1.0) * 0x1.0p-53;
}

double RandomStream::Normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  // Box-Muller. std::normal_distribution is implementation-defined, so
  // it would make outputs depend on the standard library.
  const double r = std::sqrt(-2.0 * std::log(UniformOpen()));
  const double theta = 2.0 * std::numbers::pi * Uniform();
  spare_normal_ = r * std::sin(theta);
  has_spare_normal_ = true;
  return r * std::cos(theta);
}

std::size_t RandomStream::UniformIndex(std::size_t n) {
  // Lemire's nearly-divisionless method with rejection; exact uniformity.
  const std::uint64_t range = n;
  std::uint64_t x = NextU64();
  __uint128_t m = static_cast<__uint128_t>(x) * range;
  std::uint64_t low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      x = NextU64();
      m = static_cast<__uint128_t>(x) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

RandomStream ClientStream(std::uint64_t seed, std::size_t client, std::size_t round,
                          std::size_t step, std::size_t lane) {
  return RandomStream(seed, StreamDomain::kClientSampling, static_cast<std::uint32_t>(lane),
                      static_cast<std::uint32_t>(client), static_cast<std::uint32_t>(round),
                      static_cast<std::uint32_t>(step));
}

}  // namespace fmoo
