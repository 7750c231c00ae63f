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

#ifndef FMOO_RANDOM_H_
#define FMOO_RANDOM_H_

#include <array>
#include <cstddef>
#include <cstdint>

namespace fmoo {

// Philox4x32-10 (Salmon et al., SC'11). A pure function of (key, counter).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter Generate(Counter ctr, Key key);
};

// Which consumer a stream belongs to. Keeps problem generation, client
// sampling and server-side draws in disjoint key spaces.
enum class StreamDomain : std::uint32_t {
  kClientSampling = 1,
  kProblemGeneration = 2,
  kPartition = 3,
  kOutputSelection = 4,
  kVerification = 5,
};

// A value-type stream of draws addressed by (seed, domain, lane, client,
// round, step). Copying a stream forks it: both copies yield the same
// sequence. No state is shared between streams.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamDomain domain, std::uint32_t lane,
               std::uint32_t client, std::uint32_t round, std::uint32_t step);

  std::uint32_t NextU32();
  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on (0, 1]; safe to take the log of.
  double UniformOpen();
  double Normal();
  // Uniform integer in [0, n). n > 0.
  std::size_t UniformIndex(std::size_t n);

 private:
  Philox4x32::Key key_;
  Philox4x32::Counter base_;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

// Stream for client `client`'s sample at local step `step` of round `round`.
// `lane` separates per-objective samples when sampling is not shared.
RandomStream ClientStream(std::uint64_t seed, std::size_t client, std::size_t round,
                          std::size_t step, std::size_t lane = 0);

}  // namespace fmoo

#endif  // FMOO_RANDOM_H_
