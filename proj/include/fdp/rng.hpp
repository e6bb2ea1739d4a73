// Copyright 2026 The fdpaudit Authors
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
//
// Counter-based randomness. Every variate is addressed by
// (seed, stream, index): there is no generator state, so Monte-Carlo loops
// can be partitioned across threads in any order and still produce
// bit-identical results. The block function is Philox4x32-10; uniforms take
// 53 bits from one block, and normals apply the inverse normal CDF to a
// uniform (the exact double may differ across libm implementations only
// through sqrt/log rounding inside that transform).

#ifndef FDP_RNG_HPP_
#define FDP_RNG_HPP_

#include <array>
#include <cstdint>

#include "fdp/special.hpp"

namespace fdp {

namespace detail {

inline void philox_round(std::array<uint32_t, 4>& ctr,
                         std::array<uint32_t, 2>& key) {
  constexpr uint64_t kM0 = 0xD2511F53, kM1 = 0xCD9E8D57;
  const uint64_t p0 = kM0 * static_cast<uint64_t>(ctr[0]);
  const uint64_t p1 = kM1 * static_cast<uint64_t>(ctr[2]);
  ctr = {static_cast<uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
         static_cast<uint32_t>(p1),
         static_cast<uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
         static_cast<uint32_t>(p0)};
  key[0] += 0x9E3779B9;  // golden ratio
  key[1] += 0xBB67AE85;  // sqrt(3)-1
}

inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                          std::array<uint32_t, 2> key) {
  for (int i = 0; i < 10; ++i) philox_round(ctr, key);
  return ctr;
}

}  // namespace detail

// Stateless stream of uniforms/normals keyed by a 64-bit seed and a stream id.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

  // Two independent uint64 words for sample index i.
  std::array<uint64_t, 2> words(uint64_t i) const {
    const auto b = detail::philox4x32(
        {static_cast<uint32_t>(i), static_cast<uint32_t>(i >> 32),
         static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)},
        {static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32)});
    return {(static_cast<uint64_t>(b[0]) << 32) | b[1],
            (static_cast<uint64_t>(b[2]) << 32) | b[3]};
  }

  // Uniform on (0,1): 53 random bits, then offset by half an ulp so the
  // result is never exactly 0 (normal quantile stays finite).
  double uniform(uint64_t i) const {
    return to_unit(words(i)[0]);
  }

  double normal(uint64_t i) const {
    return norm_quantile(uniform(i));
  }

  // Independent uniform pair at one index (used where a Bernoulli decision
  // and a payload draw must not share bits).
  std::array<double, 2> uniform2(uint64_t i) const {
    const auto w = words(i);
    return {to_unit(w[0]), to_unit(w[1])};
  }

 private:
  static double to_unit(uint64_t w) {
    return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
  }

  uint64_t seed_;
  uint64_t stream_;
};

// SplitMix64 finalizer; derives per-trial sub-seeds from (seed, index).
inline uint64_t mix_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace fdp

#endif  // FDP_RNG_HPP_
