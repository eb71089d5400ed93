// Copyright 2026 The fairmas Authors
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

#ifndef FAIRMAS_RNG_H_
#define FAIRMAS_RNG_H_

// Counter-based random streams.
//
// A stream is keyed by (seed, stream id). Draw k of a stream is
//
//   Mix(key + Mix(k))   with   key = Mix(seed ^ Mix(stream + kStreamSalt))
//
// where Mix is the SplitMix64 finalizer. Every draw is a pure function of
// (seed, stream, k), so sample i of a Monte Carlo estimate sees the same
// numbers no matter which worker computes it.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fairmas {

constexpr std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class CounterStream {
 public:
  static constexpr std::uint64_t kStreamSalt = 0x6a09e667f3bcc909ull;

  constexpr CounterStream(std::uint64_t seed, std::uint64_t stream)
      : key_(Mix64(seed ^ Mix64(stream + kStreamSalt))) {}

  constexpr std::uint64_t NextU64() { return Mix64(key_ + Mix64(counter_++)); }

  // Uniform on [0, 1) with 53 random bits.
  constexpr double NextUniform() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound); bound must be positive.
  std::uint64_t NextBelow(std::uint64_t bound) {
    // Lemire's multiply-shift with rejection.
    for (;;) {
      const unsigned __int128 m =
          static_cast<unsigned __int128>(NextU64()) * bound;
      const auto low = static_cast<std::uint64_t>(m);
      if (low >= bound || low >= (0 - bound) % bound) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  // Standard normal via Box-Muller (one variate per two uniforms).
  double NextNormal() {
    const double u1 = 1.0 - NextUniform();  // (0, 1]
    const double u2 = NextUniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fairmas

#endif  // FAIRMAS_RNG_H_
