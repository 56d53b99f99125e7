// Copyright 2026 gplab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GPLAB_RNG_HPP_
#define GPLAB_RNG_HPP_

#include <cstdint>
#include <cstddef>

namespace gplab {

// Fixed-increment splittable generator (SplitMix64), Steele/Lea/Flood,
// "Fast splittable pseudorandom number generators", OOPSLA 2014, in the
// public-domain formulation by Sebastiano Vigna. Counter-based: jumping
// ahead is a single addition, and hashing (master_seed, replicate_id)
// into a fresh state gives independent streams for parallel replicates.
class SplitMix64 {
 public:
  SplitMix64() = default;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits. Avoids
  // std::uniform_real_distribution, whose output is implementation-defined;
  // results must be bit-identical across standard libraries.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, m) without modulo bias (Lemire's multiply-shift).
  std::size_t next_index(std::size_t m) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(next_u64()) * m) >> 64);
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_ = 0x853C49E6748FEA9BULL;
};

// One SplitMix64 round used as a 64-bit mixing hash.
inline std::uint64_t mix_bits(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives the seed for one replicate from the master seed. Chained mixing
// keeps streams for distinct (replicate, batch) pairs statistically
// independent of each other and of the master stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replicate,
                                 std::uint64_t batch = 0) {
  std::uint64_t h = mix_bits(master ^ 0x2545F4914F6CDD1DULL);
  h = mix_bits(h ^ mix_bits(batch));
  h = mix_bits(h ^ mix_bits(replicate));
  return h;
}

}  // namespace gplab

#endif  // GPLAB_RNG_HPP_
