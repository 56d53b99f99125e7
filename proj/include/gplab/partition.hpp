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

#ifndef GPLAB_PARTITION_HPP_
#define GPLAB_PARTITION_HPP_

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gplab/mixing.hpp"
#include "gplab/rng.hpp"

namespace gplab {

// Sufficient statistics of a partition: n, the block count k_n, and the
// size-count table j -> k_{n,j}.
struct SuffStats {
  std::int64_t n = 0;
  std::int64_t k_n = 0;
  std::unordered_map<std::int64_t, std::int64_t> size_counts;

  // Checks the counting identities sum_j k_{n,j} = k_n and
  // sum_j j*k_{n,j} = n; throws std::logic_error on violation.
  void validate() const;
};

struct Assignment {
  bool new_block = false;
  std::int64_t block = -1;  // 0-based index into block_sizes(), -1 for a new block
};

// Mixture weight v_{n,k} = sum_j mu_j * exp(exact_log_v(theta_j, n, k, alpha))
// of the base (untilted) measure.  Underflows for large n; intended for the
// small-n exact computations.
double mixture_v(const ParticleMeasure& base, std::int64_t n, std::int64_t k, double alpha);

// Sequentially grown exchangeable partition.  Stores block sizes only (the
// law is exchangeable, every statistic of interest is a size functional)
// plus the particle measure tilted at the current (n, k_n).
//
// Existing-block selection uses the split (s - alpha) = (s - 1) + (1 - alpha):
// with probability (n-k)/(n-k*alpha) pick a slot from an array holding each
// block's index (size-1) times, otherwise pick a block uniformly.  Both picks
// are O(1); the array grows by at most one entry per step.
class PartitionState {
 public:
  PartitionState(double alpha, const MixingSpec& spec, std::uint64_t seed);
  // Runs many replicates off one discretization; base is the untilted measure.
  PartitionState(double alpha, ParticleMeasure base, std::uint64_t seed);

  Assignment step();
  SuffStats run_to(std::int64_t n_target);
  SuffStats stats() const;

  std::int64_t n() const { return n_; }
  std::int64_t k() const { return k_; }
  double alpha() const { return alpha_; }
  const std::vector<std::int64_t>& block_sizes() const { return block_sizes_; }
  const ParticleMeasure& measure() const { return pm_; }
  SplitMix64& rng() { return rng_; }

  // Predictive simplex (p_0, p_1, ..., p_k): p_0 = ratio_new_block,
  // p_i = ratio_existing * (|U_i| - alpha).  Entries sum to one.
  std::vector<double> true_simplex() const;

  // k_n / n^alpha.
  double kn_over_n_alpha() const;

  void reserve(std::int64_t n_target);

 private:
  double alpha_;
  ParticleMeasure pm_;
  std::vector<std::int64_t> block_sizes_;
  std::int64_t n_ = 1;
  std::int64_t k_ = 1;
  std::unordered_map<std::int64_t, std::int64_t> size_counts_;
  std::vector<std::int32_t> growth_slots_;  // block index repeated (size-1) times
  SplitMix64 rng_;

  void grow_block(std::int64_t idx);
};

struct EnumeratedPartition {
  std::vector<std::int64_t> sizes;  // descending
  double probability = 0.0;
};

// Enumerates every set partition of [n] (one entry per labeled partition)
// with its probability v_{n,k} * prod_blocks prod_{i<|U|}(i - alpha).
// Requires n <= 10 and an exact-node mixing spec (Dirac or Atoms).
std::vector<EnumeratedPartition> enumerate_exact(std::int64_t n, double alpha,
                                                 const MixingSpec& spec);

}  // namespace gplab

#endif  // GPLAB_PARTITION_HPP_
