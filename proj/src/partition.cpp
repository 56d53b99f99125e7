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

#include "gplab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace gplab {

void SuffStats::validate() const {
  std::int64_t blocks = 0, elements = 0;
  for (const auto& [size, count] : size_counts) {
    if (size < 1 || count < 0) throw std::logic_error("SuffStats: invalid size-count entry");
    blocks += count;
    elements += size * count;
  }
  if (blocks != k_n) throw std::logic_error("SuffStats: sum of counts != k_n");
  if (elements != n) throw std::logic_error("SuffStats: sum of j*k_{n,j} != n");
  if (n >= 1 && !(k_n >= 1 && k_n <= n)) throw std::logic_error("SuffStats: k_n outside [1, n]");
}

double mixture_v(const ParticleMeasure& base, std::int64_t n, std::int64_t k, double alpha) {
  const auto nodes = base.nodes();
  const auto weights = base.weights();
  double v = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j)
    v += weights[j] * std::exp(exact_log_v(nodes[j], n, k, alpha));
  return v;
}

PartitionState::PartitionState(double alpha, const MixingSpec& spec, std::uint64_t seed)
    : PartitionState(alpha, discretize(spec), seed) {}

PartitionState::PartitionState(double alpha, ParticleMeasure base, std::uint64_t seed)
    : alpha_(alpha), pm_(std::move(base)), rng_(seed) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("PartitionState: alpha must be in (0,1)");
  if (!(pm_.min_node() > -alpha))
    throw std::invalid_argument("PartitionState: mixing support violates theta > -alpha");
  block_sizes_ = {1};
  size_counts_[1] = 1;
}

void PartitionState::reserve(std::int64_t n_target) {
  block_sizes_.reserve(static_cast<std::size_t>(n_target));
  growth_slots_.reserve(static_cast<std::size_t>(n_target));
}

void PartitionState::grow_block(std::int64_t idx) {
  const std::int64_t s = block_sizes_[static_cast<std::size_t>(idx)];
  auto it = size_counts_.find(s);
  if (--(it->second) == 0) size_counts_.erase(it);
  ++size_counts_[s + 1];
  block_sizes_[static_cast<std::size_t>(idx)] = s + 1;
  growth_slots_.push_back(static_cast<std::int32_t>(idx));
}

Assignment PartitionState::step() {
  const double p0 = pm_.ratio_new_block(n_, k_, alpha_);
  if (p0 < -1e-12 || p0 > 1.0 + 1e-12)
    throw std::runtime_error("PartitionState: transition probability outside [0,1]");
  Assignment a;
  const double u = rng_.next_double();
  if (u < p0) {
    a.new_block = true;
  } else {
    // P(size-proportional branch | existing) = (n - k) / (n - k*alpha)
    const double v = rng_.next_double();
    const double denom = static_cast<double>(n_) - static_cast<double>(k_) * alpha_;
    std::int64_t idx;
    if (v * denom < static_cast<double>(n_ - k_)) {
      idx = growth_slots_[rng_.next_index(growth_slots_.size())];
    } else {
      idx = static_cast<std::int64_t>(rng_.next_index(static_cast<std::size_t>(k_)));
    }
    a.block = idx;
  }
  pm_.update_after_step(n_, k_, alpha_, a.new_block);
  if (a.new_block) {
    block_sizes_.push_back(1);
    ++size_counts_[1];
    ++k_;
  } else {
    grow_block(a.block);
  }
  ++n_;
  return a;
}

SuffStats PartitionState::run_to(std::int64_t n_target) {
  if (n_target < n_) throw std::invalid_argument("run_to: target below current size");
  reserve(n_target);
  while (n_ < n_target) step();
  return stats();
}

SuffStats PartitionState::stats() const {
  SuffStats s;
  s.n = n_;
  s.k_n = k_;
  s.size_counts = size_counts_;
  return s;
}

std::vector<double> PartitionState::true_simplex() const {
  std::vector<double> p(static_cast<std::size_t>(k_) + 1);
  p[0] = pm_.ratio_new_block(n_, k_, alpha_);
  const double re = pm_.ratio_existing(n_);
  for (std::int64_t i = 0; i < k_; ++i)
    p[static_cast<std::size_t>(i) + 1] =
        re * (static_cast<double>(block_sizes_[static_cast<std::size_t>(i)]) - alpha_);
  return p;
}

double PartitionState::kn_over_n_alpha() const {
  return static_cast<double>(k_) / std::pow(static_cast<double>(n_), alpha_);
}

std::vector<EnumeratedPartition> enumerate_exact(std::int64_t n, double alpha,
                                                 const MixingSpec& spec) {
  if (n < 1 || n > 10) throw std::invalid_argument("enumerate_exact: n must be in [1, 10]");
  if (!spec.is_exact())
    throw std::invalid_argument("enumerate_exact: requires Dirac or Atoms mixing");
  const ParticleMeasure base = discretize(spec);

  // prod_{i=1}^{s-1}(i - alpha) for s = 1..n
  std::vector<double> block_weight(static_cast<std::size_t>(n) + 1, 1.0);
  for (std::int64_t s = 2; s <= n; ++s)
    block_weight[static_cast<std::size_t>(s)] =
        block_weight[static_cast<std::size_t>(s) - 1] * (static_cast<double>(s - 1) - alpha);
  std::vector<double> v_nk(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::int64_t k = 1; k <= n; ++k) v_nk[static_cast<std::size_t>(k)] = mixture_v(base, n, k, alpha);

  std::vector<EnumeratedPartition> out;
  std::vector<std::int64_t> sizes;
  // Restricted-growth enumeration: element i joins an existing block or
  // opens block #sizes.size().
  std::function<void(std::int64_t)> rec = [&](std::int64_t i) {
    if (i == n) {
      EnumeratedPartition ep;
      ep.sizes = sizes;
      std::sort(ep.sizes.begin(), ep.sizes.end(), std::greater<>());
      double w = v_nk[sizes.size()];
      for (std::int64_t s : sizes) w *= block_weight[static_cast<std::size_t>(s)];
      ep.probability = w;
      out.push_back(std::move(ep));
      return;
    }
    for (std::size_t b = 0; b < sizes.size(); ++b) {
      ++sizes[b];
      rec(i + 1);
      --sizes[b];
    }
    sizes.push_back(1);
    rec(i + 1);
    sizes.pop_back();
  };
  sizes.push_back(1);
  rec(1);
  return out;
}

}  // namespace gplab
