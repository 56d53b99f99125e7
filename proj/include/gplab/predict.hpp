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

#ifndef GPLAB_PREDICT_HPP_
#define GPLAB_PREDICT_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "gplab/partition.hpp"
#include "gplab/qmle.hpp"
#include "gplab/rng.hpp"

namespace gplab {

enum class SimplexKind {
  kQmleZero,   // (k alpha_hat / n, (|U_i| - alpha_hat)/n, ...)
  kFrequency,  // (0, |U_i|/n, ...)
  kQmleTheta,  // ((theta + k alpha_hat)/(n+theta), (|U_i| - alpha_hat)/(n+theta), ...)
};

// True predictive simplex over {0, ..., k_n} paired with an estimate built
// from the same partition; index 0 is the new-block entry.
struct SimplexPair {
  std::vector<double> truth;
  std::vector<double> estimate;
  SimplexKind kind = SimplexKind::kQmleZero;
  double theta = 0.0;  // QmleTheta only
  // alpha_hat == 1 with singletons present makes the estimate degenerate
  // (some entries would be zero); flagged rather than rejected.
  bool degenerate = false;
};

SimplexPair estimate_simplex(const PartitionState& state, double alpha_hat, SimplexKind kind,
                             double theta = 0.0);

// Total variation 0.5 * sum |estimate_i - truth_i|; equals the sup over
// index subsets of |estimate(I) - truth(I)|.
double tv(const SimplexPair& pair);

// KL(estimate || truth) = sum estimate_i log(estimate_i / truth_i) with the
// 0 log 0 = 0 convention (only index 0 of the frequency estimate is zero).
double kl(const SimplexPair& pair);

// sum truth_i f(estimate_i / truth_i) for convex f with f(1) = 0.
double f_divergence(const SimplexPair& pair, const std::function<double(double)>& f);

enum class Divergence { kKl, kTv, kChi2, kHellinger };
double f_divergence(const SimplexPair& pair, Divergence which);

// Half-width of the confidence band valid simultaneously for every subset
// of {0, ..., k_n}: (sqrt(k_n)/n) tau_{1-eps/2} / sqrt(i(alpha_hat)).
double uniform_ci_half_width(const SuffStats& stats, const QmleResult& result, double eps);

struct SubsetCI {
  enum class Kind { kUniform, kLocal };
  std::vector<std::int64_t> subset;  // 1-based block indices
  double center = 0.0;
  double half_width = 0.0;
  Kind kind = Kind::kLocal;
};

// Narrower interval for subsets I of {1..k_n} whose mean block size is at
// most n*delta_n: half-width (|I| / (n sqrt(k_n))) tau_{1-eps/2}/sqrt(i(alpha_hat)),
// centered at the estimate's mass on I.  Throws std::domain_error if I
// contains 0 and std::invalid_argument if I fails the membership test.
SubsetCI local_ci(std::span<const std::int64_t> block_sizes, const QmleResult& result, double eps,
                  std::span<const std::int64_t> subset, double delta_n);

// Uniform draw from the family of admissible subsets by rejection: each
// index of {1..k_n} is included with probability 1/2; empty draws and draws
// failing the mean-size test are rejected.  Throws std::runtime_error with
// an acceptance-rate diagnostic if no draw is accepted within the attempt cap.
std::vector<std::int64_t> sample_subset_in(std::span<const std::int64_t> block_sizes,
                                           double delta_n, SplitMix64& rng);

// Membership test for the local-CI subset family.
bool subset_admissible(std::span<const std::int64_t> block_sizes,
                       std::span<const std::int64_t> subset, double delta_n);

double delta_kn_pow(std::int64_t k_n);                       // k_n^{-0.51}
double delta_sqrt_kn_log(std::int64_t k_n, std::int64_t n);  // (sqrt(k_n) log n)^{-1} v k_n^{-1}

}  // namespace gplab

#endif  // GPLAB_PREDICT_HPP_
