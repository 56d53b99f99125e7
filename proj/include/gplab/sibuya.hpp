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

#ifndef GPLAB_SIBUYA_HPP_
#define GPLAB_SIBUYA_HPP_

#include <cstdint>

#include "gplab/partition.hpp"
#include "gplab/rng.hpp"

namespace gplab::sibuya {

// pmf(j) = alpha * prod_{i=1}^{j-1}(i - alpha) / j!  for j >= 1.
double pmf(double alpha, std::int64_t j);

// Survival function P(J > j) = prod_{i=1}^{j}(1 - alpha/i); j may exceed the
// integer range of double, hence the double argument.
double survival(double alpha, double j);

struct FisherInfo {
  double alpha = 0.0;
  double value = 0.0;          // nats^2
  std::int64_t truncation_j = 0;
  double tail_bound = 0.0;     // rigorous bound on the truncation residual
};

// Fisher information of the size distribution:
//   1/alpha^2 + sum_j pmf(j) / (alpha (j - alpha)).
// Summed explicitly to truncation_j, with the remainder replaced by a
// closed-form integral correction whose error bound is reported in
// tail_bound (< tol).  Throws std::runtime_error if tol is unreachable
// within the term cap.
FisherInfo fisher_info(double alpha, double tol);

// Same quantity through the other route,
//   1/alpha^2 + sum_j pmf(j) sum_{i<j} 1/(i - alpha)^2,
// evaluated by summation order exchange against the survival function.
// Kept as an independent cross-check of fisher_info.
double fisher_info_double_sum(double alpha, double tol);

// Population score-mean function
//   psi(x) = 1/x - sum_j pmf_alpha(j) sum_{i<j} 1/(i - x),
// strictly decreasing on (0,1) with root at x = alpha.
double psi(double x, double alpha, double tol);

struct PsiN {
  double value = 0.0;
  double derivative = 0.0;
};

// Empirical counterpart
//   psi_n(x) = (k_n - 1)/(x k_n) - sum_j (k_{n,j}/k_n) sum_{i<j} 1/(i - x)
// and its derivative in x.  -derivative >= 1/2 for n >= 2.
PsiN psi_n(double x, const SuffStats& stats);

// Draws from the size distribution by inverting the survival function;
// returned as double because the power-law tail reaches beyond 2^53.
double sample(double alpha, SplitMix64& rng);

}  // namespace gplab::sibuya

#endif  // GPLAB_SIBUYA_HPP_
