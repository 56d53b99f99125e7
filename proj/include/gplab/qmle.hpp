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

#ifndef GPLAB_QMLE_HPP_
#define GPLAB_QMLE_HPP_

#include <cstdint>

#include "gplab/partition.hpp"

namespace gplab {

enum class QmleBoundary { kInterior, kAllOneBlock, kAllSingletons };

struct QmleResult {
  double alpha_hat = 0.0;
  QmleBoundary boundary = QmleBoundary::kInterior;
  std::int64_t iterations = 0;
  double residual = 0.0;  // |psi_n(alpha_hat)| for interior solutions
};

// Discount-parameter estimate from sufficient statistics.  k_n = 1 maps to
// 0, k_n = n maps to 1; otherwise the unique root of the score equation on
// (0,1), found by Newton steps safeguarded by a maintained bracket
// (the score is strictly decreasing).  Interior residual <= 1e-12.
QmleResult qmle(const SuffStats& stats);

struct AlphaInterval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width = 0.0;
};

// Asymptotic confidence interval alpha_hat +- tau_{1-eps/2}/sqrt(k_n i(alpha_hat)),
// clipped to [0,1].  Throws std::domain_error for boundary estimates.
AlphaInterval ci_alpha(const SuffStats& stats, const QmleResult& result, double eps);

}  // namespace gplab

#endif  // GPLAB_QMLE_HPP_
