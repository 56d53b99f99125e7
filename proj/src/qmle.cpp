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

#include "gplab/qmle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gplab/sibuya.hpp"
#include "gplab/stats.hpp"

namespace gplab {

QmleResult qmle(const SuffStats& stats) {
  stats.validate();
  QmleResult r;
  if (stats.k_n == 1) {
    r.boundary = QmleBoundary::kAllOneBlock;
    r.alpha_hat = 0.0;
    return r;
  }
  if (stats.k_n == stats.n) {
    r.boundary = QmleBoundary::kAllSingletons;
    r.alpha_hat = 1.0;
    return r;
  }
  // 1 < k_n < n: psi_n(0+) = +inf, psi_n(1-) = -inf, slope <= -1/2, so the
  // root exists, is unique, and any bracket-safeguarded Newton converges.
  double lo = 1e-12, hi = 1.0 - 1e-12;
  double x = 0.5;
  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 200;
  for (int it = 1; it <= kMaxIter; ++it) {
    const auto [value, derivative] = sibuya::psi_n(x, stats);
    r.iterations = it;
    r.residual = std::abs(value);
    if (r.residual <= kTol) {
      r.alpha_hat = x;
      return r;
    }
    (value > 0.0 ? lo : hi) = x;
    double next = x - value / derivative;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection safeguard
    x = next;
  }
  // The slope bound makes the bracket contract geometrically; reaching the
  // cap with a residual above tolerance indicates corrupted statistics.
  throw std::runtime_error("qmle: root refinement did not converge");
}

AlphaInterval ci_alpha(const SuffStats& stats, const QmleResult& result, double eps) {
  if (result.boundary != QmleBoundary::kInterior)
    throw std::domain_error("ci_alpha: CI undefined at boundary");
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("ci_alpha: eps outside (0,1)");
  const double tau = stats::normal_quantile(1.0 - 0.5 * eps);
  const double info = sibuya::fisher_info(result.alpha_hat, 1e-9).value;
  AlphaInterval ci;
  ci.half_width = tau / std::sqrt(static_cast<double>(stats.k_n) * info);
  ci.lo = std::max(0.0, result.alpha_hat - ci.half_width);
  ci.hi = std::min(1.0, result.alpha_hat + ci.half_width);
  return ci;
}

}  // namespace gplab
