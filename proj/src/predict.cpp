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

#include "gplab/predict.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gplab/sibuya.hpp"
#include "gplab/stats.hpp"

namespace gplab {

SimplexPair estimate_simplex(const PartitionState& state, double alpha_hat, SimplexKind kind,
                             double theta) {
  if (!(alpha_hat >= 0.0 && alpha_hat <= 1.0))
    throw std::domain_error("estimate_simplex: alpha_hat outside [0,1]");
  if (kind == SimplexKind::kQmleTheta && !(theta > -alpha_hat))
    throw std::domain_error("estimate_simplex: need theta > -alpha_hat");
  SimplexPair pair;
  pair.kind = kind;
  pair.theta = kind == SimplexKind::kQmleTheta ? theta : 0.0;
  pair.truth = state.true_simplex();

  const auto& sizes = state.block_sizes();
  const double n = static_cast<double>(state.n());
  const double k = static_cast<double>(state.k());
  pair.estimate.resize(sizes.size() + 1);
  switch (kind) {
    case SimplexKind::kQmleZero: {
      pair.estimate[0] = k * alpha_hat / n;
      for (std::size_t i = 0; i < sizes.size(); ++i)
        pair.estimate[i + 1] = (static_cast<double>(sizes[i]) - alpha_hat) / n;
      break;
    }
    case SimplexKind::kFrequency: {
      pair.estimate[0] = 0.0;
      for (std::size_t i = 0; i < sizes.size(); ++i)
        pair.estimate[i + 1] = static_cast<double>(sizes[i]) / n;
      break;
    }
    case SimplexKind::kQmleTheta: {
      const double inv = 1.0 / (n + theta);
      pair.estimate[0] = (theta + k * alpha_hat) * inv;
      for (std::size_t i = 0; i < sizes.size(); ++i)
        pair.estimate[i + 1] = (static_cast<double>(sizes[i]) - alpha_hat) * inv;
      break;
    }
  }
  if (alpha_hat == 1.0 && state.k() < state.n()) pair.degenerate = true;
  if (alpha_hat == 1.0 && state.k() == state.n() && kind != SimplexKind::kFrequency)
    pair.degenerate = true;  // all mass on the new-block entry
  return pair;
}

double tv(const SimplexPair& pair) {
  if (pair.truth.size() != pair.estimate.size())
    throw std::invalid_argument("tv: mismatched simplex lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < pair.truth.size(); ++i)
    s += std::abs(pair.estimate[i] - pair.truth[i]);
  return 0.5 * s;
}

double kl(const SimplexPair& pair) {
  if (pair.truth.size() != pair.estimate.size())
    throw std::invalid_argument("kl: mismatched simplex lengths");
  double s = 0.0, comp = 0.0;  // Kahan compensation: terms nearly cancel
  for (std::size_t i = 0; i < pair.truth.size(); ++i) {
    const double p = pair.estimate[i];
    const double q = pair.truth[i];
    if (p == 0.0) continue;  // 0 log 0 = 0
    if (!(q > 0.0)) throw std::domain_error("kl: truth entry not positive");
    const double term = p * std::log1p((p - q) / q);
    const double y = term - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

double f_divergence(const SimplexPair& pair, const std::function<double(double)>& f) {
  if (pair.truth.size() != pair.estimate.size())
    throw std::invalid_argument("f_divergence: mismatched simplex lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < pair.truth.size(); ++i) {
    if (!(pair.truth[i] > 0.0)) throw std::domain_error("f_divergence: truth entry not positive");
    const double v = f(pair.estimate[i] / pair.truth[i]);
    if (!std::isfinite(v)) throw std::domain_error("f_divergence: f not finite at a ratio");
    s += pair.truth[i] * v;
  }
  return s;
}

double f_divergence(const SimplexPair& pair, Divergence which) {
  switch (which) {
    case Divergence::kKl:
      return kl(pair);
    case Divergence::kTv:
      return tv(pair);
    case Divergence::kChi2:
      return f_divergence(pair, [](double x) { return (x - 1.0) * (x - 1.0); });
    case Divergence::kHellinger:
      return f_divergence(pair, [](double x) {
        const double d = std::sqrt(x) - 1.0;
        return 0.5 * d * d;
      });
  }
  throw std::invalid_argument("f_divergence: unknown divergence");
}

double uniform_ci_half_width(const SuffStats& stats, const QmleResult& result, double eps) {
  if (result.boundary != QmleBoundary::kInterior)
    throw std::domain_error("uniform_ci_half_width: undefined at boundary estimate");
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("uniform_ci_half_width: eps outside (0,1)");
  const double tau = stats::normal_quantile(1.0 - 0.5 * eps);
  const double info = sibuya::fisher_info(result.alpha_hat, 1e-9).value;
  return std::sqrt(static_cast<double>(stats.k_n)) / static_cast<double>(stats.n) * tau /
         std::sqrt(info);
}

bool subset_admissible(std::span<const std::int64_t> block_sizes,
                       std::span<const std::int64_t> subset, double delta_n) {
  if (subset.empty()) return false;
  const double n = [&] {
    double total = 0.0;
    for (std::int64_t s : block_sizes) total += static_cast<double>(s);
    return total;
  }();
  double mass = 0.0;
  for (std::int64_t i : subset) {
    if (i < 1 || i > static_cast<std::int64_t>(block_sizes.size()))
      throw std::domain_error("subset_admissible: index outside {1..k_n}");
    mass += static_cast<double>(block_sizes[static_cast<std::size_t>(i - 1)]);
  }
  return mass / static_cast<double>(subset.size()) <= n * delta_n;
}

SubsetCI local_ci(std::span<const std::int64_t> block_sizes, const QmleResult& result, double eps,
                  std::span<const std::int64_t> subset, double delta_n) {
  if (result.boundary != QmleBoundary::kInterior)
    throw std::domain_error("local_ci: undefined at boundary estimate");
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("local_ci: eps outside (0,1)");
  const double k_n = static_cast<double>(block_sizes.size());
  if (!(delta_n >= 1.0 / k_n)) throw std::domain_error("local_ci: delta_n below 1/k_n");
  for (std::int64_t i : subset)
    if (i == 0) throw std::domain_error("local_ci: subset must exclude the new-block index 0");
  if (!subset_admissible(block_sizes, subset, delta_n))
    throw std::invalid_argument("local_ci: subset fails the mean-size membership test");

  double n = 0.0, mass = 0.0;
  for (std::int64_t s : block_sizes) n += static_cast<double>(s);
  for (std::int64_t i : subset)
    mass += static_cast<double>(block_sizes[static_cast<std::size_t>(i - 1)]) - result.alpha_hat;

  const double tau = stats::normal_quantile(1.0 - 0.5 * eps);
  const double info = sibuya::fisher_info(result.alpha_hat, 1e-9).value;
  SubsetCI ci;
  ci.kind = SubsetCI::Kind::kLocal;
  ci.subset.assign(subset.begin(), subset.end());
  ci.center = mass / n;
  ci.half_width = static_cast<double>(subset.size()) / (n * std::sqrt(k_n)) * tau / std::sqrt(info);
  return ci;
}

std::vector<std::int64_t> sample_subset_in(std::span<const std::int64_t> block_sizes,
                                           double delta_n, SplitMix64& rng) {
  const std::int64_t k_n = static_cast<std::int64_t>(block_sizes.size());
  if (k_n < 1) throw std::invalid_argument("sample_subset_in: empty partition");
  if (!(delta_n >= 1.0 / static_cast<double>(k_n)))
    throw std::domain_error("sample_subset_in: delta_n below 1/k_n");
  constexpr std::int64_t kAttemptCap = 1'000'000;
  std::vector<std::int64_t> subset;
  for (std::int64_t attempt = 1; attempt <= kAttemptCap; ++attempt) {
    subset.clear();
    for (std::int64_t i = 1; i <= k_n; ++i)
      if (rng.next_double() < 0.5) subset.push_back(i);
    if (subset.empty()) continue;
    if (subset_admissible(block_sizes, subset, delta_n)) return subset;
  }
  throw std::runtime_error(
      "sample_subset_in: no admissible subset in " + std::to_string(kAttemptCap) +
      " attempts (acceptance rate < " + std::to_string(1.0 / kAttemptCap) + ")");
}

double delta_kn_pow(std::int64_t k_n) { return std::pow(static_cast<double>(k_n), -0.51); }

double delta_sqrt_kn_log(std::int64_t k_n, std::int64_t n) {
  const double kd = static_cast<double>(k_n);
  const double alt = 1.0 / (std::sqrt(kd) * std::log(static_cast<double>(n)));
  return std::max(alt, 1.0 / kd);
}

}  // namespace gplab
