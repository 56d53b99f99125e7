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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "gplab/predict.hpp"
#include "gplab/qmle.hpp"
#include "gplab/stats.hpp"
#include "test_util.hpp"

using namespace gplab;

namespace {

PartitionState simulated_state(double alpha, std::int64_t n, std::uint64_t seed) {
  PartitionState st(alpha, MixingSpec::make_atoms({{0.0, 0.5}, {3.0, 0.5}}), seed);
  st.run_to(n);
  return st;
}

double subset_gap_sup(const SimplexPair& pair) {
  // brute-force sup over all subsets of |estimate(I) - truth(I)|
  const std::size_t m = pair.truth.size();
  REQUIRE(m <= 13);
  double sup = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    double gap = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (std::size_t{1} << i)) gap += pair.estimate[i] - pair.truth[i];
    sup = std::max(sup, std::abs(gap));
  }
  return sup;
}

}  // namespace

TEST_CASE("estimator closed forms on a three-element partition") {
  // find a state with sizes {2,1} under Dirac(0), alpha 0.5
  for (std::uint64_t seed = 0;; ++seed) {
    REQUIRE(seed < 10000);
    PartitionState st(0.5, MixingSpec::dirac(0.0), seed);
    st.run_to(3);
    std::vector<std::int64_t> sizes = st.block_sizes();
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    if (sizes != std::vector<std::int64_t>{2, 1}) continue;
    const std::size_t big = st.block_sizes()[0] == 2 ? 1 : 2;
    const SimplexPair hat = estimate_simplex(st, 0.5, SimplexKind::kQmleZero);
    CHECK(hat.estimate[0] == doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(hat.estimate[big] == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(hat.estimate[3 - big] == doctest::Approx(1.0 / 6).epsilon(1e-13));
    const SimplexPair freq = estimate_simplex(st, 0.5, SimplexKind::kFrequency);
    CHECK(freq.estimate[0] == 0.0);
    CHECK(freq.estimate[big] == doctest::Approx(2.0 / 3).epsilon(1e-13));
    CHECK(freq.estimate[3 - big] == doctest::Approx(1.0 / 3).epsilon(1e-13));
    break;
  }
}

TEST_CASE("theta-shifted estimator stays within |theta|/(n+theta) in TV") {
  PartitionState st = simulated_state(0.6, 400, 5);
  const QmleResult q = qmle(st.stats());
  REQUIRE(q.boundary == QmleBoundary::kInterior);
  for (double theta : {0.5, 3.0, 10.0}) {
    const SimplexPair hat = estimate_simplex(st, q.alpha_hat, SimplexKind::kQmleZero);
    const SimplexPair shifted = estimate_simplex(st, q.alpha_hat, SimplexKind::kQmleTheta, theta);
    SimplexPair between;
    between.truth = hat.estimate;
    between.estimate = shifted.estimate;
    CHECK(tv(between) <= theta / (400.0 + theta) + 1e-12);
  }
}

TEST_CASE("simplex closure for all estimator kinds") {
  PartitionState st = simulated_state(0.45, 300, 8);
  const QmleResult q = qmle(st.stats());
  for (SimplexKind kind :
       {SimplexKind::kQmleZero, SimplexKind::kFrequency, SimplexKind::kQmleTheta}) {
    const SimplexPair pair = estimate_simplex(st, q.alpha_hat, kind, 2.0);
    double t = 0.0, e = 0.0;
    for (double v : pair.truth) {
      CHECK(v > 0.0);
      t += v;
    }
    for (double v : pair.estimate) e += v;
    CHECK(t == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(e == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("tv basics and the subset identity") {
  SimplexPair same;
  same.truth = {0.25, 0.5, 0.25};
  same.estimate = same.truth;
  CHECK(tv(same) == 0.0);
  SimplexPair disjoint;
  disjoint.truth = {1.0, 0.0};
  disjoint.estimate = {0.0, 1.0};
  CHECK(tv(disjoint) == 1.0);
  SimplexPair bad;
  bad.truth = {1.0};
  bad.estimate = {0.5, 0.5};
  CHECK_THROWS_AS(tv(bad), std::invalid_argument);

  SplitMix64 rng(17);
  for (int t = 0; t < 50; ++t) {
    PartitionState st(0.3, MixingSpec::dirac(0.0), 40 + std::uint64_t(t));
    st.run_to(25);
    if (st.k() > 12) continue;
    const QmleResult q = qmle(st.stats());
    if (q.boundary != QmleBoundary::kInterior) continue;
    const SimplexPair pair = estimate_simplex(st, q.alpha_hat, SimplexKind::kQmleZero);
    CHECK(tv(pair) == doctest::Approx(subset_gap_sup(pair)).epsilon(1e-12));
  }
}

TEST_CASE("divergence catalog and conventions") {
  PartitionState st = simulated_state(0.5, 200, 3);
  const QmleResult q = qmle(st.stats());
  const SimplexPair pair = estimate_simplex(st, q.alpha_hat, SimplexKind::kQmleZero);
  SimplexPair same;
  same.truth = pair.truth;
  same.estimate = pair.truth;
  CHECK(kl(same) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(f_divergence(same, Divergence::kChi2) == doctest::Approx(0.0).epsilon(1e-14));

  // f(x) = |x-1|/2 reproduces tv through the generic path
  const double tv_f = f_divergence(pair, [](double x) { return 0.5 * std::abs(x - 1.0); });
  CHECK(tv_f == doctest::Approx(tv(pair)).epsilon(1e-12));

  // frequency estimator has a zero entry; KL must apply 0 log 0 = 0
  const SimplexPair freq = estimate_simplex(st, q.alpha_hat, SimplexKind::kFrequency);
  CHECK(std::isfinite(kl(freq)));

  // Pinsker on simulated pairs
  for (std::uint64_t s = 0; s < 30; ++s) {
    PartitionState st2 = simulated_state(0.6, 150, 100 + s);
    const QmleResult q2 = qmle(st2.stats());
    if (q2.boundary != QmleBoundary::kInterior) continue;
    const SimplexPair p2 = estimate_simplex(st2, q2.alpha_hat, SimplexKind::kQmleZero);
    CHECK(tv(p2) <= std::sqrt(0.5 * kl(p2)) + 1e-12);
  }
}

TEST_CASE("uniform CI width formula and relative-width bound") {
  PartitionState st = simulated_state(0.55, 2000, 12);
  const SuffStats s = st.stats();
  const QmleResult q = qmle(s);
  REQUIRE(q.boundary == QmleBoundary::kInterior);
  const double w = uniform_ci_half_width(s, q, 0.05);
  // doubling n at fixed k_n halves the width
  SuffStats doubled = s;
  doubled.n *= 2;
  // (same k_n; size table irrelevant for the width formula)
  CHECK(uniform_ci_half_width(doubled, q, 0.05) == doctest::Approx(0.5 * w).epsilon(1e-12));

  // relative width for subsets containing 0 is at most 1/(sqrt(k_n) alpha_hat)
  const SimplexPair pair = estimate_simplex(st, q.alpha_hat, SimplexKind::kQmleZero);
  const double tau_scaled = std::sqrt(static_cast<double>(s.k_n)) / static_cast<double>(s.n);
  const double rel = tau_scaled / pair.estimate[0];
  CHECK(rel <= 1.0 / (std::sqrt(static_cast<double>(s.k_n)) * q.alpha_hat) + 1e-12);
}

TEST_CASE("local CI membership, width ordering, and relative width") {
  PartitionState st = simulated_state(0.5, 3000, 77);
  const SuffStats s = st.stats();
  const QmleResult q = qmle(s);
  REQUIRE(q.boundary == QmleBoundary::kInterior);
  const double delta = delta_kn_pow(s.k_n);

  // the full block set is always admissible, with local width == uniform width
  std::vector<std::int64_t> full(static_cast<std::size_t>(s.k_n));
  std::iota(full.begin(), full.end(), 1);
  CHECK(subset_admissible(st.block_sizes(), full, delta));
  const SubsetCI ci = local_ci(st.block_sizes(), q, 0.05, full, delta);
  const double uw = uniform_ci_half_width(s, q, 0.05);
  CHECK(ci.half_width == doctest::Approx(uw).epsilon(1e-12));

  // relative width bound 1/(sqrt{k_n}(1 - alpha_hat)) for admissible subsets
  SplitMix64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto subset = sample_subset_in(st.block_sizes(), delta, rng);
    const SubsetCI c = local_ci(st.block_sizes(), q, 0.05, subset, delta);
    CHECK(c.half_width <= uw + 1e-15);
    const double rel = (static_cast<double>(subset.size()) /
                        (static_cast<double>(s.n) * std::sqrt(static_cast<double>(s.k_n)))) /
                       c.center;
    CHECK(rel <= 1.0 / (std::sqrt(static_cast<double>(s.k_n)) * (1.0 - q.alpha_hat)) + 1e-12);
  }

  // errors: 0 in subset, inadmissible subset, delta below 1/k_n
  std::vector<std::int64_t> with_zero{0, 1};
  CHECK_THROWS_AS(local_ci(st.block_sizes(), q, 0.05, with_zero, delta), std::domain_error);
  const auto& sizes = st.block_sizes();
  const std::int64_t biggest =
      std::max_element(sizes.begin(), sizes.end()) - sizes.begin() + 1;
  std::vector<std::int64_t> big_only{biggest};
  if (!subset_admissible(sizes, big_only, delta))
    CHECK_THROWS_AS(local_ci(sizes, q, 0.05, big_only, delta), std::invalid_argument);
  CHECK_THROWS_AS(local_ci(sizes, q, 0.05, full, 0.5 / static_cast<double>(s.k_n)),
                  std::domain_error);
}

TEST_CASE("frequency-estimator TV converges to alpha times the diversity limit") {
  // n^{1-alpha} tv(freq, truth) = alpha k_n/n^alpha + n^{1-alpha} C_n with
  // |C_n| <= (theta_hi - theta_lo)/(n + theta_lo); the replicate mean must
  // match alpha E[S] within 3 SE at this scale.
  const double alpha = 0.6;
  const std::int64_t n = 8000;
  const int reps = 400;
  std::vector<double> values;
  for (int r = 0; r < reps; ++r) {
    PartitionState st(alpha, MixingSpec::make_atoms({{0.0, 0.5}, {3.0, 0.5}}),
                      derive_seed(515151, static_cast<std::uint64_t>(r)));
    st.run_to(n);
    SimplexPair freq;
    freq.truth = st.true_simplex();
    freq.estimate.assign(freq.truth.size(), 0.0);
    for (std::size_t i = 0; i < st.block_sizes().size(); ++i)
      freq.estimate[i + 1] = static_cast<double>(st.block_sizes()[i]) / static_cast<double>(n);
    values.push_back(std::pow(static_cast<double>(n), 1.0 - alpha) * tv(freq));
  }
  // E[S] for the two-atom mixing: average of the Dirac limit means
  const auto ml_mean = [&](double theta) {
    return std::exp(std::lgamma(theta + 1.0) - std::lgamma(theta + alpha + 1.0)) *
           (theta / alpha + 1.0);
  };
  const double target = alpha * 0.5 * (ml_mean(0.0) + ml_mean(3.0));
  const double se = stats::sample_sd(values) / std::sqrt(double(reps));
  CHECK(std::abs(stats::mean(values) - target) < 3.0 * se);
}

TEST_CASE("uniform CI covers the worst-case subset at roughly 1 - eps") {
  // The sup over subsets of |estimate(I) - truth(I)| is attained at
  // I* = {i : estimate_i > truth_i} and equals the TV distance, so coverage
  // of the worst-case subset is the event tv <= half-width.
  const double eps = 0.05;
  int covered = 0, total = 0;
  for (std::uint64_t r = 0; r < 300; ++r) {
    PartitionState st(0.7, MixingSpec::dirac(0.0), derive_seed(606, r));
    st.run_to(2000);
    const SuffStats s = st.stats();
    const QmleResult q = qmle(s);
    if (q.boundary != QmleBoundary::kInterior) continue;
    const SimplexPair pair = estimate_simplex(st, q.alpha_hat, SimplexKind::kQmleZero);
    double sup = 0.0;  // mass of I* gap, computed directly
    for (std::size_t i = 0; i < pair.truth.size(); ++i)
      if (pair.estimate[i] > pair.truth[i]) sup += pair.estimate[i] - pair.truth[i];
    CHECK(sup == doctest::Approx(tv(pair)).epsilon(1e-10));
    ++total;
    if (sup <= uniform_ci_half_width(s, q, eps)) ++covered;
  }
  REQUIRE(total > 290);
  const double rate = static_cast<double>(covered) / total;
  CHECK(rate > 0.90);
  CHECK(rate <= 1.0);
}

TEST_CASE("subset sampler: singleton case and acceptance consistency") {
  std::vector<std::int64_t> one_block{5};
  SplitMix64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto subset = sample_subset_in(one_block, 1.0, rng);
    REQUIRE(subset.size() == 1);
    CHECK(subset[0] == 1);
  }
  PartitionState st = simulated_state(0.5, 500, 4);
  const double delta = delta_kn_pow(st.k());
  for (int t = 0; t < 200; ++t) {
    const auto subset = sample_subset_in(st.block_sizes(), delta, rng);
    CHECK(subset_admissible(st.block_sizes(), subset, delta));
  }
}

TEST_CASE("subset sampler is uniform over admissible subsets") {
  // k_n = 10 with a loose threshold: all 1023 nonempty subsets admissible
  std::vector<std::int64_t> sizes(10, 3);
  SplitMix64 rng(88);
  const int draws = 100000;
  std::vector<int> counts(1 << 10, 0);
  for (int t = 0; t < draws; ++t) {
    const auto subset = sample_subset_in(sizes, 1.0, rng);
    std::size_t mask = 0;
    for (std::int64_t i : subset) mask |= std::size_t{1} << (i - 1);
    ++counts[mask];
  }
  CHECK(counts[0] == 0);
  const double expected = static_cast<double>(draws) / 1023.0;
  double chi2 = 0.0;
  for (std::size_t mask = 1; mask < counts.size(); ++mask) {
    const double d = static_cast<double>(counts[mask]) - expected;
    chi2 += d * d / expected;
  }
  CHECK(chi2 < gplab::testing::chi2_crit_999(1022));
}

TEST_CASE("delta rules") {
  CHECK(delta_kn_pow(100) == doctest::Approx(std::pow(100.0, -0.51)));
  CHECK(delta_sqrt_kn_log(100, 1000) ==
        doctest::Approx(std::max(1.0 / (10.0 * std::log(1000.0)), 0.01)));
  CHECK(delta_sqrt_kn_log(4, 10) >= 0.25);  // the 1/k_n floor binds
}
