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

#ifndef GPLAB_MIXING_HPP_
#define GPLAB_MIXING_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gplab {

enum class MixingKind { kDirac, kAtoms, kUniform, kHalfNormal, kHalfT };

// Declarative description of the mixing distribution over the concentration
// parameter theta.  Continuous kinds are realized as a fixed node set by
// discretize(); unbounded kinds are truncated at the q_trunc quantile.
struct MixingSpec {
  MixingKind kind = MixingKind::kDirac;
  double theta = 0.0;                                 // Dirac
  std::vector<std::pair<double, double>> atoms;       // (theta, prob)
  double a = 0.0, b = 0.0;                            // Uniform on [a, b]
  double scale = 1.0;                                 // HalfNormal / HalfT
  double df = 0.0;                                    // HalfT degrees of freedom
  int nodes = 128;                                    // node count M for continuous kinds
  double q_trunc = 1.0 - 1e-6;                        // truncation quantile

  static MixingSpec dirac(double theta);
  static MixingSpec make_atoms(std::vector<std::pair<double, double>> atoms);
  static MixingSpec uniform(double a, double b, int nodes = 128);
  static MixingSpec half_normal(double scale = 1.0, int nodes = 128);
  static MixingSpec half_t(double df, double scale = 1.0, int nodes = 128);

  // Throws std::invalid_argument on structural problems (empty atoms, probs
  // not summing to one, a > b, df <= 0, nodes < 1, q_trunc outside (0,1)).
  void validate() const;

  bool is_exact() const { return kind == MixingKind::kDirac || kind == MixingKind::kAtoms; }

  std::string kind_name() const;
};

// Weighted nodes {(theta_j, w_j)} representing the mixing distribution and,
// after updates, the tilted measures it induces at each partition state.
// The node set is fixed for the lifetime of a run; only weights change.
//
// Weights are kept normalized in linear space and multiplied by bounded
// per-step factors, which keeps every update transcendental-free; the
// log-weight view is materialized on demand and satisfies
// logsumexp(log_weights) == 0 after normalization.
class ParticleMeasure {
 public:
  ParticleMeasure() = default;
  ParticleMeasure(std::vector<double> nodes, std::vector<double> weights);

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  const std::vector<double>& log_weights() const;
  bool normalized() const { return normalized_; }
  double min_node() const { return min_node_; }
  double max_node() const { return max_node_; }

  double ratio_new_block(std::int64_t n, std::int64_t k, double alpha) const;
  double ratio_existing(std::int64_t n) const;
  void update_after_step(std::int64_t n, std::int64_t k, double alpha, bool new_block);
  void renormalize();

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;  // normalized
  mutable std::vector<double> log_weights_;
  mutable bool log_dirty_ = true;
  bool normalized_ = false;
  double min_node_ = 0.0, max_node_ = 0.0;

  // Per-step scratch: ratio_new_block caches the factors (theta+k*alpha)/(theta+n)
  // and 1/(theta+n) so the following update_after_step reuses them.
  mutable std::vector<double> scratch_new_, scratch_inv_;
  mutable std::int64_t scratch_n_ = -1, scratch_k_ = -1;
  mutable double scratch_alpha_ = -1.0;

  void fill_scratch(std::int64_t n, std::int64_t k, double alpha) const;
};

// Realizes the mixing distribution as a node/weight set.
// Dirac: one node, weight 1.  Atoms: one node per atom.  Uniform: M
// Gauss-Legendre nodes on [a,b] weighted by the uniform density.
// HalfNormal/HalfT: M nodes at equal-probability quantiles of the
// distribution truncated at q_trunc, weights 1/M.
ParticleMeasure discretize(const MixingSpec& spec);

// Integral of f against the (normalized) particle measure.
double expectation(const ParticleMeasure& pm, const std::function<double(double)>& f);

// Probability that the next element opens a new block, given the measure is
// tilted at (n, k): the integral of (theta + k*alpha)/(theta + n).
double ratio_new_block(const ParticleMeasure& pm, std::int64_t n, std::int64_t k, double alpha);

// Integral of 1/(theta + n) against the tilted measure; the common factor of
// all existing-block probabilities.
double ratio_existing(const ParticleMeasure& pm, std::int64_t n);

// Advances the tilt from (n, k) to (n+1, k+1) (new_block) or (n+1, k):
// multiplies weights by (theta+k*alpha)/(theta+n) or 1/(theta+n), then
// renormalizes.  The block-size factor is theta-free and cancels.
void update_after_step(ParticleMeasure& pm, std::int64_t n, std::int64_t k, double alpha,
                       bool new_block);

// log of prod_{i=1}^{k-1}(theta+i*alpha) / prod_{i=1}^{n-1}(theta+i),
// evaluated through log-gamma; 0 for n = k = 1.
double exact_log_v(double theta, std::int64_t n, std::int64_t k, double alpha);

// Freshly tilted measure at (n, k): weights proportional to
// mu_j * exp(exact_log_v(theta_j, n, k, alpha)), built in log space so large
// n does not underflow.  Equivalent to discretize() followed by the
// corresponding sequence of update_after_step calls.
ParticleMeasure tilted_measure(const MixingSpec& spec, std::int64_t n, std::int64_t k,
                               double alpha);

namespace detail {
// Gauss-Legendre nodes and weights on [a, b]; weights sum to b - a.
void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w);
// Quantile of the half-t distribution with df degrees of freedom (scale 1),
// by bisection on a numerically integrated CDF.
double half_t_quantile(double df, double p);
}  // namespace detail

}  // namespace gplab

#endif  // GPLAB_MIXING_HPP_
