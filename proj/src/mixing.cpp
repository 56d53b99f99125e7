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

#include "gplab/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gplab/stats.hpp"

namespace gplab {

MixingSpec MixingSpec::dirac(double theta) {
  MixingSpec s;
  s.kind = MixingKind::kDirac;
  s.theta = theta;
  s.nodes = 1;
  return s;
}

MixingSpec MixingSpec::make_atoms(std::vector<std::pair<double, double>> atoms) {
  MixingSpec s;
  s.kind = MixingKind::kAtoms;
  s.atoms = std::move(atoms);
  s.nodes = static_cast<int>(s.atoms.size());
  return s;
}

MixingSpec MixingSpec::uniform(double a, double b, int nodes) {
  MixingSpec s;
  s.kind = MixingKind::kUniform;
  s.a = a;
  s.b = b;
  s.nodes = nodes;
  return s;
}

MixingSpec MixingSpec::half_normal(double scale, int nodes) {
  MixingSpec s;
  s.kind = MixingKind::kHalfNormal;
  s.scale = scale;
  s.nodes = nodes;
  return s;
}

MixingSpec MixingSpec::half_t(double df, double scale, int nodes) {
  MixingSpec s;
  s.kind = MixingKind::kHalfT;
  s.df = df;
  s.scale = scale;
  s.nodes = nodes;
  return s;
}

void MixingSpec::validate() const {
  if (nodes < 1) throw std::invalid_argument("MixingSpec: node count must be >= 1");
  switch (kind) {
    case MixingKind::kDirac:
      if (!std::isfinite(theta)) throw std::invalid_argument("MixingSpec: theta not finite");
      break;
    case MixingKind::kAtoms: {
      if (atoms.empty()) throw std::invalid_argument("MixingSpec: no atoms");
      double total = 0.0;
      for (const auto& [t, p] : atoms) {
        if (!std::isfinite(t)) throw std::invalid_argument("MixingSpec: atom not finite");
        if (p < 0.0) throw std::invalid_argument("MixingSpec: negative atom probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("MixingSpec: atom probabilities must sum to 1");
      break;
    }
    case MixingKind::kUniform:
      if (!(a <= b)) throw std::invalid_argument("MixingSpec: uniform requires a <= b");
      if (a == b && nodes > 1)
        throw std::invalid_argument("MixingSpec: degenerate interval with nodes > 1");
      break;
    case MixingKind::kHalfNormal:
      if (!(scale > 0.0)) throw std::invalid_argument("MixingSpec: scale must be positive");
      break;
    case MixingKind::kHalfT:
      if (!(df > 0.0)) throw std::invalid_argument("MixingSpec: df must be positive");
      if (!(scale > 0.0)) throw std::invalid_argument("MixingSpec: scale must be positive");
      break;
  }
  if (kind == MixingKind::kHalfNormal || kind == MixingKind::kHalfT) {
    if (!(q_trunc > 0.0 && q_trunc < 1.0))
      throw std::invalid_argument("MixingSpec: q_trunc must be in (0,1)");
  }
}

std::string MixingSpec::kind_name() const {
  switch (kind) {
    case MixingKind::kDirac: return "Dirac";
    case MixingKind::kAtoms: return "Atoms";
    case MixingKind::kUniform: return "Uniform";
    case MixingKind::kHalfNormal: return "HalfNormal";
    case MixingKind::kHalfT: return "HalfT";
  }
  return "?";
}

ParticleMeasure::ParticleMeasure(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.empty() || nodes_.size() != weights_.size())
    throw std::invalid_argument("ParticleMeasure: node/weight size mismatch");
  min_node_ = *std::min_element(nodes_.begin(), nodes_.end());
  max_node_ = *std::max_element(nodes_.begin(), nodes_.end());
  renormalize();
}

void ParticleMeasure::renormalize() {
  double total = 0.0;
  for (double w : weights_) total += w;
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::runtime_error("ParticleMeasure: weights degenerate");
  const double inv = 1.0 / total;
  for (double& w : weights_) w *= inv;
  normalized_ = true;
  log_dirty_ = true;
}

const std::vector<double>& ParticleMeasure::log_weights() const {
  if (log_dirty_) {
    log_weights_.resize(weights_.size());
    for (std::size_t j = 0; j < weights_.size(); ++j) log_weights_[j] = std::log(weights_[j]);
    log_dirty_ = false;
  }
  return log_weights_;
}

void ParticleMeasure::fill_scratch(std::int64_t n, std::int64_t k, double alpha) const {
  scratch_new_.resize(nodes_.size());
  scratch_inv_.resize(nodes_.size());
  const double ka = static_cast<double>(k) * alpha;
  const double nd = static_cast<double>(n);
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const double inv = 1.0 / (nodes_[j] + nd);
    scratch_inv_[j] = inv;
    scratch_new_[j] = (nodes_[j] + ka) * inv;
  }
  scratch_n_ = n;
  scratch_k_ = k;
  scratch_alpha_ = alpha;
}

double ParticleMeasure::ratio_new_block(std::int64_t n, std::int64_t k, double alpha) const {
  if (!(k >= 1 && k <= n)) throw std::domain_error("ratio_new_block: need 1 <= k <= n");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("ratio_new_block: alpha outside (0,1)");
  if (min_node_ + static_cast<double>(k) * alpha <= 0.0)
    throw std::domain_error("ratio_new_block: node violates theta > -alpha");
  if (scratch_n_ != n || scratch_k_ != k || scratch_alpha_ != alpha) fill_scratch(n, k, alpha);
  double p = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) p += weights_[j] * scratch_new_[j];
  return p;
}

double ParticleMeasure::ratio_existing(std::int64_t n) const {
  const double nd = static_cast<double>(n);
  double r = 0.0;
  if (scratch_n_ == n) {
    for (std::size_t j = 0; j < weights_.size(); ++j) r += weights_[j] * scratch_inv_[j];
  } else {
    for (std::size_t j = 0; j < weights_.size(); ++j) r += weights_[j] / (nodes_[j] + nd);
  }
  return r;
}

void ParticleMeasure::update_after_step(std::int64_t n, std::int64_t k, double alpha,
                                        bool new_block) {
  if (scratch_n_ != n || scratch_k_ != k || scratch_alpha_ != alpha) fill_scratch(n, k, alpha);
  const std::vector<double>& f = new_block ? scratch_new_ : scratch_inv_;
  double total = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    weights_[j] *= f[j];
    total += weights_[j];
  }
  if (!(total > 0.0) || !std::isfinite(total))
    throw std::runtime_error("ParticleMeasure: weight update degenerate");
  const double inv = 1.0 / total;
  for (double& w : weights_) w *= inv;
  scratch_n_ = -1;  // factors refer to the old (n, k)
  log_dirty_ = true;
}

namespace detail {

void gauss_legendre(int n, double a, double b, std::vector<double>& x, std::vector<double>& w) {
  // Newton iteration on Legendre polynomials, nodes mapped to [a, b].
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  const double xm = 0.5 * (b + a);
  const double xl = 0.5 * (b - a);
  for (int i = 1; i <= m; ++i) {
    double z = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
    double z1, pp;
    do {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      z1 = z;
      z = z1 - p1 / pp;
    } while (std::abs(z - z1) > 1e-15);
    x[i - 1] = xm - xl * z;
    x[n - i] = xm + xl * z;
    w[i - 1] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    w[n - i] = w[i - 1];
  }
}

namespace {

double t_log_norm_const(double df) {
  return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
         0.5 * std::log(df * std::numbers::pi);
}

// CDF of |T_df| at x >= 0, integrated numerically (composite Gauss-Legendre).
double half_t_cdf(double df, double x) {
  if (x <= 0.0) return 0.0;
  static thread_local std::vector<double> gx, gw;
  if (gx.size() != 48) gauss_legendre(48, 0.0, 1.0, gx, gw);
  const double logc = t_log_norm_const(df);
  // Split [0, x] into panels of width <= 0.5 for resolution near the mode.
  const int panels = std::max(1, static_cast<int>(std::ceil(x / 0.5)));
  const double h = x / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = p * h;
    double s = 0.0;
    for (std::size_t j = 0; j < gx.size(); ++j) {
      const double t = lo + h * gx[j];
      s += gw[j] * std::exp(logc - 0.5 * (df + 1.0) * std::log1p(t * t / df));
    }
    total += s * h;
  }
  return 2.0 * total;
}

}  // namespace

double half_t_quantile(double df, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("half_t_quantile: p outside (0,1)");
  double hi = 1.0;
  while (half_t_cdf(df, hi) < p) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("half_t_quantile: bracket growth failed");
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (half_t_cdf(df, mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

ParticleMeasure discretize(const MixingSpec& spec) {
  spec.validate();
  std::vector<double> nodes, weights;
  switch (spec.kind) {
    case MixingKind::kDirac:
      nodes = {spec.theta};
      weights = {1.0};
      break;
    case MixingKind::kAtoms:
      for (const auto& [t, p] : spec.atoms) {
        nodes.push_back(t);
        weights.push_back(p);
      }
      break;
    case MixingKind::kUniform: {
      if (spec.a == spec.b) {
        nodes = {spec.a};
        weights = {1.0};
        break;
      }
      detail::gauss_legendre(spec.nodes, spec.a, spec.b, nodes, weights);
      const double density = 1.0 / (spec.b - spec.a);
      for (double& w : weights) w *= density;
      break;
    }
    case MixingKind::kHalfNormal: {
      const int m = spec.nodes;
      for (int j = 0; j < m; ++j) {
        const double p = (j + 0.5) / m * spec.q_trunc;
        nodes.push_back(spec.scale * stats::half_normal_quantile(p));
        weights.push_back(1.0 / m);
      }
      break;
    }
    case MixingKind::kHalfT: {
      const int m = spec.nodes;
      for (int j = 0; j < m; ++j) {
        const double p = (j + 0.5) / m * spec.q_trunc;
        nodes.push_back(spec.scale * detail::half_t_quantile(spec.df, p));
        weights.push_back(1.0 / m);
      }
      break;
    }
  }
  return ParticleMeasure(std::move(nodes), std::move(weights));
}

double expectation(const ParticleMeasure& pm, const std::function<double(double)>& f) {
  if (!pm.normalized()) throw std::logic_error("expectation: measure not normalized");
  double s = 0.0;
  const auto nodes = pm.nodes();
  const auto weights = pm.weights();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double v = f(nodes[j]);
    if (!std::isfinite(v)) throw std::domain_error("expectation: f not finite at a node");
    s += weights[j] * v;
  }
  return s;
}

double ratio_new_block(const ParticleMeasure& pm, std::int64_t n, std::int64_t k, double alpha) {
  return pm.ratio_new_block(n, k, alpha);
}

double ratio_existing(const ParticleMeasure& pm, std::int64_t n) { return pm.ratio_existing(n); }

void update_after_step(ParticleMeasure& pm, std::int64_t n, std::int64_t k, double alpha,
                       bool new_block) {
  pm.update_after_step(n, k, alpha, new_block);
}

ParticleMeasure tilted_measure(const MixingSpec& spec, std::int64_t n, std::int64_t k,
                               double alpha) {
  ParticleMeasure base = discretize(spec);
  const auto nodes = base.nodes();
  const auto mu = base.weights();
  std::vector<double> logw(nodes.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    logw[j] = std::log(mu[j]) + exact_log_v(nodes[j], n, k, alpha);
    top = std::max(top, logw[j]);
  }
  std::vector<double> w(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) w[j] = std::exp(logw[j] - top);
  return ParticleMeasure(std::vector<double>(nodes.begin(), nodes.end()), std::move(w));
}

double exact_log_v(double theta, std::int64_t n, std::int64_t k, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("exact_log_v: alpha outside (0,1)");
  if (!(theta > -alpha)) throw std::domain_error("exact_log_v: need theta > -alpha");
  if (!(k >= 1 && k <= n)) throw std::domain_error("exact_log_v: need 1 <= k <= n");
  // prod_{i=1}^{k-1}(theta+i*alpha) = alpha^(k-1) Gamma(theta/alpha+k)/Gamma(theta/alpha+1)
  const double ta = theta / alpha;
  const double num = static_cast<double>(k - 1) * std::log(alpha) +
                     std::lgamma(ta + static_cast<double>(k)) - std::lgamma(ta + 1.0);
  const double den = std::lgamma(theta + static_cast<double>(n)) - std::lgamma(theta + 1.0);
  return num - den;
}

}  // namespace gplab
