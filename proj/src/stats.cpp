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

#include "gplab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gplab::stats {

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

namespace {

// ALGORITHM AS241, Applied Statistics (1988) vol. 37 no. 3 (Wichura).
// Relative accuracy about 1 part in 1e15 over the full open interval.
double as241(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double z;
  if (r <= 5.0) {
    r -= 1.6;
    z = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    z = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -z : z;
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must be in (0,1)");
  double z = as241(p);
  // One Newton step on the CDF pins the residual to rounding level.
  const double pdf = 0.3989422804014326779 * std::exp(-0.5 * z * z);
  if (pdf > 1e-300) z -= (normal_cdf(z) - p) / pdf;
  return z;
}

double chi2_1_quantile(double p) {
  const double z = normal_quantile(0.5 * (1.0 + p));
  return z * z;
}

double half_normal_quantile(double p) { return normal_quantile(0.5 * (1.0 + p)); }

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: x must be positive");
  double acc = 0.0;
  while (x < 8.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  // Asymptotic series with Bernoulli-number coefficients.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 -
                  inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double ks_distance(std::span<const double> sorted_sample,
                   const std::function<double(double)>& reference_cdf) {
  if (sorted_sample.empty()) throw std::invalid_argument("ks_distance: empty sample");
  const double m = static_cast<double>(sorted_sample.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted_sample.size(); ++i) {
    if (i + 1 < sorted_sample.size() && sorted_sample[i] > sorted_sample[i + 1])
      throw std::invalid_argument("ks_distance: sample not sorted");
    const double f = reference_cdf(sorted_sample[i]);
    const double lo = f - static_cast<double>(i) / m;
    const double hi = static_cast<double>(i + 1) / m - f;
    sup = std::max({sup, lo, hi});
  }
  return sup;
}

double mean(std::span<const double> xs) {
  if (xs.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("sample_sd: need at least 2 values");
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double empirical_quantile(std::span<const double> sorted_sample, double p) {
  if (sorted_sample.empty()) throw std::invalid_argument("empirical_quantile: empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("empirical_quantile: p outside [0,1]");
  const double h = p * static_cast<double>(sorted_sample.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted_sample.size()) return sorted_sample.back();
  const double w = h - static_cast<double>(lo);
  return (1.0 - w) * sorted_sample[lo] + w * sorted_sample[lo + 1];
}

}  // namespace gplab::stats
