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

#ifndef GPLAB_STATS_HPP_
#define GPLAB_STATS_HPP_

#include <functional>
#include <span>
#include <vector>

namespace gplab::stats {

// Standard normal CDF, accurate to full double precision.
double normal_cdf(double z);

// Inverse standard normal CDF (AS241 initial value, one Newton refinement
// on the CDF).  |normal_cdf(normal_quantile(p)) - p| < 1e-12 on (0,1).
double normal_quantile(double p);

// Quantile of chi-squared with one degree of freedom: normal_quantile((1+p)/2)^2.
double chi2_1_quantile(double p);

// Quantile of |N(0,1)|: normal_quantile((1+p)/2).
double half_normal_quantile(double p);

// Digamma function, full double precision for x > 0.
double digamma(double x);

// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of a
// sorted sample and a continuous reference CDF.  Throws if the sample is
// empty or unsorted.
double ks_distance(std::span<const double> sorted_sample,
                   const std::function<double(double)>& reference_cdf);

double mean(std::span<const double> xs);
double sample_sd(std::span<const double> xs);

// Linear-interpolation empirical quantile of a sorted sample (type 7).
double empirical_quantile(std::span<const double> sorted_sample, double p);

}  // namespace gplab::stats

#endif  // GPLAB_STATS_HPP_
