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

#ifndef GPLAB_HARNESS_HPP_
#define GPLAB_HARNESS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "gplab/mixing.hpp"
#include "gplab/partition.hpp"

namespace gplab::harness {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kDiversityHist, kQQ, kCoverage, kRateSweep };
enum class DeltaRule { kKnPow051, kSqrtKnLogN };

std::string experiment_name(ExperimentKind k);
ExperimentKind experiment_from_name(const std::string& name);
std::string delta_rule_name(DeltaRule r);
DeltaRule delta_rule_from_name(const std::string& name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::kQQ;
  std::int64_t n = 20000;
  std::int64_t replicates = 1000;
  double alpha = 0.8;
  MixingSpec mixing = MixingSpec::dirac(0.0);
  double eps = 0.05;
  DeltaRule delta_rule = DeltaRule::kKnPow051;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::string output_path;  // empty = do not write files

  void validate() const;
  // Quarter-scale preset for desk runs.
  void apply_desk_preset();
};

nlohmann::json mixing_to_json(const MixingSpec& spec);
MixingSpec mixing_from_json(const nlohmann::json& j);
// Inline grammar: dirac(t) | atoms(t:w,t:w,...) | uniform(a,b) |
// halfnormal(scale) | halft(df,scale); optional @M node-count suffix.
MixingSpec parse_mixing(const std::string& text);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct ReplicateRecord {
  std::int64_t replicate_id = 0;
  std::int64_t n = 0;
  std::int64_t k_n = 0;
  double alpha_hat = 0.0;
  int boundary = 0;  // 0 interior, 1 all-one-block, 2 all-singletons
  double kn_over_nalpha = 0.0;
  double stat_qmle = 0.0;  // sqrt(k_n i(alpha)) (alpha_hat - alpha)
  double stat_tv = 0.0;    // n sqrt(i(alpha)/k_n) tv
  double stat_kl = 0.0;    // (2n/alpha) kl
  double tv_hat = 0.0;
  double tv_freq = 0.0;
  int covered = -1;             // coverage experiment only; -1 = n/a
  std::int64_t subset_size = -1;
  bool failed = false;
  std::string error;
};

struct SweepPoint {
  std::int64_t n = 0;
  double mean_tv_hat = 0.0;
  double mean_tv_freq = 0.0;
};

struct ExperimentSummary {
  ExperimentKind experiment = ExperimentKind::kQQ;
  std::int64_t replicates = 0;
  std::int64_t failures = 0;
  std::int64_t boundary_count = 0;

  double mean_kn_over_nalpha = 0.0;
  double se_kn_over_nalpha = 0.0;
  double band_lo = 0.0;  // moment band from the discretized support
  double band_hi = 0.0;
  int mode_count = 0;
  nlohmann::json kn_histogram;  // plot-ready bins for the diversity statistic

  double mean_stat_qmle = 0.0, sd_stat_qmle = 0.0, ks_qmle = 0.0;
  double mean_stat_tv = 0.0, sd_stat_tv = 0.0, ks_tv = 0.0;
  double mean_stat_kl = 0.0, sd_stat_kl = 0.0, ks_kl = 0.0;

  double coverage = 0.0;
  double coverage_se = 0.0;
  double mean_subset_size = 0.0;

  std::vector<SweepPoint> sweep;
  double slope_hat = 0.0;
  double slope_freq = 0.0;

  nlohmann::json qq;  // per-statistic arrays of [empirical, theoretical] pairs
};

// Runs the configured experiment replicate-parallel.  Given the same config
// and master seed the CSV and summary are bit-identical for any thread
// count: replicate r of batch b always uses seed derive_seed(master, r, b)
// and results are collected in id order before any aggregation.
//
// When cfg.output_path is nonempty, writes one CSV row per replicate there
// and the JSON summary alongside (suffix .summary.json).
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

nlohmann::json summary_to_json(const ExperimentSummary& s, const ExperimentConfig& cfg);

// SuffStats CSV row: replicate_id,n,k_n then sparse size:count pairs.
std::string suffstats_csv_row(std::int64_t replicate_id, const SuffStats& stats);
SuffStats suffstats_from_csv_row(const std::string& row, std::int64_t* replicate_id = nullptr);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace gplab::harness

#endif  // GPLAB_HARNESS_HPP_
