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

#include <cmath>
#include <cstdio>
#include <string>

#include "gplab/harness.hpp"
#include "gplab/partition.hpp"

using namespace gplab;
using namespace gplab::harness;

namespace {

std::string temp_path(const std::string& name) {
  return std::string("harness_test_") + name;
}

}  // namespace

TEST_CASE("mixing JSON round trip") {
  for (const MixingSpec& spec :
       {MixingSpec::dirac(3.0), MixingSpec::make_atoms({{0.0, 0.25}, {3.0, 0.75}}),
        MixingSpec::uniform(0.0, 3.0, 64), MixingSpec::half_normal(2.0, 32),
        MixingSpec::half_t(3.0, 1.5, 16)}) {
    const MixingSpec back = mixing_from_json(mixing_to_json(spec));
    CHECK(back.kind == spec.kind);
    CHECK(back.nodes == spec.nodes);
    CHECK(back.q_trunc == spec.q_trunc);
    const ParticleMeasure a = discretize(spec);
    const ParticleMeasure b = discretize(back);
    REQUIRE(a.size() == b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a.nodes()[j] == b.nodes()[j]);
      CHECK(a.weights()[j] == b.weights()[j]);
    }
  }
}

TEST_CASE("inline mixing grammar") {
  CHECK(parse_mixing("dirac(0)").kind == MixingKind::kDirac);
  CHECK(parse_mixing("dirac(3.5)").theta == 3.5);
  const MixingSpec atoms = parse_mixing("atoms(0:1,3:1,10:2)");
  REQUIRE(atoms.atoms.size() == 3);
  CHECK(atoms.atoms[2].second == doctest::Approx(0.5));
  const MixingSpec unif = parse_mixing("uniform(0,3)@64");
  CHECK(unif.kind == MixingKind::kUniform);
  CHECK(unif.nodes == 64);
  CHECK(parse_mixing("halfnormal(1)").kind == MixingKind::kHalfNormal);
  CHECK(parse_mixing("halft(3,2)").df == 3.0);
  CHECK(parse_mixing(R"({"kind":"Dirac","params":{"theta":1}})").theta == 1.0);
  CHECK_THROWS_AS(parse_mixing("gamma(1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_mixing("dirac"), std::invalid_argument);
  CHECK_THROWS_AS(parse_mixing("atoms(0;1)"), std::invalid_argument);
}

TEST_CASE("config JSON round trip and validation") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::kCoverage;
  cfg.n = 1234;
  cfg.replicates = 7;
  cfg.alpha = 0.42;
  cfg.mixing = MixingSpec::uniform(0.0, 3.0, 32);
  cfg.eps = 0.1;
  cfg.delta_rule = DeltaRule::kSqrtKnLogN;
  cfg.master_seed = 99;
  cfg.threads = 2;
  cfg.output_path = "x.csv";
  const ExperimentConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.experiment == cfg.experiment);
  CHECK(back.n == cfg.n);
  CHECK(back.replicates == cfg.replicates);
  CHECK(back.alpha == cfg.alpha);
  CHECK(back.eps == cfg.eps);
  CHECK(back.delta_rule == cfg.delta_rule);
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(back.threads == cfg.threads);
  CHECK(back.output_path == cfg.output_path);

  ExperimentConfig bad = cfg;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.replicates = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  ExperimentConfig desk = cfg;
  desk.apply_desk_preset();
  CHECK(desk.n == cfg.n / 4);
  CHECK(desk.replicates == 1);
}

TEST_CASE("suffstats CSV row round trip") {
  PartitionState st(0.5, MixingSpec::dirac(0.0), 3);
  const SuffStats s = st.run_to(500);
  const std::string row = suffstats_csv_row(17, s);
  std::int64_t id = 0;
  const SuffStats back = suffstats_from_csv_row(row, &id);
  CHECK(id == 17);
  CHECK(back.n == s.n);
  CHECK(back.k_n == s.k_n);
  CHECK(back.size_counts.size() == s.size_counts.size());
  for (const auto& [size, count] : s.size_counts) CHECK(back.size_counts.at(size) == count);
  CHECK_THROWS_AS(suffstats_from_csv_row("1,2"), std::invalid_argument);
}

TEST_CASE("experiment is bit-identical across thread counts") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::kQQ;
  cfg.n = 400;
  cfg.replicates = 24;
  cfg.alpha = 0.6;
  cfg.mixing = MixingSpec::make_atoms({{0.0, 0.5}, {3.0, 0.5}});
  cfg.master_seed = 31337;
  std::string csv1, csv3;
  std::string sum1, sum3;
  cfg.output_path = temp_path("det.csv");
  for (int threads : {1, 3}) {
    cfg.threads = threads;
    run_experiment(cfg);
    const std::string csv = read_text_file(cfg.output_path);
    std::string sum = read_text_file(temp_path("det") + ".summary.json");
    // strip the config echo (its thread count differs by construction)
    const auto pos = sum.find("\"threads\"");
    REQUIRE(pos != std::string::npos);
    sum.erase(pos, sum.find(',', pos) - pos);
    if (threads == 1) {
      csv1 = csv;
      sum1 = sum;
    } else {
      csv3 = csv;
      sum3 = sum;
    }
  }
  std::remove(cfg.output_path.c_str());
  std::remove((temp_path("det") + ".summary.json").c_str());
  CHECK(csv1 == csv3);
  CHECK(sum1 == sum3);
  CHECK(!csv1.empty());
}

TEST_CASE("QQ experiment smoke") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::kQQ;
  cfg.n = 600;
  cfg.replicates = 60;
  cfg.alpha = 0.7;
  cfg.mixing = MixingSpec::dirac(0.0);
  cfg.master_seed = 5;
  cfg.threads = 1;
  const ExperimentSummary s = run_experiment(cfg);
  CHECK(s.failures == 0);
  CHECK(s.replicates == 60);
  CHECK(s.ks_qmle > 0.0);
  CHECK(s.ks_qmle < 0.5);
  CHECK(s.ks_tv < 0.5);
  CHECK(s.ks_kl < 0.5);
  CHECK(s.qq.contains("stat_qmle"));
  CHECK(s.qq["stat_qmle"].size() == 199);
  // summary means should be in a loose window even at this small scale
  CHECK(std::abs(s.mean_stat_qmle) < 1.0);
  CHECK(std::abs(s.mean_stat_tv - std::sqrt(2.0 / M_PI)) < 0.5);
}

TEST_CASE("coverage experiment smoke") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::kCoverage;
  cfg.n = 800;
  cfg.replicates = 80;
  cfg.alpha = 0.7;
  cfg.mixing = MixingSpec::dirac(0.0);
  cfg.master_seed = 11;
  cfg.threads = 1;
  const ExperimentSummary s = run_experiment(cfg);
  CHECK(s.failures == 0);
  CHECK(s.coverage > 0.6);
  CHECK(s.coverage <= 1.0);
  CHECK(s.coverage_se > 0.0);
  CHECK(s.mean_subset_size >= 1.0);
}

TEST_CASE("rate sweep smoke produces negative slopes") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::kRateSweep;
  cfg.n = 1600;
  cfg.replicates = 40;
  cfg.alpha = 0.6;
  cfg.mixing = MixingSpec::dirac(0.0);
  cfg.master_seed = 21;
  cfg.threads = 1;
  const ExperimentSummary s = run_experiment(cfg);
  REQUIRE(s.sweep.size() == 4);
  CHECK(s.sweep.front().n == 200);
  CHECK(s.sweep.back().n == 1600);
  CHECK(s.slope_hat < -0.3);
  CHECK(s.slope_freq < -0.1);
  CHECK(s.slope_hat < s.slope_freq);  // the estimator with alpha_hat decays faster
}

TEST_CASE("diversity experiment: moment band and multimodality") {
  ExperimentConfig cfg;
  cfg.experiment = ExperimentKind::kDiversityHist;
  cfg.n = 5000;
  cfg.replicates = 300;
  cfg.alpha = 0.3;
  cfg.mixing = MixingSpec::make_atoms({{0.0, 1.0 / 3}, {3.0, 1.0 / 3}, {10.0, 1.0 / 3}});
  cfg.master_seed = 7;
  cfg.threads = 1;
  const ExperimentSummary s = run_experiment(cfg);
  CHECK(s.failures == 0);
  CHECK(s.band_lo == doctest::Approx(1.114242).epsilon(1e-4));
  CHECK(s.band_hi == doctest::Approx(16.88370).epsilon(1e-4));
  CHECK(s.mean_kn_over_nalpha > s.band_lo - 3.0 * s.se_kn_over_nalpha);
  CHECK(s.mean_kn_over_nalpha < s.band_hi + 3.0 * s.se_kn_over_nalpha);
  CHECK(s.mode_count >= 2);
}
