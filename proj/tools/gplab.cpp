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

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gplab/harness.hpp"
#include "gplab/mixing.hpp"
#include "gplab/partition.hpp"
#include "gplab/predict.hpp"
#include "gplab/qmle.hpp"
#include "gplab/sibuya.hpp"
#include "gplab/stats.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct SimulateArgs {
  std::int64_t n = 1000;
  double alpha = 0.5;
  std::string mixing = "dirac(0)";
  std::int64_t reps = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string dump_state;
};

struct EstimateArgs {
  std::string in;
  double eps = 0.05;
  std::string out;
};

struct PredictArgs {
  std::optional<std::vector<std::string>> simulate;  // n alpha mixing
  std::string state_file;
  std::int64_t replicate = 0;
  std::uint64_t seed = 1;
  double eps = 0.05;
  std::string delta_rule = "kn_pow_051";
  std::string subset;
  int top = 10;
  std::string out;
};

struct ExperimentArgs {
  std::string config_file;
  std::optional<std::string> experiment, mixing, out, delta_rule;
  std::optional<std::int64_t> n, reps;
  std::optional<double> alpha, eps;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool desk = false;
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
  } else {
    gplab::harness::write_text_file(out_path, text);
  }
}

json qmle_report(const gplab::SuffStats& stats, double eps) {
  const gplab::QmleResult q = gplab::qmle(stats);
  json j{{"n", stats.n},
         {"k_n", stats.k_n},
         {"alpha_hat", q.alpha_hat},
         {"iterations", q.iterations},
         {"residual", q.residual},
         {"alpha_naive", stats.n > 1 ? std::log(double(stats.k_n)) / std::log(double(stats.n))
                                     : 0.0}};
  switch (q.boundary) {
    case gplab::QmleBoundary::kInterior: {
      j["boundary"] = "interior";
      const auto ci = gplab::ci_alpha(stats, q, eps);
      j["ci"] = {{"lo", ci.lo}, {"hi", ci.hi}, {"half_width", ci.half_width}, {"eps", eps}};
      j["fisher_info"] = gplab::sibuya::fisher_info(q.alpha_hat, 1e-9).value;
      break;
    }
    case gplab::QmleBoundary::kAllOneBlock:
      j["boundary"] = "all_one_block";
      break;
    case gplab::QmleBoundary::kAllSingletons:
      j["boundary"] = "all_singletons";
      break;
  }
  return j;
}

int run_simulate(const SimulateArgs& args) {
  const gplab::MixingSpec spec = gplab::harness::parse_mixing(args.mixing);
  std::string csv;
  json trace{{"alpha", args.alpha},
             {"mixing", gplab::harness::mixing_to_json(spec)},
             {"master_seed", args.seed},
             {"states", json::array()}};
  for (std::int64_t r = 0; r < args.reps; ++r) {
    gplab::PartitionState state(args.alpha, spec, gplab::derive_seed(args.seed, r));
    const gplab::SuffStats stats = state.run_to(args.n);
    csv += gplab::harness::suffstats_csv_row(r, stats) + "\n";
    if (!args.dump_state.empty()) {
      trace["states"].push_back({{"replicate_id", r},
                                 {"n", state.n()},
                                 {"k_n", state.k()},
                                 {"block_sizes", state.block_sizes()}});
    }
  }
  emit(csv, args.out);
  if (!args.dump_state.empty())
    gplab::harness::write_text_file(args.dump_state, trace.dump(2) + "\n");
  return kExitOk;
}

gplab::SuffStats stats_from_json(const json& j) {
  gplab::SuffStats stats;
  stats.n = j.at("n").get<std::int64_t>();
  stats.k_n = j.at("k_n").get<std::int64_t>();
  if (j.contains("size_counts")) {
    for (const auto& [size, count] : j.at("size_counts").items())
      stats.size_counts[std::stoll(size)] = count.get<std::int64_t>();
  } else if (j.contains("block_sizes")) {
    for (const auto& s : j.at("block_sizes")) ++stats.size_counts[s.get<std::int64_t>()];
  } else {
    throw std::invalid_argument("estimate: JSON needs size_counts or block_sizes");
  }
  stats.validate();
  return stats;
}

int run_estimate(const EstimateArgs& args) {
  const std::string text = gplab::harness::read_text_file(args.in);
  json results = json::array();
  if (!text.empty() && (text.front() == '{' || text.front() == '[')) {
    const json parsed = json::parse(text);
    if (parsed.is_array()) {
      for (const auto& item : parsed) results.push_back(qmle_report(stats_from_json(item), args.eps));
    } else if (parsed.contains("states")) {
      for (const auto& item : parsed.at("states"))
        results.push_back(qmle_report(stats_from_json(item), args.eps));
    } else {
      results.push_back(qmle_report(stats_from_json(parsed), args.eps));
    }
  } else {
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) {
      if (line.empty() || !(std::isdigit(static_cast<unsigned char>(line[0])))) continue;
      std::int64_t id = 0;
      const gplab::SuffStats stats = gplab::harness::suffstats_from_csv_row(line, &id);
      json r = qmle_report(stats, args.eps);
      r["replicate_id"] = id;
      results.push_back(std::move(r));
    }
  }
  if (results.empty()) throw std::invalid_argument("estimate: no statistics found in input");
  emit((results.size() == 1 ? results.front() : results).dump(2), args.out);
  return kExitOk;
}

std::vector<std::int64_t> parse_subset(const std::string& text) {
  std::vector<std::int64_t> subset;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) subset.push_back(std::stoll(item));
  return subset;
}

int run_predict(const PredictArgs& args) {
  double alpha = 0.0;
  gplab::MixingSpec spec;
  std::vector<std::int64_t> block_sizes;
  std::vector<double> truth;

  if (args.simulate) {
    if (args.simulate->size() != 3)
      throw std::invalid_argument("predict: --simulate needs n alpha mixing");
    const std::int64_t n = std::stoll((*args.simulate)[0]);
    alpha = std::stod((*args.simulate)[1]);
    spec = gplab::harness::parse_mixing((*args.simulate)[2]);
    gplab::PartitionState state(alpha, spec, gplab::derive_seed(args.seed, 0));
    state.run_to(n);
    block_sizes = state.block_sizes();
    truth = state.true_simplex();
  } else if (!args.state_file.empty()) {
    const json trace = json::parse(gplab::harness::read_text_file(args.state_file));
    alpha = trace.at("alpha").get<double>();
    spec = gplab::harness::mixing_from_json(trace.at("mixing"));
    const json* st = nullptr;
    for (const auto& item : trace.at("states"))
      if (item.at("replicate_id").get<std::int64_t>() == args.replicate) st = &item;
    if (!st) throw std::invalid_argument("predict: replicate not found in state file");
    for (const auto& s : st->at("block_sizes")) block_sizes.push_back(s.get<std::int64_t>());
    const std::int64_t n = std::accumulate(block_sizes.begin(), block_sizes.end(), std::int64_t{0});
    const std::int64_t k = static_cast<std::int64_t>(block_sizes.size());
    const gplab::ParticleMeasure pm = gplab::tilted_measure(spec, n, k, alpha);
    truth.resize(static_cast<std::size_t>(k) + 1);
    truth[0] = gplab::ratio_new_block(pm, n, k, alpha);
    const double re = gplab::ratio_existing(pm, n);
    for (std::int64_t i = 0; i < k; ++i)
      truth[static_cast<std::size_t>(i) + 1] =
          re * (static_cast<double>(block_sizes[static_cast<std::size_t>(i)]) - alpha);
  } else {
    throw std::invalid_argument("predict: give either --simulate or --state");
  }

  const std::int64_t k = static_cast<std::int64_t>(block_sizes.size());
  const std::int64_t n = std::accumulate(block_sizes.begin(), block_sizes.end(), std::int64_t{0});
  gplab::SuffStats stats;
  stats.n = n;
  stats.k_n = k;
  for (std::int64_t s : block_sizes) ++stats.size_counts[s];
  const gplab::QmleResult q = gplab::qmle(stats);

  json out{{"n", n}, {"k_n", k}, {"alpha_true", alpha}, {"alpha_hat", q.alpha_hat}};
  if (q.boundary != gplab::QmleBoundary::kInterior) {
    out["boundary"] =
        q.boundary == gplab::QmleBoundary::kAllOneBlock ? "all_one_block" : "all_singletons";
    emit(out.dump(2), args.out);
    return kExitOk;
  }
  out["boundary"] = "interior";

  // Estimate simplex (QmleZero) against the truth.
  std::vector<double> estimate(static_cast<std::size_t>(k) + 1);
  estimate[0] = static_cast<double>(k) * q.alpha_hat / static_cast<double>(n);
  for (std::int64_t i = 0; i < k; ++i)
    estimate[static_cast<std::size_t>(i) + 1] =
        (static_cast<double>(block_sizes[static_cast<std::size_t>(i)]) - q.alpha_hat) /
        static_cast<double>(n);
  gplab::SimplexPair pair;
  pair.truth = truth;
  pair.estimate = estimate;
  out["tv"] = gplab::tv(pair);
  out["kl"] = gplab::kl(pair);
  out["uniform_ci_half_width"] = gplab::uniform_ci_half_width(stats, q, args.eps);

  // Indices of the top-K largest blocks, also always index 0.
  std::vector<std::int64_t> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 1);
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return block_sizes[static_cast<std::size_t>(a - 1)] > block_sizes[static_cast<std::size_t>(b - 1)];
  });
  if (static_cast<int>(order.size()) > args.top) order.resize(static_cast<std::size_t>(args.top));
  json head = json::array();
  head.push_back({{"index", 0}, {"truth", truth[0]}, {"estimate", estimate[0]}});
  for (std::int64_t i : order)
    head.push_back({{"index", i},
                    {"block_size", block_sizes[static_cast<std::size_t>(i - 1)]},
                    {"truth", truth[static_cast<std::size_t>(i)]},
                    {"estimate", estimate[static_cast<std::size_t>(i)]}});
  out["simplex_top"] = head;

  const double delta = args.delta_rule == "sqrt_kn_log_n" ? gplab::delta_sqrt_kn_log(k, n)
                                                          : gplab::delta_kn_pow(k);
  out["delta_n"] = delta;
  std::vector<std::int64_t> subset = parse_subset(args.subset);
  if (subset.empty()) {
    subset.resize(static_cast<std::size_t>(k));
    std::iota(subset.begin(), subset.end(), 1);
  }
  // Subsets inside the admissible family get the narrow local interval;
  // everything else falls back to the subset-uniform band, which is valid
  // for arbitrary subsets.
  const bool member = gplab::subset_admissible(block_sizes, subset, delta);
  double center = 0.0, truth_mass = 0.0;
  for (std::int64_t i : subset) {
    center += estimate[static_cast<std::size_t>(i)];
    truth_mass += truth[static_cast<std::size_t>(i)];
  }
  double half_width;
  if (member) {
    const gplab::SubsetCI ci = gplab::local_ci(block_sizes, q, args.eps, subset, delta);
    half_width = ci.half_width;
    center = ci.center;
  } else {
    half_width = gplab::uniform_ci_half_width(stats, q, args.eps);
  }
  out["subset_ci"] = {{"subset_size", subset.size()},
                      {"kind", member ? "local" : "uniform"},
                      {"in_admissible_family", member},
                      {"center", center},
                      {"half_width", half_width},
                      {"truth_mass", truth_mass},
                      {"covered", std::abs(center - truth_mass) <= half_width}};
  emit(out.dump(2), args.out);
  return kExitOk;
}

int run_experiment_cmd(const ExperimentArgs& args) {
  gplab::harness::ExperimentConfig cfg;
  if (!args.config_file.empty()) {
    cfg = gplab::harness::config_from_json(
        json::parse(gplab::harness::read_text_file(args.config_file)));
  }
  if (args.experiment) cfg.experiment = gplab::harness::experiment_from_name(*args.experiment);
  if (args.n) cfg.n = *args.n;
  if (args.reps) cfg.replicates = *args.reps;
  if (args.alpha) cfg.alpha = *args.alpha;
  if (args.mixing) cfg.mixing = gplab::harness::parse_mixing(*args.mixing);
  if (args.eps) cfg.eps = *args.eps;
  if (args.delta_rule) cfg.delta_rule = gplab::harness::delta_rule_from_name(*args.delta_rule);
  if (args.seed) cfg.master_seed = *args.seed;
  if (args.threads) cfg.threads = *args.threads;
  if (args.out) cfg.output_path = *args.out;
  if (args.desk) cfg.apply_desk_preset();
  cfg.validate();
  const auto summary = gplab::harness::run_experiment(cfg);
  std::cout << gplab::harness::summary_to_json(summary, cfg).dump(2) << '\n';
  return summary.failures == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and inference for exchangeable Gibbs partitions"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate partitions, emit sufficient statistics");
  simulate->add_option("--n", sim.n, "Partition size")->required();
  simulate->add_option("--alpha", sim.alpha, "Discount parameter in (0,1)")->required();
  simulate->add_option("--mixing", sim.mixing, "Mixing spec (JSON or inline, e.g. dirac(0))");
  simulate->add_option("--reps", sim.reps, "Number of replicates");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--out", sim.out, "Output CSV path (default stdout)");
  simulate->add_option("--dump-state", sim.dump_state, "Also write a JSON trace with block sizes");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the discount parameter from statistics");
  estimate->add_option("--in", est.in, "SuffStats CSV or JSON file")->required();
  estimate->add_option("--eps", est.eps, "CI level: coverage 1-eps");
  estimate->add_option("--out", est.out, "Output path (default stdout)");

  PredictArgs pred;
  auto* predict = app.add_subcommand("predict", "Predictive simplex, divergences, and intervals");
  predict->add_option("--simulate", pred.simulate, "n alpha mixing: simulate a fresh partition")
      ->expected(3);
  predict->add_option("--state", pred.state_file, "JSON trace from simulate --dump-state");
  predict->add_option("--replicate", pred.replicate, "Replicate id within the trace");
  predict->add_option("--seed", pred.seed, "Seed for --simulate");
  predict->add_option("--eps", pred.eps, "CI level: coverage 1-eps");
  predict->add_option("--delta-rule", pred.delta_rule, "kn_pow_051 or sqrt_kn_log_n");
  predict->add_option("--subset", pred.subset, "Comma-separated 1-based block indices");
  predict->add_option("--top", pred.top, "Blocks to print in the simplex head");
  predict->add_option("--out", pred.out, "Output path (default stdout)");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "Replicated Monte Carlo experiments");
  experiment->add_option("--config", exp.config_file, "JSON config file");
  experiment->add_option("--experiment", exp.experiment,
                         "DiversityHist | QQ | Coverage | RateSweep");
  experiment->add_option("--n", exp.n, "Partition size");
  experiment->add_option("--reps", exp.reps, "Replicates");
  experiment->add_option("--alpha", exp.alpha, "Discount parameter");
  experiment->add_option("--mixing", exp.mixing, "Mixing spec (JSON or inline)");
  experiment->add_option("--eps", exp.eps, "CI level");
  experiment->add_option("--delta-rule", exp.delta_rule, "kn_pow_051 or sqrt_kn_log_n");
  experiment->add_option("--seed", exp.seed, "Master seed");
  experiment->add_option("--threads", exp.threads, "Worker threads (0 = hardware)");
  experiment->add_option("--out", exp.out, "CSV output path");
  std::string preset;
  experiment->add_option("--preset", preset, "desk: quarter-scale n and replicates");

  try {
    app.parse(argc, argv);
    if (!preset.empty()) {
      if (preset != "desk") throw std::invalid_argument("unknown preset: " + preset);
      exp.desk = true;
    }
    if (simulate->parsed()) return run_simulate(sim);
    if (estimate->parsed()) return run_estimate(est);
    if (predict->parsed()) return run_predict(pred);
    if (experiment->parsed()) return run_experiment_cmd(exp);
    return kExitConfig;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  } catch (const gplab::harness::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::logic_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
