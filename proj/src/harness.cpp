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

#include "gplab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "gplab/predict.hpp"
#include "gplab/qmle.hpp"
#include "gplab/rng.hpp"
#include "gplab/sibuya.hpp"
#include "gplab/stats.hpp"

namespace gplab::harness {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& body) {
  int t = threads;
  if (t <= 0) t = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  t = static_cast<int>(std::min<std::int64_t>(t, std::max<std::int64_t>(count, 1)));
  if (t == 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::atomic<bool> has_error{false};
  pool.reserve(static_cast<std::size_t>(t));
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::int64_t i; (i = next.fetch_add(1)) < count;) body(i);
      } catch (...) {
        if (!has_error.exchange(true)) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (has_error) std::rethrow_exception(first_error);
}

double moment_band_endpoint(double theta, double alpha) {
  return std::exp(std::lgamma(theta + 1.0) - std::lgamma(theta + alpha)) / alpha;
}

nlohmann::json histogram_json(const std::vector<double>& values) {
  nlohmann::json j;
  if (values.empty()) return j;
  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn_it;
  const double hi = *mx_it > lo ? *mx_it : lo + 1.0;
  constexpr int kBins = 64;
  std::vector<std::int64_t> counts(kBins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / (hi - lo) * kBins);
    ++counts[static_cast<std::size_t>(std::clamp(b, 0, kBins - 1))];
  }
  j["lo"] = lo;
  j["hi"] = hi;
  j["counts"] = counts;
  return j;
}

// Counts modes of a kernel-smoothed histogram; peaks below 5% of the top
// peak are treated as noise.
int smoothed_mode_count(std::vector<double> values) {
  if (values.size() < 8) return values.empty() ? 0 : 1;
  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn_it, hi = *mx_it;
  if (!(hi > lo)) return 1;
  constexpr int kBins = 64;
  std::vector<double> hist(kBins, 0.0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / (hi - lo) * kBins);
    hist[std::clamp(b, 0, kBins - 1)] += 1.0;
  }
  const double sigma = 1.5;
  const int radius = 8;
  std::vector<double> smooth(kBins, 0.0);
  for (int i = 0; i < kBins; ++i) {
    double acc = 0.0, norm = 0.0;
    for (int d = -radius; d <= radius; ++d) {
      const int j = i + d;
      if (j < 0 || j >= kBins) continue;
      const double w = std::exp(-0.5 * d * d / (sigma * sigma));
      acc += w * hist[static_cast<std::size_t>(j)];
      norm += w;
    }
    smooth[static_cast<std::size_t>(i)] = acc / norm;
  }
  const double peak = *std::max_element(smooth.begin(), smooth.end());
  int modes = 0;
  for (int i = 1; i + 1 < kBins; ++i) {
    if (smooth[i] > smooth[i - 1] && smooth[i] >= smooth[i + 1] && smooth[i] >= 0.05 * peak)
      ++modes;
  }
  return std::max(modes, 1);
}

struct StatBlock {
  double mean = 0.0, sd = 0.0, ks = 0.0;
  std::vector<double> sorted;
};

StatBlock summarize_stat(std::vector<double> values, const std::function<double(double)>& cdf) {
  StatBlock b;
  if (values.empty()) return b;
  b.mean = stats::mean(values);
  b.sd = values.size() > 1 ? stats::sample_sd(values) : 0.0;
  std::sort(values.begin(), values.end());
  b.ks = stats::ks_distance(values, cdf);
  b.sorted = std::move(values);
  return b;
}

nlohmann::json qq_pairs(const std::vector<double>& sorted,
                        const std::function<double(double)>& quantile) {
  nlohmann::json arr = nlohmann::json::array();
  if (sorted.empty()) return arr;
  for (int i = 1; i <= 199; ++i) {
    const double p = static_cast<double>(i) / 200.0;
    arr.push_back({stats::empirical_quantile(sorted, p), quantile(p)});
  }
  return arr;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double xm = stats::mean(x), ym = stats::mean(y);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - xm) * (y[i] - ym);
    den += (x[i] - xm) * (x[i] - xm);
  }
  return num / den;
}

}  // namespace

std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kDiversityHist: return "DiversityHist";
    case ExperimentKind::kQQ: return "QQ";
    case ExperimentKind::kCoverage: return "Coverage";
    case ExperimentKind::kRateSweep: return "RateSweep";
  }
  return "?";
}

ExperimentKind experiment_from_name(const std::string& name) {
  if (name == "DiversityHist") return ExperimentKind::kDiversityHist;
  if (name == "QQ") return ExperimentKind::kQQ;
  if (name == "Coverage") return ExperimentKind::kCoverage;
  if (name == "RateSweep") return ExperimentKind::kRateSweep;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::string delta_rule_name(DeltaRule r) {
  return r == DeltaRule::kKnPow051 ? "kn_pow_051" : "sqrt_kn_log_n";
}

DeltaRule delta_rule_from_name(const std::string& name) {
  if (name == "kn_pow_051") return DeltaRule::kKnPow051;
  if (name == "sqrt_kn_log_n") return DeltaRule::kSqrtKnLogN;
  throw std::invalid_argument("unknown delta_rule: " + name);
}

void ExperimentConfig::validate() const {
  if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
  if (n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha outside (0,1)");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("config: eps outside (0,1)");
  mixing.validate();
}

void ExperimentConfig::apply_desk_preset() {
  n = std::max<std::int64_t>(1, n / 4);
  replicates = std::max<std::int64_t>(1, replicates / 4);
}

nlohmann::json mixing_to_json(const MixingSpec& spec) {
  nlohmann::json params;
  switch (spec.kind) {
    case MixingKind::kDirac:
      params["theta"] = spec.theta;
      break;
    case MixingKind::kAtoms: {
      nlohmann::json atoms = nlohmann::json::array();
      for (const auto& [t, p] : spec.atoms) atoms.push_back({t, p});
      params["atoms"] = atoms;
      break;
    }
    case MixingKind::kUniform:
      params["a"] = spec.a;
      params["b"] = spec.b;
      break;
    case MixingKind::kHalfNormal:
      params["scale"] = spec.scale;
      break;
    case MixingKind::kHalfT:
      params["df"] = spec.df;
      params["scale"] = spec.scale;
      break;
  }
  return {{"kind", spec.kind_name()},
          {"params", params},
          {"nodes", spec.nodes},
          {"q_trunc", spec.q_trunc}};
}

MixingSpec mixing_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  MixingSpec spec;
  if (kind == "Dirac") {
    spec = MixingSpec::dirac(params.at("theta").get<double>());
  } else if (kind == "Atoms") {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& a : params.at("atoms"))
      atoms.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
    spec = MixingSpec::make_atoms(std::move(atoms));
  } else if (kind == "Uniform") {
    spec = MixingSpec::uniform(params.at("a").get<double>(), params.at("b").get<double>());
  } else if (kind == "HalfNormal") {
    spec = MixingSpec::half_normal(params.value("scale", 1.0));
  } else if (kind == "HalfT") {
    spec = MixingSpec::half_t(params.at("df").get<double>(), params.value("scale", 1.0));
  } else {
    throw std::invalid_argument("mixing: unknown kind " + kind);
  }
  if (j.contains("nodes")) spec.nodes = j.at("nodes").get<int>();
  if (j.contains("q_trunc")) spec.q_trunc = j.at("q_trunc").get<double>();
  spec.validate();
  return spec;
}

MixingSpec parse_mixing(const std::string& text) {
  if (!text.empty() && text.front() == '{') return mixing_from_json(nlohmann::json::parse(text));
  std::string body = text;
  int nodes = -1;
  if (const auto at = body.rfind('@'); at != std::string::npos) {
    nodes = std::stoi(body.substr(at + 1));
    body = body.substr(0, at);
  }
  const auto open = body.find('(');
  if (open == std::string::npos || body.back() != ')')
    throw std::invalid_argument("mixing: expected kind(args), got " + text);
  std::string kind = body.substr(0, open);
  std::string args = body.substr(open + 1, body.size() - open - 2);
  std::vector<std::string> parts;
  std::stringstream ss(args);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);

  MixingSpec spec;
  if (kind == "dirac") {
    if (parts.size() != 1) throw std::invalid_argument("mixing: dirac takes one argument");
    spec = MixingSpec::dirac(std::stod(parts[0]));
  } else if (kind == "atoms") {
    std::vector<std::pair<double, double>> atoms;
    double total = 0.0;
    for (const auto& p : parts) {
      const auto colon = p.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("mixing: atoms need theta:weight");
      const double w = std::stod(p.substr(colon + 1));
      atoms.emplace_back(std::stod(p.substr(0, colon)), w);
      total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("mixing: atom weights must be positive");
    for (auto& [t, w] : atoms) w /= total;
    spec = MixingSpec::make_atoms(std::move(atoms));
  } else if (kind == "uniform") {
    if (parts.size() != 2) throw std::invalid_argument("mixing: uniform takes two arguments");
    spec = MixingSpec::uniform(std::stod(parts[0]), std::stod(parts[1]));
  } else if (kind == "halfnormal") {
    spec = MixingSpec::half_normal(parts.empty() ? 1.0 : std::stod(parts[0]));
  } else if (kind == "halft") {
    if (parts.empty()) throw std::invalid_argument("mixing: halft needs df");
    spec = MixingSpec::half_t(std::stod(parts[0]), parts.size() > 1 ? std::stod(parts[1]) : 1.0);
  } else {
    throw std::invalid_argument("mixing: unknown kind " + kind);
  }
  if (nodes > 0) spec.nodes = nodes;
  spec.validate();
  return spec;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return {{"experiment", experiment_name(cfg.experiment)},
          {"n", cfg.n},
          {"replicates", cfg.replicates},
          {"alpha", cfg.alpha},
          {"mixing", mixing_to_json(cfg.mixing)},
          {"eps", cfg.eps},
          {"delta_rule", delta_rule_name(cfg.delta_rule)},
          {"master_seed", cfg.master_seed},
          {"threads", cfg.threads},
          {"output_path", cfg.output_path}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.experiment = experiment_from_name(j.at("experiment").get<std::string>());
  cfg.n = j.at("n").get<std::int64_t>();
  cfg.replicates = j.at("replicates").get<std::int64_t>();
  cfg.alpha = j.at("alpha").get<double>();
  cfg.mixing = mixing_from_json(j.at("mixing"));
  cfg.eps = j.value("eps", 0.05);
  if (j.contains("delta_rule")) cfg.delta_rule = delta_rule_from_name(j.at("delta_rule"));
  cfg.master_seed = j.value("master_seed", std::uint64_t{1});
  cfg.threads = j.value("threads", 0);
  cfg.output_path = j.value("output_path", std::string{});
  cfg.validate();
  return cfg;
}

std::string suffstats_csv_row(std::int64_t replicate_id, const SuffStats& stats) {
  std::string row = std::to_string(replicate_id) + "," + std::to_string(stats.n) + "," +
                    std::to_string(stats.k_n);
  std::vector<std::pair<std::int64_t, std::int64_t>> entries(stats.size_counts.begin(),
                                                             stats.size_counts.end());
  std::sort(entries.begin(), entries.end());
  for (const auto& [size, count] : entries)
    row += "," + std::to_string(size) + ":" + std::to_string(count);
  return row;
}

SuffStats suffstats_from_csv_row(const std::string& row, std::int64_t* replicate_id) {
  std::stringstream ss(row);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (fields.size() < 3) throw std::invalid_argument("suffstats row: need id,n,k_n");
  if (replicate_id) *replicate_id = std::stoll(fields[0]);
  SuffStats stats;
  stats.n = std::stoll(fields[1]);
  stats.k_n = std::stoll(fields[2]);
  for (std::size_t i = 3; i < fields.size(); ++i) {
    const auto colon = fields[i].find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("suffstats row: malformed size:count pair");
    stats.size_counts[std::stoll(fields[i].substr(0, colon))] =
        std::stoll(fields[i].substr(colon + 1));
  }
  stats.validate();
  return stats;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

void run_one(const ExperimentConfig& cfg, const ParticleMeasure& base, std::int64_t batch,
             std::int64_t n_target, double info_true, ReplicateRecord& rec) {
  // replicate r of batch b always runs on the stream derive_seed(master, r, b)
  const std::uint64_t r = static_cast<std::uint64_t>(rec.replicate_id % cfg.replicates);
  PartitionState state(cfg.alpha, base,
                       derive_seed(cfg.master_seed, r, static_cast<std::uint64_t>(batch)));
  state.run_to(n_target);
  rec.n = state.n();
  rec.k_n = state.k();
  rec.kn_over_nalpha = state.kn_over_n_alpha();

  const SuffStats st = state.stats();
  const QmleResult q = qmle(st);
  rec.alpha_hat = q.alpha_hat;
  rec.boundary = static_cast<int>(q.boundary);
  if (q.boundary != QmleBoundary::kInterior) return;

  const double nd = static_cast<double>(rec.n);
  const double kd = static_cast<double>(rec.k_n);
  const SimplexPair hat = estimate_simplex(state, q.alpha_hat, SimplexKind::kQmleZero);
  const SimplexPair freq = estimate_simplex(state, q.alpha_hat, SimplexKind::kFrequency);
  rec.tv_hat = tv(hat);
  rec.tv_freq = tv(freq);
  rec.stat_qmle = std::sqrt(kd * info_true) * (q.alpha_hat - cfg.alpha);
  rec.stat_tv = nd * std::sqrt(info_true / kd) * rec.tv_hat;
  rec.stat_kl = 2.0 * nd / cfg.alpha * kl(hat);

  if (cfg.experiment == ExperimentKind::kCoverage) {
    const double delta = cfg.delta_rule == DeltaRule::kKnPow051
                             ? delta_kn_pow(rec.k_n)
                             : delta_sqrt_kn_log(rec.k_n, rec.n);
    const auto subset = sample_subset_in(state.block_sizes(), delta, state.rng());
    const SubsetCI ci = local_ci(state.block_sizes(), q, cfg.eps, subset, delta);
    double truth_mass = 0.0;
    for (std::int64_t i : subset) truth_mass += hat.truth[static_cast<std::size_t>(i)];
    rec.covered = std::abs(ci.center - truth_mass) <= ci.half_width ? 1 : 0;
    rec.subset_size = static_cast<std::int64_t>(subset.size());
  }
}

std::string records_to_csv(const std::vector<ReplicateRecord>& records) {
  std::string csv =
      "replicate_id,n,k_n,alpha_hat,boundary,kn_over_nalpha,stat_qmle,stat_tv,stat_kl,"
      "tv_hat,tv_freq,covered,subset_size,error\n";
  for (const auto& r : records) {
    csv += std::to_string(r.replicate_id) + ",";
    if (r.failed) {
      csv += ",,,,,,,,,,,," + csv_quote(r.error) + "\n";
      continue;
    }
    csv += std::to_string(r.n) + "," + std::to_string(r.k_n) + "," + fmt_double(r.alpha_hat) +
           "," + std::to_string(r.boundary) + "," + fmt_double(r.kn_over_nalpha) + ",";
    if (r.boundary == 0) {
      csv += fmt_double(r.stat_qmle) + "," + fmt_double(r.stat_tv) + "," +
             fmt_double(r.stat_kl) + "," + fmt_double(r.tv_hat) + "," + fmt_double(r.tv_freq);
    } else {
      csv += ",,,,";
    }
    csv += ",";
    if (r.covered >= 0)
      csv += std::to_string(r.covered) + "," + std::to_string(r.subset_size);
    else
      csv += ",";
    csv += ",\n";
  }
  return csv;
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const double info_true = sibuya::fisher_info(cfg.alpha, 1e-10).value;
  // one discretization for all replicates (the half-t quantile setup is costly)
  const ParticleMeasure base_measure = discretize(cfg.mixing);

  std::vector<std::int64_t> batch_n;
  if (cfg.experiment == ExperimentKind::kRateSweep) {
    batch_n = {cfg.n / 8, cfg.n / 4, cfg.n / 2, cfg.n};
    for (std::int64_t b : batch_n)
      if (b < 2) throw std::invalid_argument("RateSweep: n must be at least 16");
  } else {
    batch_n = {cfg.n};
  }
  const std::int64_t batches = static_cast<std::int64_t>(batch_n.size());
  const std::int64_t total = batches * cfg.replicates;

  std::vector<ReplicateRecord> records(static_cast<std::size_t>(total));
  parallel_for(total, cfg.threads, [&](std::int64_t idx) {
    const std::int64_t batch = idx / cfg.replicates;
    ReplicateRecord& rec = records[static_cast<std::size_t>(idx)];
    rec.replicate_id = idx;
    try {
      run_one(cfg, base_measure, batch, batch_n[static_cast<std::size_t>(batch)], info_true, rec);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  });

  ExperimentSummary s;
  s.experiment = cfg.experiment;
  s.replicates = total;
  std::vector<double> kn_values, v_qmle, v_tv, v_kl;
  std::int64_t covered_sum = 0, covered_n = 0, subset_sum = 0;
  for (const auto& r : records) {
    if (r.failed) {
      ++s.failures;
      continue;
    }
    kn_values.push_back(r.kn_over_nalpha);
    if (r.boundary != 0) {
      ++s.boundary_count;
      continue;
    }
    v_qmle.push_back(r.stat_qmle);
    v_tv.push_back(r.stat_tv);
    v_kl.push_back(r.stat_kl);
    if (r.covered >= 0) {
      covered_sum += r.covered;
      subset_sum += r.subset_size;
      ++covered_n;
    }
  }

  if (!kn_values.empty()) {
    s.mean_kn_over_nalpha = stats::mean(kn_values);
    s.se_kn_over_nalpha = kn_values.size() > 1
                              ? stats::sample_sd(kn_values) / std::sqrt(double(kn_values.size()))
                              : 0.0;
    if (cfg.experiment == ExperimentKind::kDiversityHist)
      s.kn_histogram = histogram_json(kn_values);
    s.mode_count = smoothed_mode_count(kn_values);
  }
  s.band_lo = moment_band_endpoint(base_measure.min_node(), cfg.alpha);
  s.band_hi = moment_band_endpoint(base_measure.max_node(), cfg.alpha);

  const auto normal_cdf = [](double z) { return stats::normal_cdf(z); };
  const auto half_normal_cdf = [](double x) {
    return x <= 0.0 ? 0.0 : 2.0 * stats::normal_cdf(x) - 1.0;
  };
  const auto chi2_1_cdf = [](double x) {
    return x <= 0.0 ? 0.0 : 2.0 * stats::normal_cdf(std::sqrt(x)) - 1.0;
  };
  StatBlock bq = summarize_stat(std::move(v_qmle), normal_cdf);
  StatBlock bt = summarize_stat(std::move(v_tv), half_normal_cdf);
  StatBlock bk = summarize_stat(std::move(v_kl), chi2_1_cdf);
  s.mean_stat_qmle = bq.mean; s.sd_stat_qmle = bq.sd; s.ks_qmle = bq.ks;
  s.mean_stat_tv = bt.mean; s.sd_stat_tv = bt.sd; s.ks_tv = bt.ks;
  s.mean_stat_kl = bk.mean; s.sd_stat_kl = bk.sd; s.ks_kl = bk.ks;

  if (cfg.experiment == ExperimentKind::kQQ) {
    s.qq = {{"stat_qmle", qq_pairs(bq.sorted, [](double p) { return stats::normal_quantile(p); })},
            {"stat_tv", qq_pairs(bt.sorted, [](double p) { return stats::half_normal_quantile(p); })},
            {"stat_kl", qq_pairs(bk.sorted, [](double p) { return stats::chi2_1_quantile(p); })}};
  }

  if (covered_n > 0) {
    s.coverage = static_cast<double>(covered_sum) / static_cast<double>(covered_n);
    s.coverage_se = std::sqrt(s.coverage * (1.0 - s.coverage) / static_cast<double>(covered_n));
    s.mean_subset_size = static_cast<double>(subset_sum) / static_cast<double>(covered_n);
  }

  if (cfg.experiment == ExperimentKind::kRateSweep) {
    std::vector<double> lx, ly_hat, ly_freq;
    for (std::int64_t b = 0; b < batches; ++b) {
      double sum_hat = 0.0, sum_freq = 0.0;
      std::int64_t count = 0;
      for (std::int64_t r = 0; r < cfg.replicates; ++r) {
        const auto& rec = records[static_cast<std::size_t>(b * cfg.replicates + r)];
        if (rec.failed || rec.boundary != 0) continue;
        sum_hat += rec.tv_hat;
        sum_freq += rec.tv_freq;
        ++count;
      }
      SweepPoint pt;
      pt.n = batch_n[static_cast<std::size_t>(b)];
      if (count > 0) {
        pt.mean_tv_hat = sum_hat / static_cast<double>(count);
        pt.mean_tv_freq = sum_freq / static_cast<double>(count);
      }
      s.sweep.push_back(pt);
      lx.push_back(std::log(static_cast<double>(pt.n)));
      ly_hat.push_back(std::log(pt.mean_tv_hat));
      ly_freq.push_back(std::log(pt.mean_tv_freq));
    }
    s.slope_hat = fit_slope(lx, ly_hat);
    s.slope_freq = fit_slope(lx, ly_freq);
  }

  if (!cfg.output_path.empty()) {
    write_text_file(cfg.output_path, records_to_csv(records));
    std::string summary_path = cfg.output_path;
    if (summary_path.size() > 4 && summary_path.ends_with(".csv"))
      summary_path.resize(summary_path.size() - 4);
    summary_path += ".summary.json";
    write_text_file(summary_path, summary_to_json(s, cfg).dump(2) + "\n");
  }
  return s;
}

nlohmann::json summary_to_json(const ExperimentSummary& s, const ExperimentConfig& cfg) {
  nlohmann::json j{
      {"experiment", experiment_name(s.experiment)},
      {"config", config_to_json(cfg)},
      {"replicates", s.replicates},
      {"failures", s.failures},
      {"boundary_count", s.boundary_count},
      {"kn",
       {{"mean_kn_over_nalpha", s.mean_kn_over_nalpha},
        {"se", s.se_kn_over_nalpha},
        {"band", {s.band_lo, s.band_hi}},
        {"mode_count", s.mode_count}}},
      {"stats",
       {{"stat_qmle", {{"mean", s.mean_stat_qmle}, {"sd", s.sd_stat_qmle}, {"ks", s.ks_qmle}}},
        {"stat_tv", {{"mean", s.mean_stat_tv}, {"sd", s.sd_stat_tv}, {"ks", s.ks_tv}}},
        {"stat_kl", {{"mean", s.mean_stat_kl}, {"sd", s.sd_stat_kl}, {"ks", s.ks_kl}}}}}};
  if (s.experiment == ExperimentKind::kDiversityHist && !s.kn_histogram.is_null())
    j["kn"]["histogram"] = s.kn_histogram;
  if (s.experiment == ExperimentKind::kQQ) j["qq"] = s.qq;
  if (s.experiment == ExperimentKind::kCoverage) {
    j["coverage"] = {{"rate", s.coverage},
                     {"se", s.coverage_se},
                     {"mean_subset_size", s.mean_subset_size}};
  }
  if (s.experiment == ExperimentKind::kRateSweep) {
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& pt : s.sweep)
      sweep.push_back({{"n", pt.n},
                       {"mean_tv_hat", pt.mean_tv_hat},
                       {"mean_tv_freq", pt.mean_tv_freq}});
    j["sweep"] = sweep;
    j["slope_hat"] = s.slope_hat;
    j["slope_freq"] = s.slope_freq;
  }
  return j;
}

}  // namespace gplab::harness
