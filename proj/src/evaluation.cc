// Copyright 2026 The qospp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qospp/evaluation.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <thread>
#include <tuple>

#include "qospp/baselines.h"
#include "qospp/dataset.h"
#include "qospp/seeding.h"

namespace qospp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string Normalize(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (c == '_') c = '-';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

using Clock = std::chrono::steady_clock;

double MillisSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

// Predictions in normalized space for the test cells, recovered per user.
DenseMatrix RecoverTestCells(const DenseMatrix& normalized,
                             const std::vector<UserSecret>& secrets,
                             const QosMatrix& test) {
  DenseMatrix out(test.n_users(), test.n_services(), kNaN);
  for (std::int32_t u = 0; u < test.n_users(); ++u) {
    for (const Cell& c : test.row(u)) {
      out(u, c.index) = Recover(normalized(u, c.index), secrets[u]);
    }
  }
  return out;
}

template <typename Predict>
DenseMatrix PredictTestCells(const QosMatrix& test, Predict predict) {
  DenseMatrix out(test.n_users(), test.n_services(), kNaN);
  for (std::int32_t u = 0; u < test.n_users(); ++u) {
    for (const Cell& c : test.row(u)) out(u, c.index) = predict(u, c.index);
  }
  return out;
}

double RunPlain(Approach approach, const ExperimentConfig& cfg,
                const Split& split, std::uint64_t init_seed) {
  switch (approach) {
    case Approach::kUmean:
      return Mae(PredictAllUmean(split.train), split.test);
    case Approach::kImean:
      return Mae(PredictAllImean(split.train), split.test);
    case Approach::kUipcc:
      return Mae(PredictAllUipcc(split.train, cfg.hyper.uipcc), split.test);
    case Approach::kPmf: {
      TrainConfig tc = cfg.hyper.pmf;
      tc.seed = init_seed;
      const FactorModel model = TrainPmf(split.train, tc).model;
      return Mae(PredictTestCells(split.test,
                                  [&](std::int32_t u, std::int32_t s) {
                                    return PredictPmf(model, u, s);
                                  }),
                 split.test);
    }
    default:
      throw ConfigError("not a plain approach");
  }
}

double RunPrivate(Approach approach, const ExperimentConfig& cfg,
                  const ObfuscationResult& obf, const Split& split,
                  std::uint64_t init_seed) {
  switch (approach) {
    case Approach::kPUipcc: {
      const DenseMatrix normalized =
          PredictAllPuipcc(obf.matrix, cfg.hyper.puipcc);
      return Mae(RecoverTestCells(normalized, obf.secrets, split.test),
                 split.test);
    }
    case Approach::kPPmf: {
      TrainConfig tc = cfg.hyper.ppmf;
      tc.seed = init_seed;
      const FactorModel model = TrainPpmf(obf.matrix, tc).model;
      return Mae(PredictTestCells(split.test,
                                  [&](std::int32_t u, std::int32_t s) {
                                    return Recover(PredictPpmf(model, u, s),
                                                   obf.secrets[u]);
                                  }),
                 split.test);
    }
    default:
      throw ConfigError("not a privacy-preserving approach");
  }
}

// Records for one (density, round) cell of the sweep.
std::vector<EvalRecord> RunCell(const ExperimentConfig& cfg,
                                const QosMatrix& data, double density,
                                std::int32_t round) {
  std::vector<EvalRecord> out;
  auto record = [&](Approach a, std::optional<double> alpha,
                    std::optional<NoiseKind> noise) -> EvalRecord& {
    EvalRecord r;
    r.approach = a;
    r.qos = cfg.qos;
    r.density = density;
    r.alpha = alpha;
    r.noise = noise;
    r.round = round;
    out.push_back(std::move(r));
    return out.back();
  };
  auto fail = [](EvalRecord& r, const std::string& what) {
    r.mae = kNaN;
    r.error = what.empty() ? "unknown error" : what;
  };

  std::optional<Split> split;
  std::string split_error;
  try {
    split = SplitByDensity(data, {density, SplitSeed(cfg.base_seed, density, round)});
  } catch (const std::exception& e) {
    split_error = std::string("split: ") + e.what();
  }
  const std::uint64_t init_seed = InitSeed(cfg.base_seed, density, round);

  for (Approach a : cfg.approaches) {
    if (IsPrivacyPreserving(a)) continue;
    EvalRecord& r = record(a, std::nullopt, std::nullopt);
    if (!split) {
      fail(r, split_error);
      continue;
    }
    const auto start = Clock::now();
    try {
      r.mae = RunPlain(a, cfg, *split, init_seed);
    } catch (const std::exception& e) {
      fail(r, e.what());
    }
    r.elapsed_ms = MillisSince(start);
  }

  const bool any_private =
      std::any_of(cfg.approaches.begin(), cfg.approaches.end(),
                  IsPrivacyPreserving);
  if (!any_private) return out;
  for (double alpha : cfg.alphas) {
    for (NoiseKind noise : cfg.noises) {
      std::optional<ObfuscationResult> obf;
      std::string obf_error = split_error;
      double obf_ms = 0.0;
      if (split) {
        const auto start = Clock::now();
        try {
          obf = ObfuscateMatrix(
              split->train,
              {alpha, noise, ObfuscationSeed(cfg.base_seed, density, alpha, round)});
        } catch (const std::exception& e) {
          obf_error = std::string("obfuscation: ") + e.what();
        }
        obf_ms = MillisSince(start);
      }
      for (Approach a : cfg.approaches) {
        if (!IsPrivacyPreserving(a)) continue;
        EvalRecord& r = record(a, alpha, noise);
        if (!obf) {
          fail(r, obf_error);
          continue;
        }
        const auto start = Clock::now();
        try {
          r.mae = RunPrivate(a, cfg, *obf, *split, init_seed);
        } catch (const std::exception& e) {
          fail(r, e.what());
        }
        r.elapsed_ms = obf_ms + MillisSince(start);
      }
    }
  }
  return out;
}

template <typename T>
std::size_t PositionOf(const std::vector<T>& v, const T& x) {
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), x) - v.begin());
}

}  // namespace

std::string_view ApproachName(Approach approach) {
  switch (approach) {
    case Approach::kUmean: return "UMEAN";
    case Approach::kImean: return "IMEAN";
    case Approach::kUipcc: return "UIPCC";
    case Approach::kPmf: return "PMF";
    case Approach::kPUipcc: return "P-UIPCC";
    case Approach::kPPmf: return "P-PMF";
  }
  return "?";
}

Approach ParseApproach(std::string_view name) {
  const std::string key = Normalize(name);
  for (Approach a : AllApproaches()) {
    if (Normalize(ApproachName(a)) == key) return a;
  }
  throw ConfigError("unknown approach '" + std::string(name) + "'");
}

bool IsPrivacyPreserving(Approach approach) {
  return approach == Approach::kPUipcc || approach == Approach::kPPmf;
}

const std::vector<Approach>& AllApproaches() {
  static const std::vector<Approach> all = {
      Approach::kUmean, Approach::kImean,   Approach::kUipcc,
      Approach::kPmf,   Approach::kPUipcc, Approach::kPPmf};
  return all;
}

std::string_view QosName(QosKind kind) {
  return kind == QosKind::kResponseTime ? "rt" : "tp";
}

QosKind ParseQos(std::string_view name) {
  const std::string key = Normalize(name);
  if (key == "rt" || key == "response-time") return QosKind::kResponseTime;
  if (key == "tp" || key == "throughput") return QosKind::kThroughput;
  throw ConfigError("unknown QoS kind '" + std::string(name) +
                    "' (expected rt or tp)");
}

Hyperparameters Hyperparameters::Defaults(QosKind kind) {
  Hyperparameters h;
  const bool rt = kind == QosKind::kResponseTime;
  h.uipcc = {10, rt ? 0.1 : 0.9};
  h.puipcc = {10, 0.9};
  h.pmf.rank = 10;
  h.pmf.gamma = rt ? 40.0 : 800.0;
  h.ppmf.rank = 10;
  h.ppmf.gamma = 12.0;
  return h;
}

void ExperimentConfig::Validate() const {
  if (approaches.empty()) throw ConfigError("no approaches selected");
  if (densities.empty()) throw ConfigError("no densities given");
  for (double d : densities) {
    if (!(d > 0.0 && d < 1.0)) {
      throw ConfigError("density must be in (0, 1), got " + FormatNumber(d));
    }
  }
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  const bool any_private = std::any_of(approaches.begin(), approaches.end(),
                                       IsPrivacyPreserving);
  if (any_private) {
    if (alphas.empty()) throw ConfigError("no alpha values given");
    if (noises.empty()) throw ConfigError("no noise distributions given");
  }
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw ConfigError("alpha must be >= 0, got " + FormatNumber(a));
    }
  }
  hyper.uipcc.Validate();
  hyper.puipcc.Validate();
  hyper.pmf.Validate();
  hyper.ppmf.Validate();
}

std::vector<AggregateRecord> EvalReport::Aggregates() const {
  std::vector<AggregateRecord> out;
  std::vector<double> sums;
  std::vector<double> times;
  for (const EvalRecord& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const AggregateRecord& a) {
      return a.approach == r.approach && a.qos == r.qos &&
             a.density == r.density && a.alpha == r.alpha &&
             a.noise == r.noise;
    });
    std::size_t idx = static_cast<std::size_t>(it - out.begin());
    if (it == out.end()) {
      AggregateRecord a;
      a.approach = r.approach;
      a.qos = r.qos;
      a.density = r.density;
      a.alpha = r.alpha;
      a.noise = r.noise;
      out.push_back(a);
      sums.push_back(0.0);
      times.push_back(0.0);
    }
    AggregateRecord& a = out[idx];
    ++a.rounds;
    times[idx] += r.elapsed_ms;
    if (r.ok()) {
      sums[idx] += r.mae;
    } else {
      ++a.failures;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::int32_t ok = out[i].rounds - out[i].failures;
    out[i].mean_mae = ok > 0 ? sums[i] / ok : kNaN;
    out[i].mean_elapsed_ms = times[i] / out[i].rounds;
  }
  return out;
}

std::optional<AggregateRecord> EvalReport::Find(
    Approach approach, double density, std::optional<double> alpha,
    std::optional<NoiseKind> noise) const {
  for (const AggregateRecord& a : Aggregates()) {
    if (a.approach == approach && a.density == density && a.alpha == alpha &&
        a.noise == noise) {
      return a;
    }
  }
  return std::nullopt;
}

double Mae(const DenseMatrix& predictions, const QosMatrix& test) {
  if (test.empty()) throw DataError("MAE over an empty test set");
  if (predictions.n_rows != test.n_users() ||
      predictions.n_cols != test.n_services()) {
    throw DataError("prediction matrix shape does not match the test set");
  }
  double total = 0.0;
  for (std::int32_t u = 0; u < test.n_users(); ++u) {
    for (const Cell& c : test.row(u)) {
      const double p = predictions(u, c.index);
      if (!std::isfinite(p)) {
        throw DataError("missing prediction for test cell (" +
                        std::to_string(u) + ", " + std::to_string(c.index) +
                        ")");
      }
      total += std::abs(p - c.value);
    }
  }
  return total / static_cast<double>(test.nnz());
}

std::uint64_t SplitSeed(std::uint64_t base, double density,
                        std::int32_t round) {
  return DeriveSeed({base, 0x73706c6974, SeedWord(density),
                     static_cast<std::uint64_t>(round)});
}

std::uint64_t ObfuscationSeed(std::uint64_t base, double density, double alpha,
                              std::int32_t round) {
  return DeriveSeed({base, 0x6f62667573, SeedWord(density), SeedWord(alpha),
                     static_cast<std::uint64_t>(round)});
}

std::uint64_t InitSeed(std::uint64_t base, double density, std::int32_t round) {
  return DeriveSeed({base, 0x696e6974, SeedWord(density),
                     static_cast<std::uint64_t>(round)});
}

EvalReport RunExperiment(const ExperimentConfig& cfg, const QosMatrix& data) {
  cfg.Validate();
  struct Unit {
    double density;
    std::int32_t round;
  };
  std::vector<Unit> units;
  for (double d : cfg.densities) {
    for (std::int32_t r = 0; r < cfg.rounds; ++r) units.push_back({d, r});
  }
  std::vector<std::vector<EvalRecord>> results(units.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < units.size(); i = next++) {
      results[i] = RunCell(cfg, data, units[i].density, units[i].round);
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), units.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  EvalReport report;
  for (auto& chunk : results) {
    for (auto& r : chunk) report.records.push_back(std::move(r));
  }
  auto key = [&](const EvalRecord& r) {
    return std::tuple(PositionOf(cfg.approaches, r.approach),
                      PositionOf(cfg.densities, r.density),
                      r.alpha ? PositionOf(cfg.alphas, *r.alpha) : 0,
                      r.noise ? PositionOf(cfg.noises, *r.noise) : 0, r.round);
  };
  std::stable_sort(report.records.begin(), report.records.end(),
                   [&](const EvalRecord& a, const EvalRecord& b) {
                     return key(a) < key(b);
                   });
  return report;
}

EvalReport CompareNoiseDistributions(const ExperimentConfig& cfg,
                                     const QosMatrix& data) {
  for (Approach a : cfg.approaches) {
    if (!IsPrivacyPreserving(a)) {
      throw ConfigError("noise comparison only applies to P-UIPCC and P-PMF");
    }
  }
  const auto has = [&](NoiseKind k) {
    return std::find(cfg.noises.begin(), cfg.noises.end(), k) !=
           cfg.noises.end();
  };
  if (!has(NoiseKind::kUniform) || !has(NoiseKind::kGaussian)) {
    throw ConfigError("noise comparison needs both uniform and gaussian");
  }
  return RunExperiment(cfg, data);
}

std::string FormatNumber(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void WriteReportCsv(const EvalReport& report, std::ostream& out,
                    bool with_timing, bool with_aggregates) {
  out << "approach,qos,density,alpha,distribution,round,mae,elapsed_ms\n";
  auto prefix = [&](Approach a, QosKind q, double density,
                    std::optional<double> alpha,
                    std::optional<NoiseKind> noise) {
    out << ApproachName(a) << ',' << QosName(q) << ',' << FormatNumber(density)
        << ',' << (alpha ? FormatNumber(*alpha) : std::string("NA")) << ','
        << (noise ? NoiseName(*noise) : std::string_view("none")) << ',';
  };
  auto timing = [&](double ms) {
    if (!with_timing) return std::string("NA");
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), ms,
                                   std::chars_format::fixed, 3);
    return std::string(buf, ptr);
  };
  for (const EvalRecord& r : report.records) {
    prefix(r.approach, r.qos, r.density, r.alpha, r.noise);
    out << r.round << ',' << FormatNumber(r.mae) << ',' << timing(r.elapsed_ms)
        << '\n';
  }
  if (!with_aggregates) return;
  for (const AggregateRecord& a : report.Aggregates()) {
    prefix(a.approach, a.qos, a.density, a.alpha, a.noise);
    out << "mean," << FormatNumber(a.mean_mae) << ','
        << timing(a.mean_elapsed_ms) << '\n';
  }
}

}  // namespace qospp
