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

#ifndef QOSPP_EVALUATION_H_
#define QOSPP_EVALUATION_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qospp/factorization.h"
#include "qospp/neighborhood.h"
#include "qospp/obfuscation.h"
#include "qospp/qos_matrix.h"

namespace qospp {

enum class Approach { kUmean, kImean, kUipcc, kPmf, kPUipcc, kPPmf };

std::string_view ApproachName(Approach approach);
// Case-insensitive; accepts "umean", "p-pmf", "P_UIPCC", ...
Approach ParseApproach(std::string_view name);
// True for the approaches that only ever see obfuscated data.
bool IsPrivacyPreserving(Approach approach);
const std::vector<Approach>& AllApproaches();

enum class QosKind { kResponseTime, kThroughput };

std::string_view QosName(QosKind kind);  // "rt" / "tp"
QosKind ParseQos(std::string_view name);

struct Hyperparameters {
  NeighborConfig uipcc;
  NeighborConfig puipcc;
  TrainConfig pmf;
  TrainConfig ppmf;

  // Reference settings per QoS attribute: k = 10, d = 10; UIPCC lambda
  // 0.1 (RT) / 0.9 (TP); P-UIPCC lambda 0.9; PMF gamma 40 (RT) / 800 (TP);
  // P-PMF gamma 12.
  static Hyperparameters Defaults(QosKind kind);
};

struct ExperimentConfig {
  QosKind qos = QosKind::kResponseTime;
  std::vector<Approach> approaches;
  std::vector<double> densities;
  std::vector<double> alphas{0.5};
  std::vector<NoiseKind> noises{NoiseKind::kUniform};
  std::int32_t rounds = 1;
  std::uint64_t base_seed = 0;
  Hyperparameters hyper = Hyperparameters::Defaults(QosKind::kResponseTime);
  // Worker threads for independent (density, round) cells.
  std::int32_t jobs = 1;

  void Validate() const;
};

struct EvalRecord {
  Approach approach = Approach::kUmean;
  QosKind qos = QosKind::kResponseTime;
  double density = 0.0;
  // Unset for approaches that do not obfuscate.
  std::optional<double> alpha;
  std::optional<NoiseKind> noise;
  std::int32_t round = 0;
  double mae = 0.0;  // NaN when the cell failed
  double elapsed_ms = 0.0;
  std::string error;

  bool ok() const { return error.empty(); }
};

struct AggregateRecord {
  Approach approach = Approach::kUmean;
  QosKind qos = QosKind::kResponseTime;
  double density = 0.0;
  std::optional<double> alpha;
  std::optional<NoiseKind> noise;
  double mean_mae = 0.0;  // over successful rounds; NaN if none
  double mean_elapsed_ms = 0.0;
  std::int32_t rounds = 0;
  std::int32_t failures = 0;
};

struct EvalReport {
  std::vector<EvalRecord> records;

  // One entry per (approach, density, alpha, noise), in record order.
  std::vector<AggregateRecord> Aggregates() const;
  // Aggregate for one cell, if present.
  std::optional<AggregateRecord> Find(Approach approach, double density,
                                      std::optional<double> alpha = {},
                                      std::optional<NoiseKind> noise = {}) const;
};

// Mean absolute error over the cells of `test`. Throws DataError when the
// test set is empty or a test cell has no finite prediction.
double Mae(const DenseMatrix& predictions, const QosMatrix& test);

// Seed derivations. Every approach in a round shares the split; the
// obfuscation stream does not depend on the noise kind, so uniform and
// Gaussian arms draw from the same per-user generators.
std::uint64_t SplitSeed(std::uint64_t base, double density, std::int32_t round);
std::uint64_t ObfuscationSeed(std::uint64_t base, double density, double alpha,
                              std::int32_t round);
std::uint64_t InitSeed(std::uint64_t base, double density, std::int32_t round);

// Runs every configured cell. A failing cell becomes an error record.
EvalReport RunExperiment(const ExperimentConfig& cfg, const QosMatrix& data);

// Paired uniform-vs-Gaussian comparison; `cfg` must list only privacy
// approaches and both noise kinds.
EvalReport CompareNoiseDistributions(const ExperimentConfig& cfg,
                                     const QosMatrix& data);

// CSV with header approach,qos,density,alpha,distribution,round,mae,elapsed_ms.
// Aggregate rows use the literal "mean" as round. Without `with_timing` the
// elapsed_ms column is written as NA so reruns are byte-identical.
void WriteReportCsv(const EvalReport& report, std::ostream& out,
                    bool with_timing, bool with_aggregates);

// Shortest round-trip decimal text for a double.
std::string FormatNumber(double value);

}  // namespace qospp

#endif  // QOSPP_EVALUATION_H_
