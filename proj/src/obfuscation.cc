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

#include "qospp/obfuscation.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace qospp {

std::string_view NoiseName(NoiseKind kind) {
  return kind == NoiseKind::kUniform ? "uniform" : "gaussian";
}

NoiseKind ParseNoise(std::string_view name) {
  if (name == "uniform") return NoiseKind::kUniform;
  if (name == "gaussian") return NoiseKind::kGaussian;
  throw ConfigError("unknown noise distribution '" + std::string(name) +
                    "' (expected uniform or gaussian)");
}

void ObfuscationConfig::Validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("alpha must be a finite value >= 0");
  }
}

NormalizedRow NormalizeRow(std::span<const double> row) {
  if (row.empty()) throw DataError("cannot normalize an empty row");
  const auto n = static_cast<double>(row.size());
  double sum = 0.0;
  for (double x : row) sum += x;
  const double mean = sum / n;
  double sq = 0.0;
  for (double x : row) sq += (x - mean) * (x - mean);
  const double std = std::sqrt(sq / n);

  NormalizedRow out;
  out.values.resize(row.size(), 0.0);
  if (std < kDegenerateStd) {
    out.secret = {mean, 0.0};
    return out;
  }
  out.secret = {mean, std};
  for (std::size_t i = 0; i < row.size(); ++i) {
    out.values[i] = (row[i] - mean) / std;
  }
  return out;
}

std::vector<double> PerturbRow(std::span<const double> normalized,
                               const ObfuscationConfig& cfg, Rng& rng) {
  cfg.Validate();
  std::vector<double> out(normalized.begin(), normalized.end());
  if (cfg.alpha == 0.0) return out;
  if (cfg.noise == NoiseKind::kUniform) {
    std::uniform_real_distribution<double> noise(-cfg.alpha, cfg.alpha);
    for (double& x : out) x += noise(rng);
  } else {
    std::normal_distribution<double> noise(0.0, cfg.alpha);
    for (double& x : out) x += noise(rng);
  }
  return out;
}

Rng UserStream(std::uint64_t seed, std::int32_t u) {
  return Rng(DeriveSeed({seed, static_cast<std::uint64_t>(u)}));
}

NormalizedRow ObfuscateRow(std::span<const double> row,
                           const ObfuscationConfig& cfg, std::int32_t u) {
  NormalizedRow normalized = NormalizeRow(row);
  Rng rng = UserStream(cfg.seed, u);
  normalized.values = PerturbRow(normalized.values, cfg, rng);
  return normalized;
}

ObfuscationResult ObfuscateMatrix(const QosMatrix& train,
                                  const ObfuscationConfig& cfg) {
  cfg.Validate();
  if (train.empty()) throw DataError("cannot obfuscate an empty matrix");
  ObfuscationResult result;
  result.secrets.assign(static_cast<std::size_t>(train.n_users()), {});
  std::vector<Entry> entries;
  entries.reserve(train.nnz());
  std::vector<double> values;
  for (std::int32_t u = 0; u < train.n_users(); ++u) {
    auto cells = train.row(u);
    if (cells.empty()) continue;
    values.clear();
    for (const Cell& c : cells) values.push_back(c.value);
    NormalizedRow row = ObfuscateRow(values, cfg, u);
    result.secrets[u] = row.secret;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      entries.push_back({u, cells[i].index, row.values[i]});
    }
  }
  result.matrix =
      ObfuscatedMatrix(train.n_users(), train.n_services(), std::move(entries));
  return result;
}

double Recover(double normalized_prediction, const UserSecret& secret) {
  return std::max(0.0, secret.mean + secret.std * normalized_prediction);
}

double ScalarProductError(std::int32_t n, double alpha, std::uint64_t seed) {
  if (n < 2) throw ConfigError("scalar product probe needs n >= 2");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  Rng rng(DeriveSeed({seed, static_cast<std::uint64_t>(n)}));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> a(n), b(n);
  for (double& x : a) x = normal(rng);
  for (double& x : b) x = normal(rng);
  a = NormalizeRow(a).values;
  b = NormalizeRow(b).values;

  ObfuscationConfig cfg{alpha, NoiseKind::kUniform, 0};
  const std::vector<double> a_noisy = PerturbRow(a, cfg, rng);
  const std::vector<double> b_noisy = PerturbRow(b, cfg, rng);
  double clean = 0.0;
  double noisy = 0.0;
  for (std::int32_t i = 0; i < n; ++i) {
    clean += a[i] * b[i];
    noisy += a_noisy[i] * b_noisy[i];
  }
  return std::abs(noisy - clean) / n;
}

}  // namespace qospp
