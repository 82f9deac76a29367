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

#ifndef QOSPP_OBFUSCATION_H_
#define QOSPP_OBFUSCATION_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "qospp/qos_matrix.h"
#include "qospp/seeding.h"

namespace qospp {

// Rows whose standard deviation falls below this are treated as constant.
inline constexpr double kDegenerateStd = 1e-12;

// Per-user mean and population standard deviation of the observed row. Kept
// on the user side; never serialized with obfuscated data.
struct UserSecret {
  double mean = 0.0;
  double std = 0.0;
};

enum class NoiseKind { kUniform, kGaussian };

std::string_view NoiseName(NoiseKind kind);
NoiseKind ParseNoise(std::string_view name);

struct ObfuscationConfig {
  // Half-width for uniform noise, standard deviation for Gaussian noise.
  double alpha = 0.5;
  NoiseKind noise = NoiseKind::kUniform;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct NormalizedRow {
  std::vector<double> values;
  UserSecret secret;
};

// z-score normalization with population std. Degenerate rows map to zeros
// with secret.std = 0.
NormalizedRow NormalizeRow(std::span<const double> row);

// Adds i.i.d. noise drawn from `rng`. alpha = 0 returns the input unchanged.
std::vector<double> PerturbRow(std::span<const double> normalized,
                               const ObfuscationConfig& cfg, Rng& rng);

// The RNG substream owned by user `u` under `seed`.
Rng UserStream(std::uint64_t seed, std::int32_t u);

// Normalize + perturb one user's row with that user's substream.
NormalizedRow ObfuscateRow(std::span<const double> row,
                           const ObfuscationConfig& cfg, std::int32_t u);

struct ObfuscationResult {
  ObfuscatedMatrix matrix;
  // One secret per user; users without observations get {0, 0}.
  std::vector<UserSecret> secrets;
};

ObfuscationResult ObfuscateMatrix(const QosMatrix& train,
                                  const ObfuscationConfig& cfg);

// mean + std * r_hat, clamped below at 0.
double Recover(double normalized_prediction, const UserSecret& secret);

// Monte-Carlo probe of the scalar-product approximation: draws two
// zero-mean unit-variance vectors of length n, perturbs both with
// Uniform[-alpha, alpha] noise and returns |a'.b' - a.b| / n.
double ScalarProductError(std::int32_t n, double alpha, std::uint64_t seed);

}  // namespace qospp

#endif  // QOSPP_OBFUSCATION_H_
