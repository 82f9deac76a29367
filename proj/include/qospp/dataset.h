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

#ifndef QOSPP_DATASET_H_
#define QOSPP_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "qospp/factorization.h"
#include "qospp/qos_matrix.h"

namespace qospp {

inline constexpr double kWsDreamSentinel = -1.0;

// Whitespace-separated dense matrix, one user per line (WS-DREAM
// rtMatrix.txt / tpMatrix.txt layout). Values <= 0 and the sentinel are
// treated as unobserved. Errors carry the 1-based line number.
QosMatrix LoadDenseMatrix(const std::filesystem::path& path,
                          double missing_sentinel = kWsDreamSentinel);
QosMatrix ParseDenseMatrix(std::istream& in,
                           double missing_sentinel = kWsDreamSentinel);

// "u s value" per line; '#' starts a comment line. A "# shape <n> <m>"
// comment fixes the dimensions, otherwise they are 1 + max index per axis.
// Values <= 0 are dropped. Repeated cells must agree.
QosMatrix LoadTriples(const std::filesystem::path& path);
QosMatrix ParseTriples(std::istream& in);

// Writes the triple format including the shape header. Values are written
// with round-trip precision.
void WriteTriples(const SparseMatrix& m, std::ostream& out);

struct DatasetStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population
  std::int32_t n_users = 0;
  std::int32_t n_services = 0;
  std::size_t n_entries = 0;
};

DatasetStats ComputeStats(const QosMatrix& m);

struct SplitConfig {
  double density = 0.1;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct Split {
  QosMatrix train;
  QosMatrix test;
};

// Keeps round(density * nnz) entries drawn uniformly without replacement
// from all stored entries as training data; the rest is the test set.
Split SplitByDensity(const QosMatrix& m, const SplitConfig& cfg);

struct SynthConfig {
  std::int32_t n_users = 20;
  std::int32_t n_services = 30;
  std::int32_t rank = 2;
  double bias_scale = 1.0;
  double density = 1.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  QosMatrix matrix;
  FactorModel truth;
};

// Values are exactly PredictPpmf(truth, u, s): a rank-d interaction plus a
// per-service bias, with the biases shifted so every value is >= 1.
SyntheticData SynthLowRank(const SynthConfig& cfg);

}  // namespace qospp

#endif  // QOSPP_DATASET_H_
