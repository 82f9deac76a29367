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

#ifndef QOSPP_NEIGHBORHOOD_H_
#define QOSPP_NEIGHBORHOOD_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qospp/qos_matrix.h"

namespace qospp {

struct NeighborConfig {
  std::int32_t k = 10;
  // Weight of the user-based side in the convex combination.
  double lambda = 0.9;

  void Validate() const;
};

struct Neighbor {
  std::int32_t index = 0;
  double similarity = 0.0;
};

// Pearson correlation over the co-invoked services J, centering each user by
// the mean of the user's full observed row. Undefined when |J| < 2 or either
// centered norm over J is zero.
std::optional<double> PccUserSimilarity(const QosMatrix& data, std::int32_t u,
                                        std::int32_t v);

// Service-side analogue of PccUserSimilarity (column means, co-invoking
// users). Used by the raw UIPCC counterpart.
std::optional<double> PccServiceSimilarity(const QosMatrix& data,
                                           std::int32_t s, std::int32_t g);

// sum_{I_u & I_v} r'_us r'_vs / sqrt(|I_u| |I_v|), clamped to [-1, 1].
// Undefined on empty overlap.
std::optional<double> ApproxUserSimilarity(const ObfuscatedMatrix& data,
                                           std::int32_t u, std::int32_t v);

// Cosine between columns s and g over the users that invoked both.
// Undefined on empty overlap or a zero norm.
std::optional<double> CosineServiceSimilarity(const ObfuscatedMatrix& data,
                                              std::int32_t s, std::int32_t g);

enum class SimilarityAxis { kUsers, kServices };

// Dense symmetric table of pairwise similarities with per-pair overlap
// counts. Undefined pairs are stored as NaN.
class SimilarityTable {
 public:
  SimilarityTable(SimilarityAxis axis, std::int32_t size);

  SimilarityAxis axis() const { return axis_; }
  std::int32_t size() const { return size_; }
  std::optional<double> at(std::int32_t a, std::int32_t b) const;
  std::int32_t support(std::int32_t a, std::int32_t b) const;
  // Row of raw values, NaN where undefined.
  std::span<const double> row(std::int32_t a) const;

  // Sets both (a, b) and (b, a).
  void Set(std::int32_t a, std::int32_t b, std::optional<double> sim,
           std::int32_t support);

 private:
  std::size_t Offset(std::int32_t a, std::int32_t b) const {
    return static_cast<std::size_t>(a) * size_ + b;
  }

  SimilarityAxis axis_;
  std::int32_t size_;
  std::vector<double> sims_;
  std::vector<std::int32_t> support_;
};

SimilarityTable BuildUserPccTable(const QosMatrix& data);
SimilarityTable BuildServicePccTable(const QosMatrix& data);
SimilarityTable BuildUserApproxTable(const ObfuscatedMatrix& data);
SimilarityTable BuildServiceCosineTable(const ObfuscatedMatrix& data);

// Up to k candidates with the largest strictly positive similarity among
// those accepted by `eligible`; NaN entries are skipped. Ties go to the lower
// index.
std::vector<Neighbor> TopKNeighbors(
    std::span<const double> similarities, std::int32_t k,
    const std::function<bool(std::int32_t)>& eligible);

// Similarity-weighted average of r'_vs over the user neighbors of u.
std::optional<double> PredictUserBased(const SparseMatrix& data,
                                       std::int32_t u, std::int32_t s,
                                       std::span<const Neighbor> neighbors);

// Similarity-weighted average of r'_ug over the service neighbors of s.
std::optional<double> PredictServiceBased(const SparseMatrix& data,
                                          std::int32_t u, std::int32_t s,
                                          std::span<const Neighbor> neighbors);

// lambda * user + (1 - lambda) * service; falls back to whichever side is
// defined, and to 0 when neither is.
double Combine(std::optional<double> user_based,
               std::optional<double> service_based, double lambda);

// Completed matrix in normalized space. Observed cells carry their input
// value; every unobserved cell gets a finite prediction (0 when no neighbor
// information exists, i.e. the user mean after recovery).
DenseMatrix PredictAllPuipcc(const ObfuscatedMatrix& data,
                             const NeighborConfig& cfg);

// Raw-space UIPCC with mean-offset predictions
//   user side:    mean_u + sum sim(u,v) (R_vs - mean_v) / sum sim
//   service side: mean_s + sum sim(s,g) (R_ug - mean_g) / sum sim
// falling back to user mean, service mean, then global mean. Predictions are
// clamped below at 0.
DenseMatrix PredictAllUipcc(const QosMatrix& data, const NeighborConfig& cfg);

}  // namespace qospp

#endif  // QOSPP_NEIGHBORHOOD_H_
