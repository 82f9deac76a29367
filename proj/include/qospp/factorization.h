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

#ifndef QOSPP_FACTORIZATION_H_
#define QOSPP_FACTORIZATION_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qospp/qos_matrix.h"

namespace qospp {

// Latent factor model. User factors U_u and service factors S_s are stored
// contiguously (n x d and m x d, row-major), i.e. the columns of the d x n
// and d x m factor matrices. Plain PMF keeps the biases at zero.
struct FactorModel {
  std::int32_t rank = 0;
  std::int32_t n_users = 0;
  std::int32_t n_services = 0;
  std::vector<double> user_factors;
  std::vector<double> service_factors;
  std::vector<double> service_bias;

  FactorModel() = default;
  FactorModel(std::int32_t n, std::int32_t m, std::int32_t d);

  std::span<double> user(std::int32_t u) {
    return {user_factors.data() + static_cast<std::size_t>(u) * rank,
            static_cast<std::size_t>(rank)};
  }
  std::span<const double> user(std::int32_t u) const {
    return {user_factors.data() + static_cast<std::size_t>(u) * rank,
            static_cast<std::size_t>(rank)};
  }
  std::span<double> service(std::int32_t s) {
    return {service_factors.data() + static_cast<std::size_t>(s) * rank,
            static_cast<std::size_t>(rank)};
  }
  std::span<const double> service(std::int32_t s) const {
    return {service_factors.data() + static_cast<std::size_t>(s) * rank,
            static_cast<std::size_t>(rank)};
  }

  // U_u^T S_s
  double Interaction(std::int32_t u, std::int32_t s) const;
  bool AllFinite() const;
};

struct TrainConfig {
  std::int32_t rank = 10;
  double gamma = 12.0;
  double learning_rate = 0.001;
  std::int32_t max_iters = 300;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Training diverged (non-finite objective).
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FactorGradient {
  std::vector<double> service_bias;
  std::vector<double> user_factors;
  std::vector<double> service_factors;
};

struct TrainResult {
  FactorModel model;
  // Objective at init followed by the objective after every accepted step.
  std::vector<double> loss_history;
  std::int32_t iterations = 0;
  bool converged = false;
};

// U, S ~ Gaussian(0, 0.1) i.i.d., b = 0.
FactorModel InitModel(std::int32_t n, std::int32_t m, const TrainConfig& cfg);

// Biased objective on obfuscated data:
//   1/2 sum_obs (r'_us - b_s - U_u^T S_s)^2
//     + gamma/2 (sum_s b_s^2 + sum_u |U_u|^2 + sum_s |S_s|^2)
double LossPpmf(const FactorModel& model, const SparseMatrix& data,
                double gamma);
FactorGradient GradPpmf(const FactorModel& model, const SparseMatrix& data,
                        double gamma);

// Plain objective on raw data (no bias term):
//   1/2 sum_obs (R_us - U_u^T S_s)^2 + gamma/2 (sum_u |U_u|^2 + sum_s |S_s|^2)
// The returned gradient has an all-zero bias component.
double LossPmf(const FactorModel& model, const SparseMatrix& data,
               double gamma);
FactorGradient GradPmf(const FactorModel& model, const SparseMatrix& data,
                       double gamma);

// Batch gradient descent with halve-on-increase backtracking. Throws
// TrainingError when the objective cannot be kept finite.
TrainResult TrainPpmf(const ObfuscatedMatrix& data, const TrainConfig& cfg);
TrainResult TrainPmf(const QosMatrix& data, const TrainConfig& cfg);

// b_s + U_u^T S_s, in normalized space.
double PredictPpmf(const FactorModel& model, std::int32_t u, std::int32_t s);
// max(0, U_u^T S_s), in raw QoS units.
double PredictPmf(const FactorModel& model, std::int32_t u, std::int32_t s);

// Checkpoint: "n m d" header line, then b, then U and S one factor per line.
void WriteModel(const FactorModel& model, std::ostream& out);
FactorModel ReadModel(std::istream& in);

}  // namespace qospp

#endif  // QOSPP_FACTORIZATION_H_
