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

#ifndef QOSPP_BASELINES_H_
#define QOSPP_BASELINES_H_

#include <cstdint>
#include <vector>

#include "qospp/qos_matrix.h"

namespace qospp {

// Row means (UMEAN) and column means (IMEAN) of the training matrix, with the
// global training mean standing in for users/services without observations.
class MeanPredictor {
 public:
  // Throws DataError on an empty training matrix.
  explicit MeanPredictor(const QosMatrix& train);

  double UserMean(std::int32_t u) const { return user_mean_.at(u); }
  double ServiceMean(std::int32_t s) const { return service_mean_.at(s); }
  double global_mean() const { return global_mean_; }

 private:
  double global_mean_ = 0.0;
  std::vector<double> user_mean_;
  std::vector<double> service_mean_;
};

double PredictUmean(const QosMatrix& train, std::int32_t u, std::int32_t s);
double PredictImean(const QosMatrix& train, std::int32_t u, std::int32_t s);

// Completed matrices; observed cells keep their training values.
DenseMatrix PredictAllUmean(const QosMatrix& train);
DenseMatrix PredictAllImean(const QosMatrix& train);

}  // namespace qospp

#endif  // QOSPP_BASELINES_H_
