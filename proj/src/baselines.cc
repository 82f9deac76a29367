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

#include "qospp/baselines.h"

namespace qospp {

MeanPredictor::MeanPredictor(const QosMatrix& train) {
  if (train.empty()) throw DataError("mean predictor needs training data");
  double total = 0.0;
  for (std::int32_t u = 0; u < train.n_users(); ++u) {
    for (const Cell& c : train.row(u)) total += c.value;
  }
  global_mean_ = total / static_cast<double>(train.nnz());

  user_mean_.assign(train.n_users(), global_mean_);
  for (std::int32_t u = 0; u < train.n_users(); ++u) {
    auto row = train.row(u);
    if (row.empty()) continue;
    double sum = 0.0;
    for (const Cell& c : row) sum += c.value;
    user_mean_[u] = sum / static_cast<double>(row.size());
  }
  service_mean_.assign(train.n_services(), global_mean_);
  for (std::int32_t s = 0; s < train.n_services(); ++s) {
    auto col = train.column(s);
    if (col.empty()) continue;
    double sum = 0.0;
    for (const Cell& c : col) sum += c.value;
    service_mean_[s] = sum / static_cast<double>(col.size());
  }
}

double PredictUmean(const QosMatrix& train, std::int32_t u, std::int32_t) {
  return MeanPredictor(train).UserMean(u);
}

double PredictImean(const QosMatrix& train, std::int32_t, std::int32_t s) {
  return MeanPredictor(train).ServiceMean(s);
}

namespace {

template <typename Fn>
DenseMatrix Complete(const QosMatrix& train, Fn fn) {
  DenseMatrix out(train.n_users(), train.n_services());
  for (std::int32_t u = 0; u < train.n_users(); ++u) {
    for (std::int32_t s = 0; s < train.n_services(); ++s) out(u, s) = fn(u, s);
    for (const Cell& c : train.row(u)) out(u, c.index) = c.value;
  }
  return out;
}

}  // namespace

DenseMatrix PredictAllUmean(const QosMatrix& train) {
  const MeanPredictor means(train);
  return Complete(train,
                  [&](std::int32_t u, std::int32_t) { return means.UserMean(u); });
}

DenseMatrix PredictAllImean(const QosMatrix& train) {
  const MeanPredictor means(train);
  return Complete(train, [&](std::int32_t, std::int32_t s) {
    return means.ServiceMean(s);
  });
}

}  // namespace qospp
