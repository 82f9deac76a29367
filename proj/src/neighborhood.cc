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

#include "qospp/neighborhood.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qospp {
namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

enum class Measure { kPcc, kApprox, kCosine };

// Sums over the overlap of two lines (rows or columns), x from the first
// line and y from the second, visited in ascending index order.
struct Overlap {
  double dot = 0.0;
  double xx = 0.0;
  double yy = 0.0;
  std::int32_t count = 0;

  void Add(double x, double y) {
    dot += x * y;
    xx += x * x;
    yy += y * y;
    ++count;
  }
};

double Finish(const Overlap& o, Measure measure, std::size_t size_a,
              std::size_t size_b) {
  double sim = kUndefined;
  switch (measure) {
    case Measure::kPcc:
      if (o.count >= 2 && o.xx > 0.0 && o.yy > 0.0) {
        sim = o.dot / (std::sqrt(o.xx) * std::sqrt(o.yy));
      }
      break;
    case Measure::kApprox:
      if (o.count >= 1) {
        sim = o.dot / std::sqrt(static_cast<double>(size_a) *
                                static_cast<double>(size_b));
      }
      break;
    case Measure::kCosine:
      if (o.count >= 1 && o.xx > 0.0 && o.yy > 0.0) {
        sim = o.dot / (std::sqrt(o.xx) * std::sqrt(o.yy));
      }
      break;
  }
  return std::isnan(sim) ? sim : std::clamp(sim, -1.0, 1.0);
}

double LineMean(std::span<const Cell> line) {
  if (line.empty()) return 0.0;
  double sum = 0.0;
  for (const Cell& c : line) sum += c.value;
  return sum / static_cast<double>(line.size());
}

std::span<const Cell> Line(const SparseMatrix& m, SimilarityAxis axis,
                           std::int32_t a) {
  return axis == SimilarityAxis::kUsers ? m.row(a) : m.column(a);
}

std::int32_t LineCount(const SparseMatrix& m, SimilarityAxis axis) {
  return axis == SimilarityAxis::kUsers ? m.n_users() : m.n_services();
}

std::int32_t CrossCount(const SparseMatrix& m, SimilarityAxis axis) {
  return axis == SimilarityAxis::kUsers ? m.n_services() : m.n_users();
}

// Pairwise similarity by a two-pointer merge.
std::optional<double> PairSimilarity(const SparseMatrix& m,
                                     SimilarityAxis axis, Measure measure,
                                     std::int32_t a, std::int32_t b) {
  auto la = Line(m, axis, a);
  auto lb = Line(m, axis, b);
  const bool centered = measure == Measure::kPcc;
  const double mean_a = centered ? LineMean(la) : 0.0;
  const double mean_b = centered ? LineMean(lb) : 0.0;
  Overlap o;
  std::size_t i = 0, j = 0;
  while (i < la.size() && j < lb.size()) {
    if (la[i].index < lb[j].index) {
      ++i;
    } else if (lb[j].index < la[i].index) {
      ++j;
    } else {
      o.Add(la[i].value - mean_a, lb[j].value - mean_b);
      ++i;
      ++j;
    }
  }
  const double sim = Finish(o, measure, la.size(), lb.size());
  if (std::isnan(sim)) return std::nullopt;
  return sim;
}

// Similarities of one line against every line on the same axis, using a
// dense scatter of the target line. Produces bitwise the same values as
// PairSimilarity, so tables built from it are exactly symmetric.
class SimilarityRows {
 public:
  SimilarityRows(const SparseMatrix& m, SimilarityAxis axis, Measure measure)
      : m_(m),
        axis_(axis),
        measure_(measure),
        scatter_(static_cast<std::size_t>(CrossCount(m, axis)), kUndefined) {
    const std::int32_t count = LineCount(m, axis);
    means_.assign(static_cast<std::size_t>(count), 0.0);
    if (measure == Measure::kPcc) {
      for (std::int32_t a = 0; a < count; ++a) {
        means_[a] = LineMean(Line(m, axis, a));
      }
    }
  }

  void Compute(std::int32_t a, std::vector<double>& sims,
               std::vector<std::int32_t>* support) {
    const std::int32_t count = LineCount(m_, axis_);
    sims.assign(static_cast<std::size_t>(count), kUndefined);
    if (support) support->assign(static_cast<std::size_t>(count), 0);
    auto la = Line(m_, axis_, a);
    for (const Cell& c : la) scatter_[c.index] = c.value - means_[a];
    for (std::int32_t b = 0; b < count; ++b) {
      auto lb = Line(m_, axis_, b);
      if (b == a) {
        if (!la.empty()) sims[b] = 1.0;
        if (support) (*support)[b] = static_cast<std::int32_t>(la.size());
        continue;
      }
      Overlap o;
      const double mean_b = means_[b];
      for (const Cell& c : lb) {
        const double x = scatter_[c.index];
        if (!std::isnan(x)) o.Add(x, c.value - mean_b);
      }
      sims[b] = Finish(o, measure_, la.size(), lb.size());
      if (support) (*support)[b] = o.count;
    }
    for (const Cell& c : la) scatter_[c.index] = kUndefined;
  }

 private:
  const SparseMatrix& m_;
  SimilarityAxis axis_;
  Measure measure_;
  std::vector<double> means_;
  std::vector<double> scatter_;
};

SimilarityTable BuildTable(const SparseMatrix& m, SimilarityAxis axis,
                           Measure measure) {
  const std::int32_t count = LineCount(m, axis);
  SimilarityTable table(axis, count);
  SimilarityRows rows(m, axis, measure);
  std::vector<double> sims;
  std::vector<std::int32_t> support;
  for (std::int32_t a = 0; a < count; ++a) {
    rows.Compute(a, sims, &support);
    for (std::int32_t b = a; b < count; ++b) {
      std::optional<double> sim;
      if (!std::isnan(sims[b])) sim = sims[b];
      table.Set(a, b, sim, support[b]);
    }
  }
  return table;
}

bool Ranks(const Neighbor& x, const Neighbor& y) {
  return x.similarity != y.similarity ? x.similarity > y.similarity
                                      : x.index < y.index;
}

// All strictly positive, defined entries except `self`, best first.
std::vector<Neighbor> RankPositive(std::span<const double> sims,
                                   std::int32_t self) {
  std::vector<Neighbor> out;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    const auto idx = static_cast<std::int32_t>(i);
    if (idx != self && sims[i] > 0.0) out.push_back({idx, sims[i]});
  }
  std::sort(out.begin(), out.end(), Ranks);
  return out;
}

DenseMatrix ObservedDense(const SparseMatrix& data) {
  DenseMatrix known(data.n_users(), data.n_services(), kUndefined);
  for (std::int32_t u = 0; u < data.n_users(); ++u) {
    for (const Cell& c : data.row(u)) known(u, c.index) = c.value;
  }
  return known;
}

// Shared driver for both hybrid predictors. With `offsets` set, neighbor
// values are centered by their own means and predictions re-add the target's
// mean (raw UIPCC); otherwise plain weighted averages are used (P-UIPCC).
template <typename Fallback>
DenseMatrix PredictAllHybrid(const SparseMatrix& data,
                             const NeighborConfig& cfg, Measure user_measure,
                             Measure service_measure, bool offsets,
                             Fallback fallback) {
  cfg.Validate();
  const std::int32_t n = data.n_users();
  const std::int32_t m = data.n_services();
  const DenseMatrix known = ObservedDense(data);
  DenseMatrix out = known;

  std::vector<double> user_mean(n, 0.0);
  std::vector<double> service_mean(m, 0.0);
  if (offsets) {
    for (std::int32_t u = 0; u < n; ++u) user_mean[u] = LineMean(data.row(u));
    for (std::int32_t s = 0; s < m; ++s) {
      service_mean[s] = LineMean(data.column(s));
    }
  }

  std::vector<std::vector<Neighbor>> user_rank(n);
  {
    SimilarityRows rows(data, SimilarityAxis::kUsers, user_measure);
    std::vector<double> sims;
    for (std::int32_t u = 0; u < n; ++u) {
      rows.Compute(u, sims, nullptr);
      user_rank[u] = RankPositive(sims, u);
    }
  }

  SimilarityRows service_rows(data, SimilarityAxis::kServices,
                              service_measure);
  std::vector<double> sims;
  for (std::int32_t s = 0; s < m; ++s) {
    if (static_cast<std::int32_t>(data.column(s).size()) == n) continue;
    service_rows.Compute(s, sims, nullptr);
    const std::vector<Neighbor> service_rank = RankPositive(sims, s);
    for (std::int32_t u = 0; u < n; ++u) {
      if (!std::isnan(known(u, s))) continue;

      std::optional<double> by_user;
      {
        double num = 0.0, den = 0.0;
        std::int32_t used = 0;
        for (const Neighbor& nb : user_rank[u]) {
          if (used == cfg.k) break;
          const double x = known(nb.index, s);
          if (std::isnan(x)) continue;
          num += nb.similarity * (offsets ? x - user_mean[nb.index] : x);
          den += nb.similarity;
          ++used;
        }
        if (den > 0.0) by_user = (offsets ? user_mean[u] : 0.0) + num / den;
      }

      std::optional<double> by_service;
      {
        double num = 0.0, den = 0.0;
        std::int32_t used = 0;
        for (const Neighbor& nb : service_rank) {
          if (used == cfg.k) break;
          const double x = known(u, nb.index);
          if (std::isnan(x)) continue;
          num += nb.similarity * (offsets ? x - service_mean[nb.index] : x);
          den += nb.similarity;
          ++used;
        }
        if (den > 0.0) {
          by_service = (offsets ? service_mean[s] : 0.0) + num / den;
        }
      }

      out(u, s) = fallback(by_user, by_service, u, s);
    }
  }
  return out;
}

}  // namespace

void NeighborConfig::Validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ConfigError("lambda must be in [0, 1]");
  }
}

std::optional<double> PccUserSimilarity(const QosMatrix& data, std::int32_t u,
                                        std::int32_t v) {
  return PairSimilarity(data, SimilarityAxis::kUsers, Measure::kPcc, u, v);
}

std::optional<double> PccServiceSimilarity(const QosMatrix& data,
                                           std::int32_t s, std::int32_t g) {
  return PairSimilarity(data, SimilarityAxis::kServices, Measure::kPcc, s, g);
}

std::optional<double> ApproxUserSimilarity(const ObfuscatedMatrix& data,
                                           std::int32_t u, std::int32_t v) {
  return PairSimilarity(data, SimilarityAxis::kUsers, Measure::kApprox, u, v);
}

std::optional<double> CosineServiceSimilarity(const ObfuscatedMatrix& data,
                                              std::int32_t s, std::int32_t g) {
  return PairSimilarity(data, SimilarityAxis::kServices, Measure::kCosine, s,
                        g);
}

SimilarityTable::SimilarityTable(SimilarityAxis axis, std::int32_t size)
    : axis_(axis),
      size_(size),
      sims_(static_cast<std::size_t>(size) * size, kUndefined),
      support_(static_cast<std::size_t>(size) * size, 0) {}

std::optional<double> SimilarityTable::at(std::int32_t a,
                                          std::int32_t b) const {
  const double v = sims_.at(Offset(a, b));
  if (std::isnan(v)) return std::nullopt;
  return v;
}

std::int32_t SimilarityTable::support(std::int32_t a, std::int32_t b) const {
  return support_.at(Offset(a, b));
}

std::span<const double> SimilarityTable::row(std::int32_t a) const {
  if (a < 0 || a >= size_) throw std::out_of_range("similarity row");
  return {sims_.data() + Offset(a, 0), static_cast<std::size_t>(size_)};
}

void SimilarityTable::Set(std::int32_t a, std::int32_t b,
                          std::optional<double> sim, std::int32_t support) {
  const double v = sim ? std::clamp(*sim, -1.0, 1.0) : kUndefined;
  sims_.at(Offset(a, b)) = v;
  sims_.at(Offset(b, a)) = v;
  support_.at(Offset(a, b)) = support;
  support_.at(Offset(b, a)) = support;
}

SimilarityTable BuildUserPccTable(const QosMatrix& data) {
  return BuildTable(data, SimilarityAxis::kUsers, Measure::kPcc);
}

SimilarityTable BuildServicePccTable(const QosMatrix& data) {
  return BuildTable(data, SimilarityAxis::kServices, Measure::kPcc);
}

SimilarityTable BuildUserApproxTable(const ObfuscatedMatrix& data) {
  return BuildTable(data, SimilarityAxis::kUsers, Measure::kApprox);
}

SimilarityTable BuildServiceCosineTable(const ObfuscatedMatrix& data) {
  return BuildTable(data, SimilarityAxis::kServices, Measure::kCosine);
}

std::vector<Neighbor> TopKNeighbors(
    std::span<const double> similarities, std::int32_t k,
    const std::function<bool(std::int32_t)>& eligible) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<Neighbor> out;
  for (const Neighbor& nb : RankPositive(similarities, -1)) {
    if (static_cast<std::int32_t>(out.size()) == k) break;
    if (!eligible || eligible(nb.index)) out.push_back(nb);
  }
  return out;
}

std::optional<double> PredictUserBased(const SparseMatrix& data,
                                       std::int32_t /*u*/, std::int32_t s,
                                       std::span<const Neighbor> neighbors) {
  double num = 0.0, den = 0.0;
  for (const Neighbor& nb : neighbors) {
    const auto x = data.at(nb.index, s);
    if (!x) continue;
    num += nb.similarity * *x;
    den += nb.similarity;
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

std::optional<double> PredictServiceBased(const SparseMatrix& data,
                                          std::int32_t u, std::int32_t /*s*/,
                                          std::span<const Neighbor> neighbors) {
  double num = 0.0, den = 0.0;
  for (const Neighbor& nb : neighbors) {
    const auto x = data.at(u, nb.index);
    if (!x) continue;
    num += nb.similarity * *x;
    den += nb.similarity;
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

double Combine(std::optional<double> user_based,
               std::optional<double> service_based, double lambda) {
  if (user_based && service_based) {
    return lambda * *user_based + (1.0 - lambda) * *service_based;
  }
  if (user_based) return *user_based;
  if (service_based) return *service_based;
  return 0.0;
}

DenseMatrix PredictAllPuipcc(const ObfuscatedMatrix& data,
                             const NeighborConfig& cfg) {
  return PredictAllHybrid(
      data, cfg, Measure::kApprox, Measure::kCosine, /*offsets=*/false,
      [&](std::optional<double> by_user, std::optional<double> by_service,
          std::int32_t, std::int32_t) {
        return Combine(by_user, by_service, cfg.lambda);
      });
}

DenseMatrix PredictAllUipcc(const QosMatrix& data, const NeighborConfig& cfg) {
  std::vector<double> user_mean(data.n_users(), kUndefined);
  std::vector<double> service_mean(data.n_services(), kUndefined);
  double total = 0.0;
  for (std::int32_t u = 0; u < data.n_users(); ++u) {
    auto row = data.row(u);
    if (!row.empty()) user_mean[u] = LineMean(row);
    for (const Cell& c : row) total += c.value;
  }
  for (std::int32_t s = 0; s < data.n_services(); ++s) {
    auto col = data.column(s);
    if (!col.empty()) service_mean[s] = LineMean(col);
  }
  const double global_mean =
      data.empty() ? 0.0 : total / static_cast<double>(data.nnz());

  return PredictAllHybrid(
      data, cfg, Measure::kPcc, Measure::kPcc, /*offsets=*/true,
      [&](std::optional<double> by_user, std::optional<double> by_service,
          std::int32_t u, std::int32_t s) {
        double pred = 0.0;
        if (by_user || by_service) {
          pred = Combine(by_user, by_service, cfg.lambda);
        } else if (!std::isnan(user_mean[u])) {
          pred = user_mean[u];
        } else if (!std::isnan(service_mean[s])) {
          pred = service_mean[s];
        } else {
          pred = global_mean;
        }
        return std::max(0.0, pred);
      });
}

}  // namespace qospp
