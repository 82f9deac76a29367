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

#include "qospp/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qospp/seeding.h"

namespace qospp {
namespace {

bool IsObserved(double value, double sentinel) {
  return value > 0.0 && value != sentinel;
}

std::string LineError(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

// Splits on whitespace and parses each token as a double.
std::vector<double> ParseNumbers(std::string_view line, std::size_t line_no) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && IsSpace(line[i])) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !IsSpace(line[j])) ++j;
    double value = 0.0;
    const char* first = line.data() + i;
    const char* last = line.data() + j;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw DataError(LineError(
          line_no, "non-numeric token '" + std::string(line.substr(i, j - i)) +
                       "'"));
    }
    out.push_back(value);
    i = j;
  }
  return out;
}

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::int32_t ParseIndex(double v, std::size_t line_no, const char* axis) {
  if (v < 0.0) {
    throw DataError(LineError(line_no, std::string("negative ") + axis +
                                           " index"));
  }
  if (v != std::floor(v) || v > std::numeric_limits<std::int32_t>::max() - 1) {
    throw DataError(LineError(line_no, std::string("invalid ") + axis +
                                           " index"));
  }
  return static_cast<std::int32_t>(v);
}

}  // namespace

QosMatrix ParseDenseMatrix(std::istream& in, double missing_sentinel) {
  std::vector<Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  std::int32_t n_rows = 0;
  std::int32_t n_cols = -1;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<double> values = ParseNumbers(line, line_no);
    if (values.empty()) continue;
    if (n_cols < 0) {
      n_cols = static_cast<std::int32_t>(values.size());
    } else if (static_cast<std::int32_t>(values.size()) != n_cols) {
      throw DataError(LineError(
          line_no, "ragged row: expected " + std::to_string(n_cols) +
                       " columns, found " + std::to_string(values.size())));
    }
    for (std::int32_t s = 0; s < n_cols; ++s) {
      if (!std::isfinite(values[s])) {
        throw DataError(LineError(line_no, "non-finite value"));
      }
      if (IsObserved(values[s], missing_sentinel)) {
        entries.push_back({n_rows, s, values[s]});
      }
    }
    ++n_rows;
  }
  if (in.bad()) throw DataError("read error");
  return QosMatrix(n_rows, std::max(n_cols, 0), std::move(entries));
}

QosMatrix LoadDenseMatrix(const std::filesystem::path& path,
                          double missing_sentinel) {
  std::ifstream in = OpenOrThrow(path);
  try {
    return ParseDenseMatrix(in, missing_sentinel);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

QosMatrix ParseTriples(std::istream& in) {
  std::map<std::pair<std::int32_t, std::int32_t>, double> cells;
  std::int64_t max_user = -1;
  std::int64_t max_service = -1;
  std::int64_t shape_users = -1;
  std::int64_t shape_services = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    if (line[start] == '#') {
      std::istringstream header(line.substr(start + 1));
      std::string key;
      if (header >> key && key == "shape") {
        if (!(header >> shape_users >> shape_services) || shape_users < 0 ||
            shape_services < 0) {
          throw DataError(LineError(line_no, "malformed shape header"));
        }
      }
      continue;
    }
    std::vector<double> values = ParseNumbers(line, line_no);
    if (values.size() != 3) {
      throw DataError(LineError(line_no, "expected 'user service value'"));
    }
    const std::int32_t u = ParseIndex(values[0], line_no, "user");
    const std::int32_t s = ParseIndex(values[1], line_no, "service");
    const double v = values[2];
    if (!std::isfinite(v)) throw DataError(LineError(line_no, "non-finite value"));
    max_user = std::max<std::int64_t>(max_user, u);
    max_service = std::max<std::int64_t>(max_service, s);
    auto [it, inserted] = cells.emplace(std::pair{u, s}, v);
    if (!inserted && it->second != v) {
      throw DataError(LineError(line_no, "conflicting duplicate for cell (" +
                                             std::to_string(u) + ", " +
                                             std::to_string(s) + ")"));
    }
  }
  if (in.bad()) throw DataError("read error");

  std::int64_t n = max_user + 1;
  std::int64_t m = max_service + 1;
  if (shape_users >= 0) {
    if (shape_users < n || shape_services < m) {
      throw DataError("shape header smaller than the largest index");
    }
    n = shape_users;
    m = shape_services;
  }
  std::vector<Entry> entries;
  for (const auto& [key, v] : cells) {
    if (IsObserved(v, kWsDreamSentinel)) {
      entries.push_back({key.first, key.second, v});
    }
  }
  return QosMatrix(static_cast<std::int32_t>(n), static_cast<std::int32_t>(m),
                   std::move(entries));
}

QosMatrix LoadTriples(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  try {
    return ParseTriples(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void WriteTriples(const SparseMatrix& m, std::ostream& out) {
  out << "# shape " << m.n_users() << ' ' << m.n_services() << '\n';
  char buf[64];
  for (std::int32_t u = 0; u < m.n_users(); ++u) {
    for (const Cell& c : m.row(u)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), c.value);
      out << u << ' ' << c.index << ' ' << std::string_view(buf, ptr - buf)
          << '\n';
    }
  }
}

DatasetStats ComputeStats(const QosMatrix& m) {
  if (m.empty()) throw DataError("statistics of an empty matrix");
  DatasetStats st;
  st.n_users = m.n_users();
  st.n_services = m.n_services();
  st.n_entries = m.nnz();
  st.min = std::numeric_limits<double>::infinity();
  st.max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (std::int32_t u = 0; u < m.n_users(); ++u) {
    for (const Cell& c : m.row(u)) {
      sum += c.value;
      st.min = std::min(st.min, c.value);
      st.max = std::max(st.max, c.value);
    }
  }
  st.mean = sum / static_cast<double>(st.n_entries);
  double sq = 0.0;
  for (std::int32_t u = 0; u < m.n_users(); ++u) {
    for (const Cell& c : m.row(u)) sq += (c.value - st.mean) * (c.value - st.mean);
  }
  st.std = std::sqrt(sq / static_cast<double>(st.n_entries));
  // Rounding can push a constant matrix's mean a hair outside [min, max].
  st.mean = std::clamp(st.mean, st.min, st.max);
  return st;
}

void SplitConfig::Validate() const {
  if (!(density > 0.0 && density <= 1.0)) {
    throw ConfigError("density must be in (0, 1], got " +
                      std::to_string(density));
  }
}

Split SplitByDensity(const QosMatrix& m, const SplitConfig& cfg) {
  cfg.Validate();
  const std::size_t total = m.nnz();
  const auto n_train = static_cast<std::size_t>(
      std::floor(cfg.density * static_cast<double>(total) + 0.5));
  if (n_train == 0) {
    throw DataError("density " + std::to_string(cfg.density) +
                    " leaves no training entries");
  }
  std::vector<std::size_t> all(total);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(n_train);
  Rng rng(DeriveSeed({cfg.seed}));
  std::sample(all.begin(), all.end(), std::back_inserter(picked), n_train, rng);

  std::vector<Entry> entries = m.entries();
  std::vector<bool> in_train(total, false);
  for (std::size_t i : picked) in_train[i] = true;
  std::vector<Entry> train;
  std::vector<Entry> test;
  train.reserve(n_train);
  test.reserve(total - n_train);
  for (std::size_t i = 0; i < total; ++i) {
    (in_train[i] ? train : test).push_back(entries[i]);
  }
  return {QosMatrix(m.n_users(), m.n_services(), std::move(train)),
          QosMatrix(m.n_users(), m.n_services(), std::move(test))};
}

SyntheticData SynthLowRank(const SynthConfig& cfg) {
  if (cfg.rank < 1) throw ConfigError("rank must be >= 1");
  if (cfg.n_users < 1 || cfg.n_services < 1) {
    throw ConfigError("synthetic matrix needs at least one user and service");
  }
  if (!(cfg.density > 0.0 && cfg.density <= 1.0)) {
    throw ConfigError("density must be in (0, 1]");
  }
  if (!(cfg.bias_scale >= 0.0)) throw ConfigError("bias_scale must be >= 0");

  Rng rng(DeriveSeed({cfg.seed, 0x73796e74}));
  std::normal_distribution<double> normal(0.0, 1.0);
  FactorModel truth(cfg.n_users, cfg.n_services, cfg.rank);
  for (double& x : truth.user_factors) x = normal(rng);
  for (double& x : truth.service_factors) x = normal(rng);
  for (double& b : truth.service_bias) b = cfg.bias_scale * normal(rng);

  double lowest = std::numeric_limits<double>::infinity();
  for (std::int32_t u = 0; u < cfg.n_users; ++u) {
    for (std::int32_t s = 0; s < cfg.n_services; ++s) {
      lowest = std::min(lowest, PredictPpmf(truth, u, s));
    }
  }
  const double shift = 1.0 - lowest;
  for (double& b : truth.service_bias) b += shift;

  const std::size_t cells =
      static_cast<std::size_t>(cfg.n_users) * cfg.n_services;
  const auto keep = static_cast<std::size_t>(
      std::floor(cfg.density * static_cast<double>(cells) + 0.5));
  if (keep == 0) throw ConfigError("density leaves no synthetic entries");
  std::vector<std::size_t> all(cells);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> picked;
  picked.reserve(keep);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), keep, rng);

  std::vector<Entry> entries;
  entries.reserve(keep);
  for (std::size_t idx : picked) {
    const auto u = static_cast<std::int32_t>(idx / cfg.n_services);
    const auto s = static_cast<std::int32_t>(idx % cfg.n_services);
    double v = PredictPpmf(truth, u, s);
    // Rounding in the shift can land a hair below 1; keep strictly positive.
    if (!(v > 0.0)) throw DataError("synthetic value not positive");
    entries.push_back({u, s, v});
  }
  return {QosMatrix(cfg.n_users, cfg.n_services, std::move(entries)),
          std::move(truth)};
}

}  // namespace qospp
