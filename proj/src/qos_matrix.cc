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

#include "qospp/qos_matrix.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace qospp {

SparseMatrix::SparseMatrix(std::int32_t n_users, std::int32_t n_services,
                           std::vector<Entry> entries)
    : n_users_(n_users), n_services_(n_services) {
  if (n_users < 0 || n_services < 0) {
    throw DataError("matrix dimensions must be nonnegative");
  }
  for (const Entry& e : entries) {
    if (e.user < 0 || e.user >= n_users || e.service < 0 ||
        e.service >= n_services) {
      throw DataError("entry (" + std::to_string(e.user) + ", " +
                      std::to_string(e.service) + ") out of range");
    }
    if (!std::isfinite(e.value)) {
      throw DataError("non-finite value at (" + std::to_string(e.user) + ", " +
                      std::to_string(e.service) + ")");
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.user != b.user ? a.user < b.user : a.service < b.service;
  });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].user == entries[i - 1].user &&
        entries[i].service == entries[i - 1].service) {
      throw DataError("duplicate entry (" + std::to_string(entries[i].user) +
                      ", " + std::to_string(entries[i].service) + ")");
    }
  }

  row_ptr_.assign(static_cast<std::size_t>(n_users) + 1, 0);
  col_ptr_.assign(static_cast<std::size_t>(n_services) + 1, 0);
  row_cells_.reserve(entries.size());
  for (const Entry& e : entries) {
    ++row_ptr_[e.user + 1];
    ++col_ptr_[e.service + 1];
    row_cells_.push_back({e.service, e.value});
  }
  for (std::int32_t u = 0; u < n_users; ++u) row_ptr_[u + 1] += row_ptr_[u];
  for (std::int32_t s = 0; s < n_services; ++s) col_ptr_[s + 1] += col_ptr_[s];

  // Row-major traversal fills each column in ascending user order.
  col_cells_.resize(entries.size());
  std::vector<std::size_t> next(col_ptr_.begin(), col_ptr_.end() - 1);
  for (const Entry& e : entries) {
    col_cells_[next[e.service]++] = {e.user, e.value};
  }
}

std::span<const Cell> SparseMatrix::row(std::int32_t user) const {
  if (user < 0 || user >= n_users_) throw std::out_of_range("user index");
  return {row_cells_.data() + row_ptr_[user],
          row_ptr_[user + 1] - row_ptr_[user]};
}

std::span<const Cell> SparseMatrix::column(std::int32_t service) const {
  if (service < 0 || service >= n_services_) {
    throw std::out_of_range("service index");
  }
  return {col_cells_.data() + col_ptr_[service],
          col_ptr_[service + 1] - col_ptr_[service]};
}

std::optional<double> SparseMatrix::at(std::int32_t user,
                                       std::int32_t service) const {
  auto cells = row(user);
  auto it = std::lower_bound(
      cells.begin(), cells.end(), service,
      [](const Cell& c, std::int32_t s) { return c.index < s; });
  if (it == cells.end() || it->index != service) return std::nullopt;
  return it->value;
}

std::vector<Entry> SparseMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(nnz());
  for (std::int32_t u = 0; u < n_users_; ++u) {
    for (const Cell& c : row(u)) out.push_back({u, c.index, c.value});
  }
  return out;
}

QosMatrix::QosMatrix(std::int32_t n_users, std::int32_t n_services,
                     std::vector<Entry> entries)
    : SparseMatrix(n_users, n_services, [&] {
        for (const Entry& e : entries) {
          if (!(e.value > 0.0)) {
            throw DataError("QoS value at (" + std::to_string(e.user) + ", " +
                            std::to_string(e.service) +
                            ") must be strictly positive");
          }
        }
        return std::move(entries);
      }()) {}

}  // namespace qospp
