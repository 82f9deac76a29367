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

#ifndef QOSPP_QOS_MATRIX_H_
#define QOSPP_QOS_MATRIX_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qospp {

// Raised for malformed input data or violated data invariants.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for invalid configuration values.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Entry {
  std::int32_t user = 0;
  std::int32_t service = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// One stored value along a row (index = service) or a column (index = user).
struct Cell {
  std::int32_t index = 0;
  double value = 0.0;
};

// Immutable sparse n_users x n_services matrix with both row-major and
// column-major access. Rows and columns are sorted by index.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  // Throws DataError on out-of-range indices, duplicate cells or non-finite
  // values. Entries may come in any order.
  SparseMatrix(std::int32_t n_users, std::int32_t n_services,
               std::vector<Entry> entries);

  std::int32_t n_users() const { return n_users_; }
  std::int32_t n_services() const { return n_services_; }
  std::size_t nnz() const { return row_cells_.size(); }
  bool empty() const { return row_cells_.empty(); }

  std::span<const Cell> row(std::int32_t user) const;
  std::span<const Cell> column(std::int32_t service) const;

  std::optional<double> at(std::int32_t user, std::int32_t service) const;
  bool contains(std::int32_t user, std::int32_t service) const {
    return at(user, service).has_value();
  }

  // Entries in row-major order.
  std::vector<Entry> entries() const;

 private:
  std::int32_t n_users_ = 0;
  std::int32_t n_services_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Cell> row_cells_;
  std::vector<std::size_t> col_ptr_{0};
  std::vector<Cell> col_cells_;
};

// Observed QoS values. Every stored value is strictly positive.
class QosMatrix : public SparseMatrix {
 public:
  QosMatrix() = default;
  QosMatrix(std::int32_t n_users, std::int32_t n_services,
            std::vector<Entry> entries);
};

// User-submitted data after normalization and perturbation. Same support as
// the training QosMatrix it came from; values are dimensionless.
class ObfuscatedMatrix : public SparseMatrix {
 public:
  ObfuscatedMatrix() = default;
  ObfuscatedMatrix(std::int32_t n_users, std::int32_t n_services,
                   std::vector<Entry> entries)
      : SparseMatrix(n_users, n_services, std::move(entries)) {}
};

// Dense row-major matrix, used for completed prediction matrices.
struct DenseMatrix {
  std::int32_t n_rows = 0;
  std::int32_t n_cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::int32_t rows, std::int32_t cols, double fill = 0.0)
      : n_rows(rows),
        n_cols(cols),
        values(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
               fill) {}

  double& operator()(std::int32_t r, std::int32_t c) {
    return values[static_cast<std::size_t>(r) * n_cols + c];
  }
  double operator()(std::int32_t r, std::int32_t c) const {
    return values[static_cast<std::size_t>(r) * n_cols + c];
  }
};

}  // namespace qospp

#endif  // QOSPP_QOS_MATRIX_H_
