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

#include <gtest/gtest.h>

#include <cmath>

namespace qospp {
namespace {

TEST(SparseMatrixTest, RowAndColumnViewsAreSorted) {
  SparseMatrix m(3, 4, {{2, 1, 5.0}, {0, 3, 1.0}, {0, 1, 2.0}, {1, 1, 3.0}});
  ASSERT_EQ(m.nnz(), 4u);
  auto row0 = m.row(0);
  ASSERT_EQ(row0.size(), 2u);
  EXPECT_EQ(row0[0].index, 1);
  EXPECT_EQ(row0[1].index, 3);
  auto col1 = m.column(1);
  ASSERT_EQ(col1.size(), 3u);
  EXPECT_EQ(col1[0].index, 0);
  EXPECT_EQ(col1[1].index, 1);
  EXPECT_EQ(col1[2].index, 2);
  EXPECT_EQ(col1[2].value, 5.0);
  EXPECT_EQ(m.at(1, 1), 3.0);
  EXPECT_FALSE(m.at(1, 2).has_value());
  EXPECT_TRUE(m.column(0).empty());
}

TEST(SparseMatrixTest, RejectsBadEntries) {
  EXPECT_THROW(SparseMatrix(2, 2, {{2, 0, 1.0}}), DataError);
  EXPECT_THROW(SparseMatrix(2, 2, {{0, -1, 1.0}}), DataError);
  EXPECT_THROW(SparseMatrix(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}}), DataError);
  EXPECT_THROW(SparseMatrix(2, 2, {{0, 0, std::nan("")}}), DataError);
}

TEST(QosMatrixTest, RequiresStrictlyPositiveValues) {
  EXPECT_THROW(QosMatrix(1, 1, {{0, 0, 0.0}}), DataError);
  EXPECT_THROW(QosMatrix(1, 1, {{0, 0, -1.0}}), DataError);
  EXPECT_NO_THROW(QosMatrix(1, 1, {{0, 0, 1e-9}}));
}

TEST(ObfuscatedMatrixTest, AllowsNegativeValues) {
  ObfuscatedMatrix m(1, 2, {{0, 0, -1.5}, {0, 1, 0.0}});
  EXPECT_EQ(m.nnz(), 2u);
}

}  // namespace
}  // namespace qospp
