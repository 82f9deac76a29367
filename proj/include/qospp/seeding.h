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

#ifndef QOSPP_SEEDING_H_
#define QOSPP_SEEDING_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace qospp {

using Rng = std::mt19937_64;

// Mixes a list of 64-bit words into one seed (splitmix64 chaining). Used to
// derive independent, order-insensitive substreams such as one per user or
// one per (density, round) experiment cell.
std::uint64_t DeriveSeed(std::initializer_list<std::uint64_t> words);

// Bit pattern of a double, so real-valued keys (density, alpha) can feed
// DeriveSeed.
std::uint64_t SeedWord(double value);

}  // namespace qospp

#endif  // QOSPP_SEEDING_H_
