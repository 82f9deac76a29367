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

#ifndef QOSPP_CLI_H_
#define QOSPP_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "qospp/evaluation.h"

namespace qospp {

// Exit codes of RunCli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Entry point of the `qospp` tool. Commands: stats, split, obfuscate,
// evaluate, sweep. `--config FILE` reads `key = value` lines (keys are long
// flag names, '#' comments); flags given on the command line win.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Approaches as rows (privacy approaches labelled with alpha and noise),
// densities as ascending columns, aggregate MAE to 3 decimals.
std::string FormatTable(const EvalReport& report);

}  // namespace qospp

#endif  // QOSPP_CLI_H_
