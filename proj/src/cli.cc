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

#include "qospp/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "qospp/dataset.h"

namespace qospp {
namespace {

struct DataFlags {
  std::string path;
  std::string format = "dense";
};

struct SweepFlags {
  DataFlags data;
  std::string qos = "rt";
  std::vector<std::string> approaches;
  std::vector<double> densities;
  std::vector<double> alphas;
  std::vector<std::string> noises;
  std::int32_t rounds = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::int32_t jobs = 1;
  bool timing = false;
  // Overrides; unset means the per-QoS default.
  std::optional<std::int32_t> k;
  std::optional<double> lambda;
  std::optional<double> uipcc_lambda;
  std::optional<double> puipcc_lambda;
  std::optional<std::int32_t> rank;
  std::optional<double> gamma;
  std::optional<double> pmf_gamma;
  std::optional<double> ppmf_gamma;
  std::optional<double> learning_rate;
  std::optional<std::int32_t> max_iters;
  std::optional<double> rel_tol;
};

QosMatrix LoadData(const DataFlags& flags) {
  if (flags.format == "triples") return LoadTriples(flags.path);
  return LoadDenseMatrix(flags.path);
}

void AddDataFlags(CLI::App* cmd, DataFlags& flags) {
  cmd->add_option("--data", flags.path, "QoS matrix file")
      ->required();
  cmd->add_option("--format", flags.format, "dense (WS-DREAM) or triples")
      ->check(CLI::IsMember({"dense", "triples"}));
}

CLI::Validator UnitInterval(bool closed_right) {
  return CLI::Validator(
      [closed_right](std::string& s) -> std::string {
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) {
          return "not a number: " + s;
        }
        const bool ok = v > 0.0 && (closed_right ? v <= 1.0 : v < 1.0);
        if (!ok) {
          return "density " + s + (closed_right ? " not in (0, 1]"
                                                : " not in (0, 1)");
        }
        return {};
      },
      closed_right ? "(0,1]" : "(0,1)");
}

const CLI::Validator kNonNegative(
    [](std::string& s) -> std::string {
      double v = 0.0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size() || !(v >= 0.0) ||
          !std::isfinite(v)) {
        return "value " + s + " must be a finite number >= 0";
      }
      return {};
    },
    ">=0");

void AddSweepFlags(CLI::App* cmd, SweepFlags& f, bool single) {
  AddDataFlags(cmd, f.data);
  cmd->add_option("--qos", f.qos, "rt or tp (selects default hyperparameters)")
      ->check(CLI::IsMember({"rt", "tp"}));
  auto* approach = cmd->add_option("--approach", f.approaches,
                                   "umean, imean, uipcc, pmf, p-uipcc, p-pmf")
                       ->delimiter(',');
  auto* density = cmd->add_option("--density", f.densities, "data density")
                      ->delimiter(',')
                      ->check(UnitInterval(false));
  auto* alpha = cmd->add_option("--alpha", f.alphas, "noise scale")
                    ->delimiter(',')
                    ->check(kNonNegative);
  auto* noise = cmd->add_option("--noise", f.noises, "uniform or gaussian")
                    ->delimiter(',')
                    ->check(CLI::IsMember({"uniform", "gaussian"}));
  if (single) {
    approach->required();
    density->required()->expected(1);
    alpha->expected(1);
    noise->expected(1);
  }
  cmd->add_option("--rounds", f.rounds, "repetitions per cell")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--out", f.out, "report CSV path");
  cmd->add_option("--jobs", f.jobs, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--timing", f.timing,
                "write wall times instead of NA in elapsed_ms");
  cmd->add_option("--k", f.k, "top-k neighbours (UIPCC, P-UIPCC)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lambda", f.lambda, "convex weight (UIPCC, P-UIPCC)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--uipcc-lambda", f.uipcc_lambda)->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--puipcc-lambda", f.puipcc_lambda)
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--d", f.rank, "latent rank (PMF, P-PMF)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", f.gamma, "regularization (PMF, P-PMF)")
      ->check(kNonNegative);
  cmd->add_option("--pmf-gamma", f.pmf_gamma)->check(kNonNegative);
  cmd->add_option("--ppmf-gamma", f.ppmf_gamma)->check(kNonNegative);
  cmd->add_option("--lr", f.learning_rate, "initial learning rate")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", f.max_iters)->check(CLI::PositiveNumber);
  cmd->add_option("--tol", f.rel_tol, "relative loss-change stop")
      ->check(kNonNegative);
}

ExperimentConfig ToExperiment(const SweepFlags& f, bool single) {
  ExperimentConfig cfg;
  cfg.qos = ParseQos(f.qos);
  cfg.hyper = Hyperparameters::Defaults(cfg.qos);
  if (f.approaches.empty()) {
    cfg.approaches = AllApproaches();
  } else {
    for (const auto& a : f.approaches) cfg.approaches.push_back(ParseApproach(a));
  }
  cfg.densities = f.densities;
  if (cfg.densities.empty() && !single) {
    cfg.densities = {0.10, 0.15, 0.20, 0.25, 0.30};
  }
  if (!f.alphas.empty()) cfg.alphas = f.alphas;
  if (!f.noises.empty()) {
    cfg.noises.clear();
    for (const auto& n : f.noises) cfg.noises.push_back(ParseNoise(n));
  }
  cfg.rounds = f.rounds;
  cfg.base_seed = f.seed;
  cfg.jobs = f.jobs;

  Hyperparameters& h = cfg.hyper;
  if (f.k) h.uipcc.k = h.puipcc.k = *f.k;
  if (f.lambda) h.uipcc.lambda = h.puipcc.lambda = *f.lambda;
  if (f.uipcc_lambda) h.uipcc.lambda = *f.uipcc_lambda;
  if (f.puipcc_lambda) h.puipcc.lambda = *f.puipcc_lambda;
  for (TrainConfig* tc : {&h.pmf, &h.ppmf}) {
    if (f.rank) tc->rank = *f.rank;
    if (f.gamma) tc->gamma = *f.gamma;
    if (f.learning_rate) tc->learning_rate = *f.learning_rate;
    if (f.max_iters) tc->max_iters = *f.max_iters;
    if (f.rel_tol) tc->rel_tol = *f.rel_tol;
  }
  if (f.pmf_gamma) h.pmf.gamma = *f.pmf_gamma;
  if (f.ppmf_gamma) h.ppmf.gamma = *f.ppmf_gamma;
  cfg.Validate();
  return cfg;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splices `key = value` lines from --config into the argument list right
// after the subcommand, skipping keys that are also given as flags.
std::vector<std::string> MergeConfig(const std::vector<std::string>& args) {
  std::string config_path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config", 1, 0);
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;

  std::ifstream in(config_path);
  if (!in) throw CLI::FileError::Missing(config_path);
  std::set<std::string> given;
  for (const auto& a : rest) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') - 2));
  }
  std::vector<std::string> from_file;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw CLI::ParseError(config_path + ":" + std::to_string(line_no) +
                                ": expected 'key = value'",
                            CLI::ExitCodes::ConfigError);
    }
    const std::string key = Trim(t.substr(0, eq));
    const std::string value = Trim(t.substr(eq + 1));
    if (key.empty() || key == "config") {
      throw CLI::ParseError(config_path + ":" + std::to_string(line_no) +
                                ": invalid key '" + key + "'",
                            CLI::ExitCodes::ConfigError);
    }
    if (!given.count(key)) from_file.push_back("--" + key + "=" + value);
  }
  if (rest.empty()) return from_file;
  std::vector<std::string> merged{rest.front()};
  merged.insert(merged.end(), from_file.begin(), from_file.end());
  merged.insert(merged.end(), rest.begin() + 1, rest.end());
  return merged;
}

void WriteFile(const std::string& path,
               const std::function<void(std::ostream&)>& write) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write(out);
  if (!out) throw DataError("write failed for " + path);
}

std::string Fixed3(double v) {
  if (!std::isfinite(v)) return "ERR";
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

int RunSweep(const SweepFlags& flags, bool single, std::ostream& out,
             std::ostream& err) {
  const ExperimentConfig cfg = ToExperiment(flags, single);
  const QosMatrix data = LoadData(flags.data);
  const EvalReport report = RunExperiment(cfg, data);
  for (const EvalRecord& r : report.records) {
    if (!r.ok()) {
      err << "error: " << ApproachName(r.approach) << " density "
          << FormatNumber(r.density) << " round " << r.round << ": "
          << r.error << '\n';
    }
  }
  if (!flags.out.empty()) {
    WriteFile(flags.out, [&](std::ostream& os) {
      WriteReportCsv(report, os, flags.timing, /*with_aggregates=*/true);
    });
  }
  out << FormatTable(report);
  return kExitOk;
}

}  // namespace

std::string FormatTable(const EvalReport& report) {
  struct Row {
    std::string label;
    std::map<double, double> values;  // density -> MAE
  };
  std::set<double> densities;
  std::vector<Row> rows;
  for (const AggregateRecord& a : report.Aggregates()) {
    densities.insert(a.density);
    std::string label(ApproachName(a.approach));
    if (a.alpha) {
      label += " (alpha=" + FormatNumber(*a.alpha) + ", " +
               std::string(NoiseName(a.noise.value_or(NoiseKind::kUniform))) +
               ")";
    }
    auto rit = std::find_if(rows.begin(), rows.end(),
                            [&](const Row& r) { return r.label == label; });
    if (rit == rows.end()) {
      rows.push_back({label, {}});
      rit = rows.end() - 1;
    }
    rit->values[a.density] = a.mean_mae;
  }

  std::size_t label_width = 8;
  for (const Row& r : rows) label_width = std::max(label_width, r.label.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(label_width)) << "approach";
  for (double d : densities) os << std::right << std::setw(10) << FormatNumber(d);
  os << '\n';
  for (const Row& r : rows) {
    os << std::left << std::setw(static_cast<int>(label_width)) << r.label;
    for (double d : densities) {
      auto it = r.values.find(d);
      os << std::right << std::setw(10)
         << (it == r.values.end() ? std::string("-") : Fixed3(it->second));
    }
    os << '\n';
  }
  return os.str();
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Privacy-preserving QoS prediction toolkit", "qospp"};
  app.require_subcommand(1);

  DataFlags stats_data;
  auto* stats = app.add_subcommand("stats", "Summary statistics of a QoS matrix");
  AddDataFlags(stats, stats_data);

  DataFlags split_data;
  double split_density = 0.1;
  std::uint64_t split_seed = 1;
  std::string train_out, test_out;
  auto* split = app.add_subcommand("split", "Seeded density split into triples");
  AddDataFlags(split, split_data);
  split->add_option("--density", split_density)->required()->check(UnitInterval(true));
  split->add_option("--seed", split_seed);
  split->add_option("--train-out", train_out)->required();
  split->add_option("--test-out", test_out)->required();

  DataFlags obf_data;
  double obf_alpha = 0.5;
  std::string obf_noise = "uniform";
  std::uint64_t obf_seed = 1;
  std::string obf_out;
  auto* obfuscate = app.add_subcommand(
      "obfuscate", "User-side obfuscation; writes obfuscated triples only");
  AddDataFlags(obfuscate, obf_data);
  obfuscate->add_option("--alpha", obf_alpha)->check(kNonNegative);
  obfuscate->add_option("--noise", obf_noise)
      ->check(CLI::IsMember({"uniform", "gaussian"}));
  obfuscate->add_option("--seed", obf_seed);
  obfuscate->add_option("--out", obf_out)->required();

  SweepFlags eval_flags;
  auto* evaluate = app.add_subcommand(
      "evaluate", "One density / alpha / noise setting, repeated rounds");
  AddSweepFlags(evaluate, eval_flags, /*single=*/true);

  SweepFlags sweep_flags;
  auto* sweep = app.add_subcommand(
      "sweep", "Grid over approaches, densities, alphas and noise kinds");
  AddSweepFlags(sweep, sweep_flags, /*single=*/false);

  try {
    std::vector<std::string> merged = MergeConfig(args);
    std::reverse(merged.begin(), merged.end());
    app.parse(merged);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*stats) {
      const DatasetStats st = ComputeStats(LoadData(stats_data));
      out << std::fixed << std::setprecision(3) << "users " << st.n_users
          << " services " << st.n_services << " entries " << st.n_entries
          << " range " << st.min << "~" << st.max << " mean " << st.mean
          << " std " << st.std << '\n';
    } else if (*split) {
      const Split parts =
          SplitByDensity(LoadData(split_data), {split_density, split_seed});
      WriteFile(train_out, [&](std::ostream& os) { WriteTriples(parts.train, os); });
      WriteFile(test_out, [&](std::ostream& os) { WriteTriples(parts.test, os); });
      out << "train " << parts.train.nnz() << " test " << parts.test.nnz()
          << '\n';
    } else if (*obfuscate) {
      const ObfuscationResult result = ObfuscateMatrix(
          LoadData(obf_data), {obf_alpha, ParseNoise(obf_noise), obf_seed});
      WriteFile(obf_out, [&](std::ostream& os) { WriteTriples(result.matrix, os); });
    } else if (*evaluate) {
      return RunSweep(eval_flags, /*single=*/true, out, err);
    } else if (*sweep) {
      return RunSweep(sweep_flags, /*single=*/false, out, err);
    }
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace qospp
