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

#include "qospp/factorization.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <string>

#include "qospp/seeding.h"

namespace qospp {
namespace {

constexpr int kMaxHalvings = 30;
constexpr double kGrowth = 1.05;

double Dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

double SquaredNorm(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

void CheckShape(const FactorModel& model, const SparseMatrix& data) {
  if (model.n_users != data.n_users() ||
      model.n_services != data.n_services()) {
    throw DataError("model dimensions do not match the data matrix");
  }
}

double Loss(const FactorModel& model, const SparseMatrix& data, double gamma,
            bool biased) {
  CheckShape(model, data);
  double data_term = 0.0;
  for (std::int32_t u = 0; u < data.n_users(); ++u) {
    auto uf = model.user(u);
    for (const Cell& c : data.row(u)) {
      double pred = Dot(uf, model.service(c.index));
      if (biased) pred += model.service_bias[c.index];
      const double r = c.value - pred;
      data_term += r * r;
    }
  }
  double reg = SquaredNorm(model.user_factors) +
               SquaredNorm(model.service_factors);
  if (biased) reg += SquaredNorm(model.service_bias);
  return 0.5 * data_term + 0.5 * gamma * reg;
}

FactorGradient Grad(const FactorModel& model, const SparseMatrix& data,
                    double gamma, bool biased) {
  CheckShape(model, data);
  const std::size_t d = static_cast<std::size_t>(model.rank);
  FactorGradient g;
  g.service_bias.assign(model.service_bias.size(), 0.0);
  g.user_factors.resize(model.user_factors.size());
  g.service_factors.resize(model.service_factors.size());
  for (std::size_t i = 0; i < g.user_factors.size(); ++i) {
    g.user_factors[i] = gamma * model.user_factors[i];
  }
  for (std::size_t i = 0; i < g.service_factors.size(); ++i) {
    g.service_factors[i] = gamma * model.service_factors[i];
  }
  if (biased) {
    for (std::size_t i = 0; i < g.service_bias.size(); ++i) {
      g.service_bias[i] = gamma * model.service_bias[i];
    }
  }
  for (std::int32_t u = 0; u < data.n_users(); ++u) {
    auto uf = model.user(u);
    double* gu = g.user_factors.data() + static_cast<std::size_t>(u) * d;
    for (const Cell& c : data.row(u)) {
      auto sf = model.service(c.index);
      double pred = Dot(uf, sf);
      if (biased) pred += model.service_bias[c.index];
      const double e = pred - c.value;
      if (biased) g.service_bias[c.index] += e;
      double* gs =
          g.service_factors.data() + static_cast<std::size_t>(c.index) * d;
      for (std::size_t k = 0; k < d; ++k) {
        gu[k] += e * sf[k];
        gs[k] += e * uf[k];
      }
    }
  }
  return g;
}

void Step(const FactorModel& from, const FactorGradient& g, double lr,
          FactorModel& to) {
  for (std::size_t i = 0; i < from.user_factors.size(); ++i) {
    to.user_factors[i] = from.user_factors[i] - lr * g.user_factors[i];
  }
  for (std::size_t i = 0; i < from.service_factors.size(); ++i) {
    to.service_factors[i] = from.service_factors[i] - lr * g.service_factors[i];
  }
  for (std::size_t i = 0; i < from.service_bias.size(); ++i) {
    to.service_bias[i] = from.service_bias[i] - lr * g.service_bias[i];
  }
}

TrainResult Train(const SparseMatrix& data, const TrainConfig& cfg,
                  bool biased) {
  cfg.Validate();
  if (data.empty()) throw DataError("cannot train on an empty matrix");

  TrainResult result;
  result.model = InitModel(data.n_users(), data.n_services(), cfg);
  FactorModel& model = result.model;
  FactorModel trial = model;

  double loss = Loss(model, data, cfg.gamma, biased);
  if (!std::isfinite(loss)) throw TrainingError("non-finite initial loss");
  result.loss_history.push_back(loss);

  double lr = cfg.learning_rate;
  for (std::int32_t it = 0; it < cfg.max_iters; ++it) {
    const FactorGradient g = Grad(model, data, cfg.gamma, biased);
    bool accepted = false;
    bool saw_finite = false;
    double trial_loss = loss;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      Step(model, g, lr, trial);
      trial_loss = Loss(trial, data, cfg.gamma, biased);
      if (std::isfinite(trial_loss)) saw_finite = true;
      if (trial_loss < loss) {
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) {
      if (!saw_finite) {
        throw TrainingError("objective became non-finite at iteration " +
                            std::to_string(it));
      }
      // No descent direction left at the smallest step.
      result.converged = true;
      break;
    }
    const double rel = (loss - trial_loss) / std::abs(loss);
    std::swap(model, trial);
    loss = trial_loss;
    result.loss_history.push_back(loss);
    ++result.iterations;
    lr = std::min(lr * kGrowth, cfg.learning_rate);
    if (rel < cfg.rel_tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace

FactorModel::FactorModel(std::int32_t n, std::int32_t m, std::int32_t d)
    : rank(d),
      n_users(n),
      n_services(m),
      user_factors(static_cast<std::size_t>(n) * d, 0.0),
      service_factors(static_cast<std::size_t>(m) * d, 0.0),
      service_bias(static_cast<std::size_t>(m), 0.0) {}

double FactorModel::Interaction(std::int32_t u, std::int32_t s) const {
  return Dot(user(u), service(s));
}

bool FactorModel::AllFinite() const {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](double x) { return std::isfinite(x); });
  };
  return finite(user_factors) && finite(service_factors) &&
         finite(service_bias);
}

void TrainConfig::Validate() const {
  if (rank < 1) throw ConfigError("rank d must be >= 1");
  if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(rel_tol >= 0.0)) throw ConfigError("rel_tol must be >= 0");
}

FactorModel InitModel(std::int32_t n, std::int32_t m, const TrainConfig& cfg) {
  cfg.Validate();
  FactorModel model(n, m, cfg.rank);
  Rng rng(cfg.seed);
  std::normal_distribution<double> init(0.0, 0.1);
  for (double& x : model.user_factors) x = init(rng);
  for (double& x : model.service_factors) x = init(rng);
  return model;
}

double LossPpmf(const FactorModel& model, const SparseMatrix& data,
                double gamma) {
  return Loss(model, data, gamma, /*biased=*/true);
}

FactorGradient GradPpmf(const FactorModel& model, const SparseMatrix& data,
                        double gamma) {
  return Grad(model, data, gamma, /*biased=*/true);
}

double LossPmf(const FactorModel& model, const SparseMatrix& data,
               double gamma) {
  return Loss(model, data, gamma, /*biased=*/false);
}

FactorGradient GradPmf(const FactorModel& model, const SparseMatrix& data,
                       double gamma) {
  return Grad(model, data, gamma, /*biased=*/false);
}

TrainResult TrainPpmf(const ObfuscatedMatrix& data, const TrainConfig& cfg) {
  return Train(data, cfg, /*biased=*/true);
}

TrainResult TrainPmf(const QosMatrix& data, const TrainConfig& cfg) {
  return Train(data, cfg, /*biased=*/false);
}

double PredictPpmf(const FactorModel& model, std::int32_t u, std::int32_t s) {
  if (u < 0 || u >= model.n_users || s < 0 || s >= model.n_services) {
    throw std::out_of_range("prediction index out of range");
  }
  return model.service_bias[s] + model.Interaction(u, s);
}

double PredictPmf(const FactorModel& model, std::int32_t u, std::int32_t s) {
  if (u < 0 || u >= model.n_users || s < 0 || s >= model.n_services) {
    throw std::out_of_range("prediction index out of range");
  }
  return std::max(0.0, model.Interaction(u, s));
}

void WriteModel(const FactorModel& model, std::ostream& out) {
  const auto old_precision =
      out.precision(std::numeric_limits<double>::max_digits10);
  out << model.n_users << ' ' << model.n_services << ' ' << model.rank << '\n';
  auto write_line = [&](std::span<const double> v) {
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) out << ' ';
      out << v[k];
    }
    out << '\n';
  };
  write_line(model.service_bias);
  for (std::int32_t u = 0; u < model.n_users; ++u) write_line(model.user(u));
  for (std::int32_t s = 0; s < model.n_services; ++s) {
    write_line(model.service(s));
  }
  out.precision(old_precision);
}

FactorModel ReadModel(std::istream& in) {
  std::int32_t n = 0, m = 0, d = 0;
  if (!(in >> n >> m >> d) || n < 0 || m < 0 || d < 1) {
    throw DataError("bad model header");
  }
  FactorModel model(n, m, d);
  auto read_all = [&](std::vector<double>& v, const char* what) {
    for (double& x : v) {
      if (!(in >> x)) throw DataError(std::string("truncated model ") + what);
    }
  };
  read_all(model.service_bias, "biases");
  read_all(model.user_factors, "user factors");
  read_all(model.service_factors, "service factors");
  return model;
}

}  // namespace qospp
