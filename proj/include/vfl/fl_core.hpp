// Copyright 2026 The vfl Authors
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
//

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "vfl/rng.hpp"
#include "vfl/types.hpp"

namespace vfl {

// A client's local samples. `x` is row-major with `features` columns.
struct LocalDataset {
  ClientId client_id;
  std::size_t features = 0;
  std::vector<double> x;
  std::vector<std::uint32_t> labels;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(x).subspan(i * features, features);
  }

  void validate() const {
    if (features == 0) throw InvalidArgument("dataset: zero features");
    if (x.size() != labels.size() * features) {
      throw InvalidArgument("dataset: feature rows do not match label count");
    }
    for (double v : x) {
      if (!std::isfinite(v)) throw InvalidArgument("dataset: non-finite feature");
    }
  }

  friend bool operator==(const LocalDataset&, const LocalDataset&) = default;
};

struct TrainingConfig {
  std::uint32_t local_epochs = 1;
  std::uint32_t batch_size = 32;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    if (batch_size == 0) throw InvalidArgument("training: batch_size must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw InvalidArgument("training: learning_rate must be positive");
    }
  }
};

// Dimensions of the multinomial logistic-regression model.
struct LinearShape {
  std::size_t features = 0;
  std::size_t classes = 0;

  std::size_t dim() const { return classes * (features + 1); }
  std::size_t weight_index(std::size_t c, std::size_t j) const {
    return c * (features + 1) + j;
  }
  std::size_t bias_index(std::size_t c) const {
    return c * (features + 1) + features;
  }
};

inline std::size_t parameter_dim(std::size_t features, std::size_t classes) {
  return LinearShape{features, classes}.dim();
}

namespace detail {

// Infers the class count from the parameter dimension and checks that every
// label addresses a class.
inline LinearShape checked_shape(const ParameterVector& params,
                                 const LocalDataset& data) {
  data.validate();
  const std::size_t stride = data.features + 1;
  if (params.empty() || params.size() % stride != 0) {
    throw InvalidArgument("dimension mismatch: " + std::to_string(params.size()) +
                          " parameters for " + std::to_string(data.features) +
                          " features");
  }
  LinearShape shape{data.features, params.size() / stride};
  if (shape.classes < 2) throw InvalidArgument("model needs at least two classes");
  for (auto label : data.labels) {
    if (label >= shape.classes) {
      throw InvalidArgument("label " + std::to_string(label) + " out of range");
    }
  }
  if (!params.all_finite()) throw InvalidArgument("non-finite parameters");
  return shape;
}

inline void class_scores(const ParameterVector& params, const LinearShape& shape,
                         std::span<const double> row, std::span<double> scores) {
  for (std::size_t c = 0; c < shape.classes; ++c) {
    double z = params[shape.bias_index(c)];
    const std::size_t base = shape.weight_index(c, 0);
    for (std::size_t j = 0; j < shape.features; ++j) {
      z += params[base + j] * row[j];
    }
    scores[c] = z;
  }
}

// Converts scores to probabilities in place; returns log-sum-exp.
inline double softmax_inplace(std::span<double> scores) {
  const double max = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - max);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return max + std::log(sum);
}

// Mean cross-entropy gradient over the rows listed in `rows`, accumulated
// into `grad` (which is overwritten).
inline void batch_gradient(const ParameterVector& params, const LinearShape& shape,
                           const LocalDataset& data,
                           std::span<const std::size_t> rows,
                           std::span<double> grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<double> probs(shape.classes);
  for (std::size_t i : rows) {
    const auto x = data.row(i);
    class_scores(params, shape, x, probs);
    softmax_inplace(probs);
    probs[data.labels[i]] -= 1.0;
    for (std::size_t c = 0; c < shape.classes; ++c) {
      const double g = probs[c];
      const std::size_t base = shape.weight_index(c, 0);
      for (std::size_t j = 0; j < shape.features; ++j) grad[base + j] += g * x[j];
      grad[shape.bias_index(c)] += g;
    }
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  for (double& g : grad) g *= inv;
}

}  // namespace detail

// Mean softmax cross-entropy of `params` over the client's samples.
inline double client_loss(const ParameterVector& params, const LocalDataset& data) {
  if (data.empty()) throw InvalidArgument("client_loss: empty dataset");
  const LinearShape shape = detail::checked_shape(params, data);
  std::vector<double> scores(shape.classes);
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    detail::class_scores(params, shape, data.row(i), scores);
    const double target = scores[data.labels[i]];
    total += detail::softmax_inplace(scores) - target;
  }
  return total / static_cast<double>(data.size());
}

// Analytic gradient of client_loss.
inline ParameterVector loss_gradient(const ParameterVector& params,
                                     const LocalDataset& data) {
  if (data.empty()) throw InvalidArgument("loss_gradient: empty dataset");
  const LinearShape shape = detail::checked_shape(params, data);
  std::vector<std::size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  ParameterVector grad(params.size());
  detail::batch_gradient(params, shape, data, rows, grad.span());
  return grad;
}

// Mini-batch SGD starting at `global_params`. Each epoch reshuffles the row
// order with the seeded generator; the final partial batch is kept.
inline ParameterVector local_train(const ParameterVector& global_params,
                                   const LocalDataset& data,
                                   const TrainingConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw InvalidArgument("local_train: empty dataset");
  const LinearShape shape = detail::checked_shape(global_params, data);

  ParameterVector params = global_params;
  ParameterVector grad(params.size());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(cfg.seed);

  for (std::uint32_t epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min<std::size_t>(cfg.batch_size, order.size() - start);
      const auto batch = std::span<const std::size_t>(order).subspan(start, len);
      detail::batch_gradient(params, shape, data, batch, grad.span());
      for (std::size_t p = 0; p < params.size(); ++p) {
        params[p] -= cfg.learning_rate * grad[p];
      }
    }
  }
  if (!params.all_finite()) {
    throw InvalidArgument("local_train: parameters diverged to non-finite values");
  }
  return params;
}

// Sample-weighted objective over all clients: sum_k (n_k / N) * F_k(w).
inline double global_loss(const ParameterVector& params,
                          std::span<const LocalDataset> datasets) {
  if (datasets.empty()) throw InvalidArgument("global_loss: no datasets");
  double total_samples = 0.0;
  for (const auto& d : datasets) total_samples += static_cast<double>(d.size());
  double loss = 0.0;
  for (const auto& d : datasets) {
    const double weight = static_cast<double>(d.size()) / total_samples;
    loss += weight * client_loss(params, d);
  }
  return loss;
}

// Sample-count-weighted mean of the updates' parameters.
inline ParameterVector fed_avg(std::span<const ClientUpdate> updates) {
  if (updates.empty()) throw InvalidArgument("fed_avg: no updates");
  const std::size_t dim = updates.front().params.size();
  double total = 0.0;
  for (const auto& u : updates) {
    if (u.params.size() != dim) throw InvalidArgument("fed_avg: dimension mismatch");
    if (u.sample_count == 0) throw InvalidArgument("fed_avg: sample_count must be >= 1");
    total += static_cast<double>(u.sample_count);
  }
  ParameterVector out(dim);
  for (const auto& u : updates) {
    const double weight = static_cast<double>(u.sample_count) / total;
    for (std::size_t i = 0; i < dim; ++i) out[i] += weight * u.params[i];
  }
  return out;
}

// Index of the highest score; ties go to the lowest class index.
inline std::size_t predict(const ParameterVector& params, const LinearShape& shape,
                           std::span<const double> row) {
  std::vector<double> scores(shape.classes);
  detail::class_scores(params, shape, row, scores);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return best;
}

inline double evaluate(const ParameterVector& params, const LocalDataset& data) {
  if (data.empty()) throw InvalidArgument("evaluate: empty dataset");
  const LinearShape shape = detail::checked_shape(params, data);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (predict(params, shape, data.row(i)) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

inline LocalDataset concatenate(std::span<const LocalDataset> datasets,
                                ClientId id = "pool") {
  LocalDataset out;
  out.client_id = std::move(id);
  if (datasets.empty()) return out;
  out.features = datasets.front().features;
  for (const auto& d : datasets) {
    if (d.features != out.features) {
      throw InvalidArgument("concatenate: feature count mismatch");
    }
    out.x.insert(out.x.end(), d.x.begin(), d.x.end());
    out.labels.insert(out.labels.end(), d.labels.begin(), d.labels.end());
  }
  return out;
}

}  // namespace vfl
