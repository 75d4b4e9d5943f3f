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

#include "vfl/fl_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace vfl {
namespace {

LocalDataset make_dataset(std::size_t features, std::vector<std::vector<double>> rows,
                          std::vector<std::uint32_t> labels, ClientId id = "c") {
  LocalDataset d;
  d.client_id = std::move(id);
  d.features = features;
  for (const auto& r : rows) d.x.insert(d.x.end(), r.begin(), r.end());
  d.labels = std::move(labels);
  return d;
}

LocalDataset random_dataset(std::mt19937_64& gen, std::size_t n, std::size_t features,
                            std::size_t classes, ClientId id = "c") {
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<std::uint32_t> label(0, static_cast<std::uint32_t>(classes) - 1);
  LocalDataset d;
  d.client_id = std::move(id);
  d.features = features;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < features; ++j) d.x.push_back(normal(gen));
    d.labels.push_back(label(gen));
  }
  return d;
}

ParameterVector random_params(std::mt19937_64& gen, std::size_t dim, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  ParameterVector p(dim);
  for (double& v : p) v = normal(gen);
  return p;
}

// Independent reference: full-batch gradient descent on softmax cross-entropy
// with the same class-major layout.
double reference_loss(const std::vector<double>& w, const LocalDataset& d, std::size_t classes) {
  const std::size_t f = d.features;
  double total = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::vector<double> z(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      z[c] = w[c * (f + 1) + f];
      for (std::size_t j = 0; j < f; ++j) z[c] += w[c * (f + 1) + j] * d.x[i * f + j];
    }
    double m = *std::max_element(z.begin(), z.end()), s = 0.0;
    for (double v : z) s += std::exp(v - m);
    total += m + std::log(s) - z[d.labels[i]];
  }
  return total / static_cast<double>(d.size());
}

std::vector<double> reference_gd_step(std::vector<double> w, const LocalDataset& d,
                                      std::size_t classes, double lr) {
  const std::size_t f = d.features;
  std::vector<double> g(w.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    std::vector<double> z(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      z[c] = w[c * (f + 1) + f];
      for (std::size_t j = 0; j < f; ++j) z[c] += w[c * (f + 1) + j] * d.x[i * f + j];
    }
    double m = *std::max_element(z.begin(), z.end()), s = 0.0;
    for (double& v : z) s += (v = std::exp(v - m));
    for (std::size_t c = 0; c < classes; ++c) {
      const double r = z[c] / s - (c == d.labels[i] ? 1.0 : 0.0);
      for (std::size_t j = 0; j < f; ++j) g[c * (f + 1) + j] += r * d.x[i * f + j];
      g[c * (f + 1) + f] += r;
    }
  }
  for (std::size_t p = 0; p < w.size(); ++p) w[p] -= lr * g[p] / static_cast<double>(d.size());
  return w;
}

ClientUpdate update(std::uint64_t n, ParameterVector p, ClientId id = "c") {
  return ClientUpdate{std::move(id), 0, std::move(p), n, std::nullopt, Acceptance::kPending};
}

TEST(LocalTrainTest, ZeroEpochsIsIdentity) {
  const auto d = make_dataset(1, {{1.0}, {-2.0}}, {0, 1});
  const ParameterVector w{0.3, -0.1, 0.7, 0.2};
  EXPECT_EQ(local_train(w, d, TrainingConfig{0, 4, 0.5, 9}), w);
}

TEST(LocalTrainTest, SingleSampleStepIncreasesTargetProbability) {
  const auto d = make_dataset(1, {{1.0}}, {0});
  const ParameterVector w0(4);
  const ParameterVector w1 = local_train(w0, d, TrainingConfig{1, 1, 1.0, 0});
  // Class-0 score rises and class-1 score falls.
  EXPECT_GT(w1[0] + w1[1], 0.0);
  EXPECT_LT(w1[2] + w1[3], 0.0);
  EXPECT_LT(client_loss(w1, d), client_loss(w0, d));
  EXPECT_NEAR(client_loss(w0, d), std::log(2.0), 1e-15);
}

TEST(LocalTrainTest, TwoPointSeparableMatchesReferenceGradientDescent) {
  const auto d = make_dataset(1, {{1.0}, {-1.0}}, {0, 1});
  std::vector<double> ref(4, 0.0);
  ParameterVector w(4);
  for (int epoch = 0; epoch < 50; ++epoch) {
    ref = reference_gd_step(ref, d, 2, 0.5);
    w = local_train(w, d, TrainingConfig{1, 2, 0.5, static_cast<std::uint64_t>(epoch)});
    ASSERT_NEAR(client_loss(w, d), reference_loss(ref, d, 2), 1e-9) << "epoch " << epoch;
  }
  EXPECT_EQ(evaluate(w, d), 1.0);
  EXPECT_LT(client_loss(w, d), 0.1);
  // Same 50 epochs in one call.
  const ParameterVector once = local_train(ParameterVector(4), d, TrainingConfig{50, 8, 0.5, 3});
  EXPECT_NEAR(client_loss(once, d), reference_loss(ref, d, 2), 1e-9);
}

TEST(LocalTrainTest, BitDeterministicForFixedSeed) {
  std::mt19937_64 gen(5);
  const auto d = random_dataset(gen, 37, 3, 4);
  const auto w = random_params(gen, parameter_dim(3, 4));
  const TrainingConfig cfg{3, 5, 0.2, 1234};
  EXPECT_EQ(local_train(w, d, cfg), local_train(w, d, cfg));
  TrainingConfig other = cfg;
  other.seed = 1235;
  EXPECT_NE(local_train(w, d, cfg), local_train(w, d, other));
}

TEST(LocalTrainTest, RejectsBadInputs) {
  const auto d = make_dataset(2, {{1.0, 2.0}}, {0});
  EXPECT_THROW(local_train(ParameterVector(5), d, TrainingConfig{}), InvalidArgument);
  ParameterVector nan(6);
  nan[2] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(local_train(nan, d, TrainingConfig{}), InvalidArgument);
  auto bad = d;
  bad.x[0] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(local_train(ParameterVector(6), bad, TrainingConfig{}), InvalidArgument);
  EXPECT_THROW(local_train(ParameterVector(6), d, TrainingConfig{1, 1, 0.0, 0}),
               InvalidArgument);
}

TEST(ClientLossTest, ZeroWeightsGiveLogTwoForBinary) {
  const auto d = make_dataset(2, {{1.0, 5.0}, {-3.0, 0.5}, {0.0, 0.0}}, {0, 1, 1});
  EXPECT_NEAR(client_loss(ParameterVector(6), d), std::log(2.0), 1e-15);
}

TEST(ClientLossTest, LargeMarginFitIsNearZero) {
  const auto d = make_dataset(1, {{1.0}, {-1.0}}, {0, 1});
  EXPECT_LT(client_loss(ParameterVector{20.0, 0.0, -20.0, 0.0}, d), 1e-3);
}

TEST(ClientLossTest, HandComputedTwoSampleValue) {
  // Scores: sample 1 -> (2, 0) label 0, sample 2 -> (0.5, 0) label 1.
  const auto d = make_dataset(2, {{2.0, 1.0}, {0.5, -1.0}}, {0, 1});
  const double expected = (std::log1p(std::exp(-2.0)) + std::log1p(std::exp(0.5))) / 2.0;
  EXPECT_NEAR(client_loss(ParameterVector{1, 0, 0, 0, 0, 0}, d), expected, 1e-12);
  EXPECT_NEAR(expected, 0.55050249761153958, 1e-15);
}

TEST(ClientLossTest, EmptyDatasetIsAnError) {
  LocalDataset d;
  d.features = 1;
  EXPECT_THROW(client_loss(ParameterVector(4), d), InvalidArgument);
  EXPECT_THROW(evaluate(ParameterVector(4), d), InvalidArgument);
}

TEST(GlobalLossTest, SingleAndDuplicatedClients) {
  std::mt19937_64 gen(1);
  const auto d = random_dataset(gen, 9, 2, 3);
  const auto w = random_params(gen, parameter_dim(2, 3));
  const std::vector<LocalDataset> one{d};
  EXPECT_DOUBLE_EQ(global_loss(w, one), client_loss(w, d));
  const std::vector<LocalDataset> two{d, d};
  EXPECT_NEAR(global_loss(w, two), client_loss(w, d), 1e-12);
}

TEST(GlobalLossTest, WeightsByShareOfSamples) {
  std::mt19937_64 gen(2);
  const auto d1 = random_dataset(gen, 1, 2, 2, "a");
  const auto d2 = random_dataset(gen, 3, 2, 2, "b");
  const auto w = random_params(gen, parameter_dim(2, 2));
  const std::vector<LocalDataset> both{d1, d2};
  const double weighted = 0.25 * client_loss(w, d1) + 0.75 * client_loss(w, d2);
  EXPECT_NEAR(global_loss(w, both), weighted, 1e-12);
  EXPECT_NEAR(global_loss(w, both), client_loss(w, concatenate(both)), 1e-12);
}

TEST(GlobalLossTest, EqualsConcatenatedLossOnRandomInstances) {
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<int> count(1, 6), size(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<LocalDataset> ds;
    const int k = count(gen);
    for (int i = 0; i < k; ++i) ds.push_back(random_dataset(gen, size(gen), 3, 3));
    const auto w = random_params(gen, parameter_dim(3, 3), 2.0);
    ASSERT_NEAR(global_loss(w, ds), client_loss(w, concatenate(ds)), 1e-12);
  }
}

TEST(GlobalLossTest, NoDatasetsOrMismatchIsAnError) {
  EXPECT_THROW(global_loss(ParameterVector(4), std::vector<LocalDataset>{}), InvalidArgument);
  const std::vector<LocalDataset> ds{make_dataset(1, {{1.0}}, {0})};
  EXPECT_THROW(global_loss(ParameterVector(5), ds), InvalidArgument);
}

TEST(GradientTest, MatchesCentralDifferences) {
  std::mt19937_64 gen(4);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_dataset(gen, 6, 4, 2);
    const auto w = random_params(gen, parameter_dim(4, 2));
    const auto g = loss_gradient(w, d);
    for (std::size_t p = 0; p < w.size(); ++p) {
      auto plus = w, minus = w;
      plus[p] += h;
      minus[p] -= h;
      const double fd = (client_loss(plus, d) - client_loss(minus, d)) / (2 * h);
      ASSERT_LE(std::abs(fd - g[p]), 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(FedAvgTest, SingleUpdateIsUnchanged) {
  const std::vector<ClientUpdate> u{update(7, ParameterVector{1.5, -2.25, 1e-7})};
  EXPECT_EQ(fed_avg(u), u[0].params);
}

TEST(FedAvgTest, EqualWeightsIdenticalVectors) {
  const ParameterVector v{0.1, 0.2, 0.3};
  const std::vector<ClientUpdate> u{update(4, v), update(4, v)};
  EXPECT_EQ(fed_avg(u), v);
}

TEST(FedAvgTest, HandWeightedMean) {
  const std::vector<ClientUpdate> u{update(1, ParameterVector{0.0}),
                                    update(3, ParameterVector{4.0})};
  EXPECT_EQ(fed_avg(u)[0], 3.0);
}

TEST(FedAvgTest, Errors) {
  EXPECT_THROW(fed_avg(std::vector<ClientUpdate>{}), InvalidArgument);
  const std::vector<ClientUpdate> mismatch{update(1, ParameterVector(2)),
                                           update(1, ParameterVector(3))};
  EXPECT_THROW(fed_avg(mismatch), InvalidArgument);
  const std::vector<ClientUpdate> zero{update(0, ParameterVector(2))};
  EXPECT_THROW(fed_avg(zero), InvalidArgument);
}

TEST(FedAvgTest, PropertiesOnRandomInstances) {
  std::mt19937_64 gen(6);
  std::uniform_int_distribution<int> k_dist(1, 6), d_dist(1, 8);
  std::uniform_int_distribution<std::uint64_t> n_dist(1, 50);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = k_dist(gen);
    const int dim = d_dist(gen);
    std::vector<ClientUpdate> us;
    for (int i = 0; i < k; ++i) us.push_back(update(n_dist(gen), random_params(gen, dim, 3.0)));
    const auto avg = fed_avg(us);

    // Permutation invariance.
    auto shuffled = us;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const auto avg2 = fed_avg(shuffled);
    for (int i = 0; i < dim; ++i) ASSERT_NEAR(avg[i], avg2[i], 1e-12);

    // Envelope.
    for (int i = 0; i < dim; ++i) {
      double lo = us[0].params[i], hi = lo;
      for (const auto& u : us) {
        lo = std::min(lo, u.params[i]);
        hi = std::max(hi, u.params[i]);
      }
      ASSERT_GE(avg[i], lo - 1e-12);
      ASSERT_LE(avg[i], hi + 1e-12);
    }

    // Equal weights reduce to the arithmetic mean.
    auto equal = us;
    for (auto& u : equal) u.sample_count = 5;
    const auto mean = fed_avg(equal);
    for (int i = 0; i < dim; ++i) {
      double s = 0.0;
      for (const auto& u : equal) s += u.params[i];
      ASSERT_NEAR(mean[i], s / k, 1e-12);
    }
  }
}

TEST(EvaluateTest, TiesGoToLowestClass) {
  const auto d = make_dataset(2, {{1.0, 2.0}, {-1.0, 0.0}, {3.0, 3.0}}, {0, 0, 0});
  EXPECT_EQ(evaluate(ParameterVector(parameter_dim(2, 3)), d), 1.0);
}

TEST(EvaluateTest, LargeMarginSeparable) {
  const auto d = make_dataset(1, {{2.0}, {1.0}, {-1.0}, {-3.0}}, {0, 0, 1, 1});
  EXPECT_EQ(evaluate(ParameterVector{10.0, 0.0, -10.0, 0.0}, d), 1.0);
}

TEST(EvaluateTest, HandBuiltFourSamples) {
  // w = (1, 0) for class 0 and (0, 1) for class 1, no bias: predict the
  // larger coordinate. Decisions: 0, 1, 0 (tie), 1 against labels 0, 1, 1, 1.
  const auto d = make_dataset(2, {{2.0, 1.0}, {0.0, 3.0}, {1.0, 1.0}, {-1.0, 0.0}},
                              {0, 1, 1, 1});
  EXPECT_DOUBLE_EQ(evaluate(ParameterVector{1, 0, 0, 0, 1, 0}, d), 0.75);
}

TEST(EvaluateTest, LabelOutOfRangeIsAnError) {
  const auto d = make_dataset(1, {{1.0}}, {2});
  EXPECT_THROW(evaluate(ParameterVector(4), d), InvalidArgument);
}

}  // namespace
}  // namespace vfl
