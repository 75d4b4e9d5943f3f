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

#include "vfl/incentive.hpp"

#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace vfl {
namespace {

ClientUpdate resolved(std::string id, std::uint64_t n, Acceptance a) {
  ClientUpdate u;
  u.client_id = std::move(id);
  u.round = 2;
  u.params = ParameterVector(2);
  u.sample_count = n;
  u.accepted = a;
  return u;
}

double total(const std::vector<Transaction>& txs) {
  double s = 0.0;
  for (const auto& tx : txs) s += std::get<Reward>(tx.payload).amount;
  return s;
}

TEST(ScoreTest, Examples) {
  EXPECT_EQ(score_contribution(resolved("a", 10, Acceptance::kAccepted)).score, 10.0);
  EXPECT_EQ(score_contribution(resolved("a", 10, Acceptance::kRejected)).score, 0.0);
  EXPECT_FALSE(score_contribution(resolved("a", 10, Acceptance::kRejected)).accepted);
  EXPECT_THROW(score_contribution(resolved("a", 10, Acceptance::kPending)), InvalidArgument);
}

TEST(DistributeTest, Examples) {
  const std::vector<ContributionRecord> one{
      score_contribution(resolved("a", 7, Acceptance::kAccepted))};
  const auto full = distribute_rewards(one, RewardPolicy{100.0});
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(std::get<Reward>(full[0].payload).amount, 100.0);
  EXPECT_EQ(std::get<Reward>(full[0].payload).round, 2u);

  const std::vector<ContributionRecord> two{
      score_contribution(resolved("a", 1, Acceptance::kAccepted)),
      score_contribution(resolved("b", 3, Acceptance::kAccepted))};
  const auto split = distribute_rewards(two, RewardPolicy{100.0});
  ASSERT_EQ(split.size(), 2u);
  EXPECT_DOUBLE_EQ(std::get<Reward>(split[0].payload).amount, 25.0);
  EXPECT_DOUBLE_EQ(std::get<Reward>(split[1].payload).amount, 75.0);

  const std::vector<ContributionRecord> none{
      score_contribution(resolved("a", 1, Acceptance::kRejected)),
      score_contribution(resolved("b", 3, Acceptance::kRejected))};
  EXPECT_TRUE(distribute_rewards(none, RewardPolicy{100.0}).empty());
  EXPECT_TRUE(distribute_rewards(std::vector<ContributionRecord>{}, RewardPolicy{}).empty());
}

TEST(DistributeTest, NegativePoolIsAnError) {
  EXPECT_THROW(distribute_rewards(std::vector<ContributionRecord>{}, RewardPolicy{-1.0}),
               InvalidArgument);
}

TEST(DistributeTest, ConservationMonotonicityAndZeroForRejected) {
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<std::uint64_t> n(1, 500);
  std::uniform_int_distribution<int> k(1, 12);
  std::bernoulli_distribution acc(0.7);
  std::uniform_real_distribution<double> pool(0.0, 1000.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<ContributionRecord> recs;
    const int count = k(gen);
    for (int i = 0; i < count; ++i) {
      recs.push_back(score_contribution(resolved("c" + std::to_string(i), n(gen),
                                                 acc(gen) ? Acceptance::kAccepted
                                                          : Acceptance::kRejected)));
    }
    const RewardPolicy policy{pool(gen)};
    const auto txs = distribute_rewards(recs, policy);
    bool any = false;
    for (const auto& r : recs) any = any || r.accepted;
    if (any) {
      ASSERT_NEAR(total(txs), policy.pool_per_round, 1e-9);
    } else {
      ASSERT_TRUE(txs.empty());
    }
    for (const auto& tx : txs) {
      const auto& rw = std::get<Reward>(tx.payload);
      for (const auto& r : recs) {
        if (r.client_id == rw.client_id) {
          ASSERT_TRUE(r.accepted);
        }
      }
    }

    // Raising one accepted client's count never lowers its reward.
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (!recs[i].accepted) continue;
      auto bumped = recs;
      bumped[i].sample_count += 10;
      bumped[i].score += 10.0;
      auto reward_of = [&](const std::vector<Transaction>& ts) {
        for (const auto& tx : ts) {
          const auto& rw = std::get<Reward>(tx.payload);
          if (rw.client_id == recs[i].client_id) return rw.amount;
        }
        return 0.0;
      };
      ASSERT_GE(reward_of(distribute_rewards(bumped, policy)), reward_of(txs) - 1e-12);
      break;
    }
  }
}

}  // namespace
}  // namespace vfl
