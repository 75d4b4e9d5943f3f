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

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "vfl/ledger.hpp"
#include "vfl/types.hpp"

namespace vfl {

struct ContributionRecord {
  ClientId client_id;
  std::uint64_t round = 0;
  std::uint64_t sample_count = 0;
  bool accepted = false;
  double score = 0.0;
};

struct RewardPolicy {
  double pool_per_round = 100.0;  // token units
};

// Score is the sample count of an accepted update (the same weight the
// aggregation uses) and zero for a rejected one.
inline ContributionRecord score_contribution(const ClientUpdate& u) {
  if (u.accepted == Acceptance::kPending) {
    throw InvalidArgument("score_contribution: acceptance not yet resolved");
  }
  const bool accepted = u.accepted == Acceptance::kAccepted;
  return ContributionRecord{u.client_id, u.round, u.sample_count, accepted,
                            accepted ? static_cast<double>(u.sample_count) : 0.0};
}

// Splits the pool proportionally to score. Emits nothing when every score is
// zero; clients with zero score get no transaction.
inline std::vector<Transaction> distribute_rewards(std::span<const ContributionRecord> records,
                                                   const RewardPolicy& policy) {
  if (!(policy.pool_per_round >= 0.0) || !std::isfinite(policy.pool_per_round)) {
    throw InvalidArgument("distribute_rewards: pool must be non-negative");
  }
  double total = 0.0;
  for (const auto& r : records) total += r.accepted ? r.score : 0.0;
  std::vector<Transaction> txs;
  if (total <= 0.0) return txs;
  for (const auto& r : records) {
    if (!r.accepted || r.score <= 0.0) continue;
    txs.push_back(make_tx(Reward{r.client_id, r.round, policy.pool_per_round * r.score / total}));
  }
  return txs;
}

}  // namespace vfl
