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
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vfl/rng.hpp"
#include "vfl/types.hpp"

namespace vfl {

// Noise multiplier of the classical Gaussian mechanism,
//   sigma = sqrt(2 ln(1.25 / delta)) / epsilon.
// The standard deviation actually added to a release of L2 sensitivity S is
// S * sigma. The bound is only proven for epsilon <= 1; larger values are
// accepted and use the same formula.
inline double calibrate_sigma(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("calibrate_sigma: epsilon must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("calibrate_sigma: delta must lie in (0, 1)");
  }
  return std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

inline double noise_stddev(const PrivacyParams& p) {
  p.validate();
  return p.clip_norm * calibrate_sigma(p.epsilon, p.delta);
}

// Projects `v` onto the L2 ball of radius `clip_norm`. Vectors already inside
// the ball are returned untouched.
inline ParameterVector clip(const ParameterVector& v, double clip_norm) {
  if (!(clip_norm > 0.0)) throw InvalidArgument("clip: clip_norm must be positive");
  if (!v.all_finite()) throw InvalidArgument("clip: non-finite input");
  const double norm = v.l2_norm();
  if (norm <= clip_norm) return v;
  // Rounding can leave the scaled norm an ulp above the radius; shrink the
  // scale until it is inside, so clipping twice changes nothing.
  double scale = clip_norm / norm;
  ParameterVector out = v;
  for (;;) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] * scale;
    if (out.l2_norm() <= clip_norm) return out;
    scale = std::nextafter(scale, 0.0);
  }
}

// v + z with z_i ~ N(0, noise_std^2) drawn from CounterRng(seed).
inline ParameterVector add_gaussian_noise(const ParameterVector& v, double noise_std,
                                          std::uint64_t seed) {
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
    throw InvalidArgument("add_gaussian_noise: noise_std must be >= 0");
  }
  if (!v.all_finite()) throw InvalidArgument("add_gaussian_noise: non-finite input");
  if (noise_std == 0.0) return v;
  CounterRng rng(seed);
  ParameterVector out = v;
  for (double& x : out) x += noise_std * rng.standard_normal();
  return out;
}

// Per-client privacy spend under basic (additive) composition.
class BudgetLedger {
 public:
  struct Spend {
    double epsilon = 0.0;
    double delta = 0.0;
  };
  struct Entry {
    std::uint64_t round = 0;
    PrivacyParams params;
  };

  void compose(const ClientId& client, const PrivacyParams& params,
               std::uint64_t round = 0) {
    params.validate();
    auto& spend = spent_[client];
    spend.epsilon += params.epsilon;
    spend.delta += params.delta;
    history_[client].push_back(Entry{round, params});
  }

  Spend spent(const ClientId& client) const {
    auto it = spent_.find(client);
    return it == spent_.end() ? Spend{} : it->second;
  }

  const std::vector<Entry>& history(const ClientId& client) const {
    static const std::vector<Entry> kEmpty;
    auto it = history_.find(client);
    return it == history_.end() ? kEmpty : it->second;
  }

  std::size_t rounds_participated(const ClientId& client) const {
    return history(client).size();
  }

  // Largest cumulative spend over all clients.
  Spend max_spent() const {
    Spend out;
    for (const auto& [id, s] : spent_) {
      if (s.epsilon > out.epsilon) out.epsilon = s.epsilon;
      if (s.delta > out.delta) out.delta = s.delta;
    }
    return out;
  }

  const std::map<ClientId, Spend>& all() const { return spent_; }

 private:
  std::map<ClientId, Spend> spent_;
  std::map<ClientId, std::vector<Entry>> history_;
};

inline BudgetLedger compose_budget(BudgetLedger ledger, const ClientId& client,
                                   const PrivacyParams& round_params,
                                   std::uint64_t round = 0) {
  ledger.compose(client, round_params, round);
  return ledger;
}

// A mechanism over finitely many databases and outcomes:
// prob[i][j] = P(M(inputs[i]) = outputs[j]).
struct FiniteMechanism {
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::vector<double>> prob;
  std::vector<std::pair<std::size_t, std::size_t>> neighbors;

  void validate() const {
    if (prob.size() != inputs.size()) {
      throw InvalidArgument("mechanism: one probability row per input required");
    }
    for (const auto& row : prob) {
      if (row.size() != outputs.size()) {
        throw InvalidArgument("mechanism: row width must equal output count");
      }
      double sum = 0.0;
      for (double p : row) {
        if (!(p >= 0.0 && p <= 1.0)) {
          throw InvalidArgument("mechanism: probability outside [0, 1]");
        }
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-12) {
        throw InvalidArgument("mechanism: probability row does not sum to 1");
      }
    }
    for (auto [a, b] : neighbors) {
      if (a >= inputs.size() || b >= inputs.size()) {
        throw InvalidArgument("mechanism: neighbor index out of range");
      }
    }
  }
};

// Worst case found by verify_dp_inequality. `slack` is
//   P(M(D1) in S) - e^eps * P(M(D2) in S) - delta
// for the reported ordered pair (first = D1, second = D2) and outcome set S;
// the inequality holds when slack <= tolerance.
struct DpWitness {
  std::size_t first = 0;
  std::size_t second = 0;
  std::vector<std::size_t> outcome_set;
  double slack = 0.0;
};

struct DpCheck {
  bool holds = true;
  DpWitness witness;
};

// Worst-case slack for one ordered pair. The maximizing outcome set is
// S* = {j : P1[j] > e^eps * P2[j]}, which dominates every other subset.
inline DpWitness dp_pair_slack(const FiniteMechanism& m, std::size_t first,
                               std::size_t second, double epsilon, double delta) {
  const double ratio = std::exp(epsilon);
  DpWitness w{first, second, {}, -delta};
  for (std::size_t j = 0; j < m.outputs.size(); ++j) {
    const double gap = m.prob[first][j] - ratio * m.prob[second][j];
    if (gap > 0.0) {
      w.outcome_set.push_back(j);
      w.slack += gap;
    }
  }
  return w;
}

inline DpCheck verify_dp_inequality(const FiniteMechanism& m, double epsilon,
                                    double delta, double tolerance = 1e-12) {
  m.validate();
  if (!(epsilon >= 0.0)) throw InvalidArgument("verify_dp: epsilon must be >= 0");
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw InvalidArgument("verify_dp: delta must lie in [0, 1]");
  }
  DpCheck result;
  bool have_witness = false;
  for (auto [a, b] : m.neighbors) {
    for (auto [d1, d2] : {std::pair{a, b}, std::pair{b, a}}) {
      DpWitness w = dp_pair_slack(m, d1, d2, epsilon, delta);
      if (!have_witness || w.slack > result.witness.slack) {
        result.witness = std::move(w);
        have_witness = true;
      }
    }
  }
  result.holds = !have_witness || result.witness.slack <= tolerance;
  return result;
}

// Binary randomized response reporting the true bit with probability
// e^eps / (1 + e^eps).
inline FiniteMechanism randomized_response(double epsilon) {
  const double truth = std::exp(epsilon) / (1.0 + std::exp(epsilon));
  FiniteMechanism m;
  m.inputs = {"0", "1"};
  m.outputs = {"report 0", "report 1"};
  m.prob = {{truth, 1.0 - truth}, {1.0 - truth, truth}};
  m.neighbors = {{0, 1}};
  return m;
}

}  // namespace vfl
