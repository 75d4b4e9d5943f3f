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

// Round protocol driver.
//
// Round t, starting at simulated time S = (t + 1) * round_period_ms:
//   1. every RSU -> vehicle model download is sent at S; a dropped download
//      leaves that vehicle out of the round;
//   2. each vehicle trains from W^t with seed_{k,t}, clips to S_f, adds
//      N(0, (S_f sigma)^2) noise and uploads at S + period / 2;
//   3. delivered updates go to the validators as ModelUpdate transactions
//      (block committed at S + period - 1);
//   4. the accepted updates are averaged into W^{t+1}, which is committed
//      together with the round's Reward transactions in a second block.
// If nothing is accepted, or either block fails the vote, W^{t+1} = W^t and
// the round is recorded as a stall.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vfl/canonical_json.hpp"
#include "vfl/config.hpp"
#include "vfl/data.hpp"
#include "vfl/fl_core.hpp"
#include "vfl/incentive.hpp"
#include "vfl/ledger.hpp"
#include "vfl/netsim.hpp"
#include "vfl/privacy.hpp"

namespace vfl {

struct RoundReport {
  std::uint64_t round = 0;  // number of completed rounds; 0 is the initial state
  std::vector<ClientId> accepted;
  std::vector<ClientId> rejected;
  std::vector<ClientId> absent;  // download or upload lost in transit
  bool stalled = false;
  std::string stall_reason;
  double accuracy = 0.0;
  double global_loss = 0.0;
  double eps_cum = 0.0;    // largest cumulative epsilon over clients
  double delta_cum = 0.0;  // largest cumulative delta over clients
  std::uint64_t gas_round = 0;
  std::uint64_t gas_cum = 0;
  double rewards_paid = 0.0;
  std::map<ClientId, double> rewards;  // paid this round
  double pdr = 1.0;
  double overhead_ratio = 0.0;
};

struct ExperimentState {
  ExperimentConfig cfg;
  LinearShape shape;
  std::vector<LocalDataset> clients;
  LocalDataset holdout;
  std::vector<std::size_t> byzantine;  // client indices
  std::vector<Validator> validators;
  ValidationPolicy policy;
  std::optional<double> noise_std;
  Chain chain = Chain::with_genesis();
  BudgetLedger budget;
  NetworkSimulator net;
  ParameterVector global;  // W^t
  std::uint64_t round = 0;
  std::uint64_t gas_cum = 0;
  std::uint64_t deployment_gas = 0;
  std::map<ClientId, double> rewards_cum;

  ExperimentState(ExperimentConfig c, NetworkSimulator n)
      : cfg(std::move(c)), net(std::move(n)) {}
};

inline std::string rsu_name(std::size_t i) { return "rsu-" + std::to_string(i); }

inline RoundReport snapshot_report(const ExperimentState& s) {
  RoundReport r;
  r.round = s.round;
  r.accuracy = evaluate(s.global, s.holdout);
  r.global_loss = global_loss(s.global, s.clients);
  const auto spend = s.budget.max_spent();
  r.eps_cum = spend.epsilon;
  r.delta_cum = spend.delta;
  r.gas_cum = s.gas_cum;
  const NetMetrics m = s.net.metrics();
  r.pdr = m.pdr;
  r.overhead_ratio = m.overhead_ratio;
  return r;
}

// Loads the data, writes the genesis block and the setup block (contract
// deployments, client registrations, W^0 = 0) and returns the round-0 state.
inline ExperimentState init_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  PartitionedData data = prepare_data(cfg);
  ExperimentState s(cfg, NetworkSimulator(cfg.link, mix_seed(cfg.master_seed, seed_tag::kNetwork)));
  s.shape = LinearShape{data.clients.front().features, data.classes};
  s.clients = std::move(data.clients);
  s.holdout = std::move(data.holdout);
  for (std::uint32_t k = cfg.clients - cfg.byzantine_clients; k < cfg.clients; ++k) {
    s.byzantine.push_back(k);
  }
  for (std::uint32_t v = 0; v < cfg.validators; ++v) {
    s.validators.push_back(Validator{rsu_name(v), v < cfg.faulty_validators});
    s.net.add_node(rsu_name(v));
  }
  for (const auto& c : s.clients) s.net.add_node(c.client_id);

  const std::size_t dim = s.shape.dim();
  s.policy.expected_dim = dim;
  if (cfg.privacy) {
    s.noise_std = noise_stddev(*cfg.privacy);
    s.policy.require_privacy_tag = true;
  }
  if (cfg.max_norm) {
    s.policy.max_norm = *cfg.max_norm;
  } else if (cfg.privacy) {
    s.policy.max_norm =
        cfg.privacy->clip_norm + *s.noise_std * (std::sqrt(static_cast<double>(dim)) + 6.0);
  }

  s.global = ParameterVector(dim);
  std::vector<Transaction> setup;
  setup.push_back(make_tx(Deployment{DeploymentLabel::kFederatedContract}));
  setup.push_back(make_tx(Deployment{DeploymentLabel::kContributionContract}));
  for (const auto& c : s.clients) setup.push_back(make_tx(Registration{c.client_id}));
  setup.push_back(make_aggregation_tx(0, s.global, cfg.model_storage == ModelStorage::kFull));
  append_block(s.chain, std::move(setup), s.validators.front().id, 0);

  for (const auto& b : s.chain.blocks()) {
    for (const auto& tx : b.body) {
      const std::uint64_t g = tx_gas(cfg.gas, tx);
      s.gas_cum += g;
      if (tx.kind() == TxKind::kDeployment) s.deployment_gas += g;
    }
  }
  return s;
}

// Trained, clipped and noised parameters of client k for the current round.
inline ClientUpdate make_client_update(const ExperimentState& s, std::size_t k) {
  const LocalDataset& data = s.clients[k];
  const std::uint64_t seed = derive_client_seed(s.cfg.master_seed, data.client_id, s.round);
  TrainingConfig tc = s.cfg.training;
  tc.seed = seed;
  ParameterVector w = local_train(s.global, data, tc);
  if (s.cfg.privacy) {
    w = clip(w, s.cfg.privacy->clip_norm);
    w = add_gaussian_noise(w, *s.noise_std, mix_seed(seed, seed_tag::kNoise));
  }
  if (std::find(s.byzantine.begin(), s.byzantine.end(), k) != s.byzantine.end()) {
    for (double& v : w) v *= s.cfg.byzantine_scale;
  }
  return ClientUpdate{data.client_id, s.round, std::move(w), data.size(), s.cfg.privacy,
                      Acceptance::kPending};
}

inline RoundReport run_round(ExperimentState& s) {
  const std::uint64_t period = s.cfg.round_period_ms;
  const std::uint64_t start = (s.round + 1) * period;
  const std::uint64_t payload = 8 * s.shape.dim();
  RoundReport report;

  // Downloads.
  std::vector<SendRecord> downloads;
  for (std::size_t k = 0; k < s.clients.size(); ++k) {
    downloads.push_back(s.net.send(Message{rsu_name(k % s.validators.size()),
                                           s.clients[k].client_id, payload,
                                           MessageKind::kModelDownload, start}));
  }
  s.net.run_until(start + period / 2 - 1);

  // Local training and uploads, in client order.
  std::vector<ClientUpdate> delivered;
  for (std::size_t k = 0; k < s.clients.size(); ++k) {
    if (downloads[k].dropped) {
      report.absent.push_back(s.clients[k].client_id);
      continue;
    }
    ClientUpdate u = make_client_update(s, k);
    const SendRecord up = s.net.send(Message{s.clients[k].client_id,
                                             rsu_name(k % s.validators.size()), payload,
                                             MessageKind::kUpdateUpload, start + period / 2});
    if (up.dropped) {
      report.absent.push_back(u.client_id);
      continue;
    }
    delivered.push_back(std::move(u));
  }
  const std::uint64_t commit_time = start + period - 1;
  s.net.run_until(commit_time);

  for (const auto& u : delivered) {
    if (u.privacy_tag) s.budget.compose(u.client_id, *u.privacy_tag, s.round);
  }

  std::uint64_t gas_round = 0;
  std::vector<ClientUpdate> accepted;
  std::vector<ContributionRecord> records;
  if (delivered.empty()) {
    report.stalled = true;
    report.stall_reason = "no updates delivered";
  } else {
    std::vector<Transaction> txs;
    for (const auto& u : delivered) txs.push_back(make_tx(u));
    const CommitOutcome outcome =
        propose_and_commit(s.validators, s.chain, std::move(txs), commit_time, s.policy);
    std::vector<bool> excluded(delivered.size(), false);
    for (const auto& e : outcome.exclusions) excluded[e.tx_index] = true;
    for (std::size_t i = 0; i < delivered.size(); ++i) {
      ClientUpdate& u = delivered[i];
      u.accepted = (outcome.committed && !excluded[i]) ? Acceptance::kAccepted
                                                        : Acceptance::kRejected;
      (u.accepted == Acceptance::kAccepted ? report.accepted : report.rejected)
          .push_back(u.client_id);
      records.push_back(score_contribution(u));
      if (u.accepted == Acceptance::kAccepted) accepted.push_back(u);
    }
    if (outcome.committed) {
      gas_round += block_gas(s.cfg.gas, s.chain.tip());
    } else if (!outcome.exclusions.empty() && outcome.exclusions.size() == delivered.size()) {
      report.stalled = true;
      report.stall_reason = "every update rejected";
    } else {
      report.stalled = true;
      report.stall_reason = "update block rejected: " + outcome.rejection;
    }
  }

  if (!accepted.empty()) {
    ParameterVector next = fed_avg(accepted);
    std::vector<Transaction> txs;
    txs.push_back(make_aggregation_tx(s.round + 1, next,
                                      s.cfg.model_storage == ModelStorage::kFull));
    std::vector<Transaction> rewards = distribute_rewards(records, s.cfg.reward);
    for (auto& r : rewards) txs.push_back(std::move(r));
    const CommitOutcome outcome =
        propose_and_commit(s.validators, s.chain, std::move(txs), commit_time, s.policy);
    if (outcome.committed) {
      s.global = std::move(next);
      gas_round += block_gas(s.cfg.gas, s.chain.tip());
      for (const auto& tx : s.chain.tip().body) {
        if (const auto* r = std::get_if<Reward>(&tx.payload)) {
          report.rewards[r->client_id] += r->amount;
          report.rewards_paid += r->amount;
          s.rewards_cum[r->client_id] += r->amount;
        }
      }
    } else {
      report.stalled = true;
      report.stall_reason = "aggregation block rejected: " + outcome.rejection;
    }
  }

  s.gas_cum += gas_round;
  ++s.round;
  RoundReport snap = snapshot_report(s);
  snap.accepted = std::move(report.accepted);
  snap.rejected = std::move(report.rejected);
  snap.absent = std::move(report.absent);
  snap.stalled = report.stalled;
  snap.stall_reason = std::move(report.stall_reason);
  snap.gas_round = gas_round;
  snap.rewards_paid = report.rewards_paid;
  snap.rewards = std::move(report.rewards);
  return snap;
}

enum class StopReason { kTargetReached, kLimitReached };

struct ExperimentResult {
  StopReason stop = StopReason::kLimitReached;
  std::vector<RoundReport> reports;  // reports[0] is the initial state
  ParameterVector final_params;
  std::string ledger;       // newline-delimited canonical JSON
  std::string metrics_csv;
  Json metrics_json;
  std::string net_csv;      // per-second network samples
  Json summary;
  ChainCheck chain_check;
};

inline const char* to_string(StopReason r) {
  return r == StopReason::kTargetReached ? "target-reached" : "limit-reached";
}

inline constexpr const char* kMetricsHeader =
    "round,accuracy,global_loss,accepted,rejected,eps_cum,delta_cum,gas_round,gas_cum,"
    "rewards_paid,pdr,overhead_ratio";

inline std::string metrics_csv(const std::vector<RoundReport>& reports) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : reports) {
    out += std::to_string(r.round) + "," + format_double(r.accuracy) + "," +
           format_double(r.global_loss) + "," + std::to_string(r.accepted.size()) + "," +
           std::to_string(r.rejected.size()) + "," + format_double(r.eps_cum) + "," +
           format_double(r.delta_cum) + "," + std::to_string(r.gas_round) + "," +
           std::to_string(r.gas_cum) + "," + format_double(r.rewards_paid) + "," +
           format_double(r.pdr) + "," + format_double(r.overhead_ratio) + "\n";
  }
  return out;
}

inline Json report_to_json(const RoundReport& r) {
  return Json{{"round", r.round},
              {"accuracy", r.accuracy},
              {"global_loss", r.global_loss},
              {"accepted", r.accepted},
              {"rejected", r.rejected},
              {"absent", r.absent},
              {"stalled", r.stalled},
              {"stall_reason", r.stall_reason},
              {"eps_cum", r.eps_cum},
              {"delta_cum", r.delta_cum},
              {"gas_round", r.gas_round},
              {"gas_cum", r.gas_cum},
              {"rewards_paid", r.rewards_paid},
              {"rewards", Json(r.rewards)},
              {"pdr", r.pdr},
              {"overhead_ratio", r.overhead_ratio}};
}

inline std::string net_samples_csv(const NetMetrics& m) {
  std::string out = "second,sent,pdr,overhead_ratio\n";
  for (const auto& s : m.samples) {
    out += std::to_string(s.second) + "," + std::to_string(s.sent) + "," +
           format_double(s.pdr) + "," + format_double(s.overhead_ratio) + "\n";
  }
  return out;
}

// Runs rounds until the held-out accuracy reaches the target or rounds_max
// rounds have completed.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentState s = init_experiment(cfg);
  ExperimentResult res;
  RoundReport initial = snapshot_report(s);
  initial.gas_round = s.gas_cum;
  res.reports.push_back(std::move(initial));
  while (s.round < cfg.rounds_max) {
    res.reports.push_back(run_round(s));
    if (res.reports.back().accuracy >= cfg.target_accuracy) {
      res.stop = StopReason::kTargetReached;
      break;
    }
  }

  res.final_params = s.global;
  res.ledger = s.chain.serialize();
  res.chain_check = validate_serialized_chain(res.ledger);
  res.metrics_csv = metrics_csv(res.reports);
  res.metrics_json = Json::array();
  for (const auto& r : res.reports) res.metrics_json.push_back(report_to_json(r));
  const NetMetrics net = s.net.metrics();
  res.net_csv = net_samples_csv(net);

  Json privacy = Json::object();
  for (const auto& [id, spend] : s.budget.all()) {
    privacy[id] = Json{{"epsilon", spend.epsilon},
                       {"delta", spend.delta},
                       {"rounds", s.budget.rounds_participated(id)}};
  }
  const RoundReport& last = res.reports.back();
  res.summary = Json{{"status", to_string(res.stop)},
                     {"rounds_completed", s.round},
                     {"final_accuracy", last.accuracy},
                     {"final_global_loss", last.global_loss},
                     {"deployment_gas", s.deployment_gas},
                     {"gas_total", s.gas_cum},
                     {"blocks", s.chain.size()},
                     {"chain_valid", res.chain_check.ok},
                     {"rewards", Json(s.rewards_cum)},
                     {"privacy", privacy},
                     {"noise_std", s.noise_std ? Json(*s.noise_std) : Json(nullptr)},
                     {"max_norm", std::isfinite(s.policy.max_norm) ? Json(s.policy.max_norm)
                                                                   : Json(nullptr)},
                     {"net", Json{{"sent", net.sent},
                                  {"delivered", net.delivered},
                                  {"dropped", net.dropped},
                                  {"pdr", net.pdr},
                                  {"overhead_ratio", net.overhead_ratio}}},
                     {"config", config_to_json(cfg)}};
  return res;
}

enum class OutputFormat { kCsv, kJson };

// Writes ledger.ndjson, metrics.csv (or metrics.json), netsim.csv and
// summary.json into `dir`.
inline void write_artifacts(const ExperimentResult& res, const std::string& dir,
                            OutputFormat format = OutputFormat::kCsv) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_text_file((base / "ledger.ndjson").string(), res.ledger);
  if (format == OutputFormat::kCsv) {
    write_text_file((base / "metrics.csv").string(), res.metrics_csv);
  } else {
    write_text_file((base / "metrics.json").string(), canonical_dump(res.metrics_json) + "\n");
  }
  write_text_file((base / "netsim.csv").string(), res.net_csv);
  write_text_file((base / "summary.json").string(), res.summary.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Privacy/utility sweep

struct SweepRow {
  std::optional<double> epsilon;  // nullopt is the non-private baseline
  std::vector<double> accuracies;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Runs the config once without privacy and once per epsilon, each over
// master seeds cfg.master_seed .. cfg.master_seed + seeds - 1, and reports
// the final held-out accuracy.
inline std::vector<SweepRow> run_sweep(const ExperimentConfig& base,
                                       const std::vector<double>& epsilons,
                                       std::uint32_t seeds) {
  if (seeds == 0) throw InvalidArgument("sweep: seeds must be >= 1");
  std::vector<std::optional<double>> settings{std::nullopt};
  for (double e : epsilons) settings.push_back(e);
  const PrivacyParams template_params = base.privacy.value_or(PrivacyParams{});

  std::vector<SweepRow> rows;
  for (const auto& eps : settings) {
    SweepRow row;
    row.epsilon = eps;
    for (std::uint32_t i = 0; i < seeds; ++i) {
      ExperimentConfig cfg = base;
      cfg.master_seed = base.master_seed + i;
      if (eps) {
        cfg.privacy = template_params;
        cfg.privacy->epsilon = *eps;
      } else {
        cfg.privacy.reset();
      }
      row.accuracies.push_back(run_experiment(cfg).reports.back().accuracy);
    }
    row.min = *std::min_element(row.accuracies.begin(), row.accuracies.end());
    row.max = *std::max_element(row.accuracies.begin(), row.accuracies.end());
    double sum = 0.0;
    for (double a : row.accuracies) sum += a;
    row.mean = sum / static_cast<double>(row.accuracies.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "setting,epsilon,seeds,mean_accuracy,min_accuracy,max_accuracy\n";
  for (const auto& r : rows) {
    out += std::string(r.epsilon ? "private" : "non-private") + "," +
           (r.epsilon ? format_double(*r.epsilon) : std::string("inf")) + "," +
           std::to_string(r.accuracies.size()) + "," + format_double(r.mean) + "," +
           format_double(r.min) + "," + format_double(r.max) + "\n";
  }
  return out;
}

}  // namespace vfl
