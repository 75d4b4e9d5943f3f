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

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "vfl/canonical_json.hpp"
#include "vfl/fl_core.hpp"
#include "vfl/incentive.hpp"
#include "vfl/ledger.hpp"
#include "vfl/netsim.hpp"
#include "vfl/types.hpp"

namespace vfl {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SyntheticSpec {
  std::uint32_t samples_per_client = 250;
  std::uint32_t features = 2;
  std::uint32_t classes = 2;
  double separation = 4.0;
};

struct IdxSpec {
  std::string images;
  std::string labels;
  std::vector<std::uint64_t> partition;  // training samples per client
  std::string test_images;               // optional held-out pair
  std::string test_labels;
};

enum class ModelStorage { kFull, kHashOnly };

struct ExperimentConfig {
  std::uint32_t clients = 10;
  std::uint64_t rounds_max = 15;
  double target_accuracy = 1.0;
  std::optional<PrivacyParams> privacy = PrivacyParams{4.03, 1e-5, 1.0};
  TrainingConfig training{1, 25, 0.5, 0};
  std::uint32_t validators = 3;
  std::uint32_t faulty_validators = 0;
  // Norm guard for uploaded updates. Unset means: unbounded without privacy,
  // and with privacy clip_norm + noise_std * (sqrt(d) + 6), far above the
  // norm of any honestly noised update.
  std::optional<double> max_norm;
  std::uint32_t byzantine_clients = 0;  // the last N clients upload scaled models
  double byzantine_scale = 100.0;
  RewardPolicy reward;
  LinkModel link{0.02, 5, 50, 30};
  GasTable gas = default_gas_table();
  std::variant<SyntheticSpec, IdxSpec> dataset = SyntheticSpec{};
  std::uint64_t master_seed = 1;
  ModelStorage model_storage = ModelStorage::kFull;
  std::uint64_t round_period_ms = 1000;
  double holdout_fraction = 0.2;

  void validate() const {
    if (clients == 0) throw ConfigError("clients must be >= 1");
    if (!(target_accuracy >= 0.0 && target_accuracy <= 1.0)) {
      throw ConfigError("target_accuracy must lie in [0, 1]");
    }
    if (privacy) {
      try {
        privacy->validate();
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }
    try {
      training.validate();
      link.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    if (validators == 0) throw ConfigError("validators must be >= 1");
    if (faulty_validators > validators) {
      throw ConfigError("faulty_validators exceeds validators");
    }
    if (byzantine_clients > clients) throw ConfigError("byzantine_clients exceeds clients");
    if (max_norm && !(*max_norm >= 0.0)) throw ConfigError("max_norm must be >= 0");
    if (!(reward.pool_per_round >= 0.0)) throw ConfigError("reward pool must be >= 0");
    if (round_period_ms < 2 || 2 * link.delay_max_ms >= round_period_ms) {
      throw ConfigError("round_period_ms must exceed twice the maximum link delay");
    }
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
      throw ConfigError("holdout_fraction must lie in (0, 1)");
    }
    for (const char* item : {"migration", "federated_contract", "contribution_contract",
                             "Registration", "ModelUpdate", "Aggregation", "Reward"}) {
      if (!gas.contains(item)) throw ConfigError(std::string("gas table lacks ") + item);
    }
    if (const auto* s = std::get_if<SyntheticSpec>(&dataset)) {
      if (s->features == 0 || s->classes < 2 || s->samples_per_client < 2) {
        throw ConfigError("synthetic: need features >= 1, classes >= 2, samples >= 2");
      }
      if (!(s->separation >= 0.0)) throw ConfigError("synthetic: separation must be >= 0");
    } else {
      const auto& idx = std::get<IdxSpec>(dataset);
      if (idx.images.empty() || idx.labels.empty()) {
        throw ConfigError("idx: images and labels paths are required");
      }
      if (idx.partition.size() != clients) {
        throw ConfigError("idx: partition needs one size per client");
      }
      for (auto n : idx.partition) {
        if (n == 0) throw ConfigError("idx: partition sizes must be positive");
      }
      if (idx.test_images.empty() != idx.test_labels.empty()) {
        throw ConfigError("idx: test_images and test_labels go together");
      }
    }
  }
};

namespace detail {

class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const Json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const Json* sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) {
        throw ConfigError(where_ + ": unknown field '" + it.key() + "'");
      }
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace detail

// Missing fields keep their defaults; unknown fields are rejected.
inline ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig cfg;
  detail::ObjectReader top(j, "config");
  top.get("clients", cfg.clients);
  top.get("rounds_max", cfg.rounds_max);
  top.get("target_accuracy", cfg.target_accuracy);
  if (const Json* p = top.sub("privacy")) {
    if (p->is_null()) {
      cfg.privacy.reset();
    } else {
      PrivacyParams pp = cfg.privacy.value_or(PrivacyParams{});
      detail::ObjectReader r(*p, "privacy");
      r.get("epsilon", pp.epsilon);
      r.get("delta", pp.delta);
      r.get("clip_norm", pp.clip_norm);
      r.finish();
      cfg.privacy = pp;
    }
  }
  if (const Json* t = top.sub("training")) {
    detail::ObjectReader r(*t, "training");
    r.get("local_epochs", cfg.training.local_epochs);
    r.get("batch_size", cfg.training.batch_size);
    r.get("learning_rate", cfg.training.learning_rate);
    r.get("seed", cfg.training.seed);
    r.finish();
  }
  top.get("validators", cfg.validators);
  top.get("faulty_validators", cfg.faulty_validators);
  if (const Json* m = top.sub("max_norm")) {
    if (m->is_null()) {
      cfg.max_norm.reset();
    } else if (m->is_number()) {
      cfg.max_norm = m->get<double>();
    } else {
      throw ConfigError("config.max_norm: expected number or null");
    }
  }
  top.get("byzantine_clients", cfg.byzantine_clients);
  top.get("byzantine_scale", cfg.byzantine_scale);
  if (const Json* rw = top.sub("reward")) {
    detail::ObjectReader r(*rw, "reward");
    r.get("pool_per_round", cfg.reward.pool_per_round);
    r.finish();
  }
  if (const Json* l = top.sub("link")) {
    detail::ObjectReader r(*l, "link");
    r.get("drop_probability", cfg.link.drop_probability);
    r.get("delay_min_ms", cfg.link.delay_min_ms);
    r.get("delay_max_ms", cfg.link.delay_max_ms);
    r.get("overhead_bytes_per_msg", cfg.link.overhead_bytes_per_msg);
    r.finish();
  }
  if (const Json* g = top.sub("gas")) {
    if (!g->is_object()) throw ConfigError("config.gas: expected an object");
    for (auto it = g->begin(); it != g->end(); ++it) {
      if (!it->is_number_unsigned()) {
        throw ConfigError("config.gas." + it.key() + ": expected unsigned integer");
      }
      cfg.gas[it.key()] = it->get<std::uint64_t>();
    }
  }
  if (const Json* d = top.sub("dataset")) {
    detail::ObjectReader r(*d, "dataset");
    const Json* syn = r.sub("synthetic");
    const Json* idx = r.sub("idx");
    r.finish();
    if ((syn != nullptr) == (idx != nullptr)) {
      throw ConfigError("dataset: exactly one of 'synthetic' or 'idx' is required");
    }
    if (syn) {
      SyntheticSpec s;
      detail::ObjectReader sr(*syn, "dataset.synthetic");
      sr.get("samples_per_client", s.samples_per_client);
      sr.get("features", s.features);
      sr.get("classes", s.classes);
      sr.get("separation", s.separation);
      sr.finish();
      cfg.dataset = s;
    } else {
      IdxSpec s;
      detail::ObjectReader ir(*idx, "dataset.idx");
      ir.get("images", s.images);
      ir.get("labels", s.labels);
      ir.get("partition", s.partition);
      ir.get("test_images", s.test_images);
      ir.get("test_labels", s.test_labels);
      ir.finish();
      cfg.dataset = s;
    }
  }
  top.get("master_seed", cfg.master_seed);
  if (const Json* ms = top.sub("model_storage")) {
    const std::string v = ms->is_string() ? ms->get<std::string>() : "";
    if (v == "full") {
      cfg.model_storage = ModelStorage::kFull;
    } else if (v == "hash") {
      cfg.model_storage = ModelStorage::kHashOnly;
    } else {
      throw ConfigError("config.model_storage: expected \"full\" or \"hash\"");
    }
  }
  top.get("round_period_ms", cfg.round_period_ms);
  top.get("holdout_fraction", cfg.holdout_fraction);
  top.finish();
  cfg.validate();
  return cfg;
}

inline Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["clients"] = cfg.clients;
  j["rounds_max"] = cfg.rounds_max;
  j["target_accuracy"] = cfg.target_accuracy;
  if (cfg.privacy) {
    j["privacy"] = Json{{"epsilon", cfg.privacy->epsilon},
                        {"delta", cfg.privacy->delta},
                        {"clip_norm", cfg.privacy->clip_norm}};
  } else {
    j["privacy"] = nullptr;
  }
  j["training"] = Json{{"local_epochs", cfg.training.local_epochs},
                       {"batch_size", cfg.training.batch_size},
                       {"learning_rate", cfg.training.learning_rate},
                       {"seed", cfg.training.seed}};
  j["validators"] = cfg.validators;
  j["faulty_validators"] = cfg.faulty_validators;
  j["max_norm"] = cfg.max_norm ? Json(*cfg.max_norm) : Json(nullptr);
  j["byzantine_clients"] = cfg.byzantine_clients;
  j["byzantine_scale"] = cfg.byzantine_scale;
  j["reward"] = Json{{"pool_per_round", cfg.reward.pool_per_round}};
  j["link"] = Json{{"drop_probability", cfg.link.drop_probability},
                   {"delay_min_ms", cfg.link.delay_min_ms},
                   {"delay_max_ms", cfg.link.delay_max_ms},
                   {"overhead_bytes_per_msg", cfg.link.overhead_bytes_per_msg}};
  j["gas"] = Json(cfg.gas);
  if (const auto* s = std::get_if<SyntheticSpec>(&cfg.dataset)) {
    j["dataset"] = Json{{"synthetic", Json{{"samples_per_client", s->samples_per_client},
                                           {"features", s->features},
                                           {"classes", s->classes},
                                           {"separation", s->separation}}}};
  } else {
    const auto& spec = std::get<IdxSpec>(cfg.dataset);
    Json idx{{"images", spec.images}, {"labels", spec.labels}, {"partition", spec.partition}};
    if (!spec.test_images.empty()) {
      idx["test_images"] = spec.test_images;
      idx["test_labels"] = spec.test_labels;
    }
    j["dataset"] = Json{{"idx", idx}};
  }
  j["master_seed"] = cfg.master_seed;
  j["model_storage"] = cfg.model_storage == ModelStorage::kFull ? "full" : "hash";
  j["round_period_ms"] = cfg.round_period_ms;
  j["holdout_fraction"] = cfg.holdout_fraction;
  return j;
}

inline ExperimentConfig load_config(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const LedgerError& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(j);
}

}  // namespace vfl
