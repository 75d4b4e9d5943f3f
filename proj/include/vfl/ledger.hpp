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

// Hash-chained permissioned ledger.
//
// Every transaction and header has one canonical JSON serialization (see
// canonical_json.hpp); hashes are SHA-256 over those bytes. A transaction's
// id is the hash of {"kind", "payload"}, which is also its Merkle leaf. On
// disk the ledger is one canonical JSON block per line:
//
//   {"body":[{"kind":..,"payload":..,"tx_id":..},..],"hash":..,"header":{..}}
//
// where "hash" is the SHA-256 of the canonical header.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "vfl/canonical_json.hpp"
#include "vfl/hash.hpp"
#include "vfl/types.hpp"

namespace vfl {

class LedgerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Transactions

enum class TxKind { kRegistration, kModelUpdate, kAggregation, kReward, kDeployment };

enum class DeploymentLabel { kMigration, kFederatedContract, kContributionContract };

inline const char* to_string(TxKind k) {
  switch (k) {
    case TxKind::kRegistration:
      return "Registration";
    case TxKind::kModelUpdate:
      return "ModelUpdate";
    case TxKind::kAggregation:
      return "Aggregation";
    case TxKind::kReward:
      return "Reward";
    case TxKind::kDeployment:
      return "Deployment";
  }
  return "";
}

inline const char* to_string(DeploymentLabel l) {
  switch (l) {
    case DeploymentLabel::kMigration:
      return "migration";
    case DeploymentLabel::kFederatedContract:
      return "federated_contract";
    case DeploymentLabel::kContributionContract:
      return "contribution_contract";
  }
  return "";
}

inline DeploymentLabel deployment_label_from_string(std::string_view s) {
  if (s == "migration") return DeploymentLabel::kMigration;
  if (s == "federated_contract") return DeploymentLabel::kFederatedContract;
  if (s == "contribution_contract") return DeploymentLabel::kContributionContract;
  throw LedgerError("unknown deployment label: " + std::string(s));
}

struct Registration {
  ClientId client_id;
  friend bool operator==(const Registration&, const Registration&) = default;
};

// Global model for `round`. `params` is absent when the chain stores only
// the digest of the model.
struct Aggregation {
  std::uint64_t round = 0;
  std::optional<ParameterVector> params;
  Digest params_digest{};
  friend bool operator==(const Aggregation&, const Aggregation&) = default;
};

struct Reward {
  ClientId client_id;
  std::uint64_t round = 0;
  double amount = 0.0;
  friend bool operator==(const Reward&, const Reward&) = default;
};

struct Deployment {
  DeploymentLabel label = DeploymentLabel::kMigration;
  friend bool operator==(const Deployment&, const Deployment&) = default;
};

// Alternative order matches TxKind.
using TxPayload = std::variant<Registration, ClientUpdate, Aggregation, Reward, Deployment>;

struct Transaction {
  TxPayload payload;
  Digest tx_id{};

  TxKind kind() const { return static_cast<TxKind>(payload.index()); }
  friend bool operator==(const Transaction&, const Transaction&) = default;
};

inline Json params_to_json(const ParameterVector& p) {
  Json arr = Json::array();
  for (double v : p) arr.push_back(v);
  return arr;
}

inline Digest params_digest(const ParameterVector& p) {
  return sha256(canonical_dump(params_to_json(p)));
}

namespace detail {

inline Json privacy_to_json(const std::optional<PrivacyParams>& p) {
  if (!p) return nullptr;
  return Json{{"clip_norm", p->clip_norm}, {"delta", p->delta}, {"epsilon", p->epsilon}};
}

inline Json payload_to_json(const TxPayload& payload) {
  struct Visitor {
    Json operator()(const Registration& r) const { return Json{{"client_id", r.client_id}}; }
    Json operator()(const ClientUpdate& u) const {
      return Json{{"accepted", to_string(u.accepted)},
                  {"client_id", u.client_id},
                  {"params", params_to_json(u.params)},
                  {"privacy", privacy_to_json(u.privacy_tag)},
                  {"round", u.round},
                  {"sample_count", u.sample_count}};
    }
    Json operator()(const Aggregation& a) const {
      Json j{{"params_sha256", to_hex(a.params_digest)}, {"round", a.round}};
      if (a.params) j["params"] = params_to_json(*a.params);
      return j;
    }
    Json operator()(const Reward& r) const {
      return Json{{"amount", r.amount}, {"client_id", r.client_id}, {"round", r.round}};
    }
    Json operator()(const Deployment& d) const { return Json{{"label", to_string(d.label)}}; }
  };
  return std::visit(Visitor{}, payload);
}

// Strict field access for decoding; any deviation is a format error.
inline const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object()) throw LedgerError("expected object");
  auto it = obj.find(key);
  if (it == obj.end()) throw LedgerError(std::string("missing field: ") + key);
  return *it;
}

inline std::uint64_t as_u64(const Json& j) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw LedgerError("expected non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline double as_double(const Json& j) {
  if (!j.is_number()) throw LedgerError("expected number");
  return j.get<double>();
}

inline std::string as_string(const Json& j) {
  if (!j.is_string()) throw LedgerError("expected string");
  return j.get<std::string>();
}

inline Digest as_digest(const Json& j) {
  auto d = digest_from_hex(as_string(j));
  if (!d) throw LedgerError("malformed digest");
  return *d;
}

inline ParameterVector params_from_json(const Json& j) {
  if (!j.is_array()) throw LedgerError("expected parameter array");
  std::vector<double> values;
  values.reserve(j.size());
  for (const auto& v : j) values.push_back(as_double(v));
  return ParameterVector(std::move(values));
}

inline TxPayload payload_from_json(std::string_view kind, const Json& p) {
  if (kind == "Registration") return Registration{as_string(field(p, "client_id"))};
  if (kind == "ModelUpdate") {
    ClientUpdate u;
    u.accepted = acceptance_from_string(as_string(field(p, "accepted")));
    u.client_id = as_string(field(p, "client_id"));
    u.params = params_from_json(field(p, "params"));
    const Json& priv = field(p, "privacy");
    if (!priv.is_null()) {
      u.privacy_tag = PrivacyParams{as_double(field(priv, "epsilon")),
                                    as_double(field(priv, "delta")),
                                    as_double(field(priv, "clip_norm"))};
    }
    u.round = as_u64(field(p, "round"));
    u.sample_count = as_u64(field(p, "sample_count"));
    return u;
  }
  if (kind == "Aggregation") {
    Aggregation a;
    a.round = as_u64(field(p, "round"));
    a.params_digest = as_digest(field(p, "params_sha256"));
    if (p.contains("params")) a.params = params_from_json(p["params"]);
    return a;
  }
  if (kind == "Reward") {
    return Reward{as_string(field(p, "client_id")), as_u64(field(p, "round")),
                  as_double(field(p, "amount"))};
  }
  if (kind == "Deployment") {
    return Deployment{deployment_label_from_string(as_string(field(p, "label")))};
  }
  throw LedgerError("unknown transaction kind: " + std::string(kind));
}

}  // namespace detail

// The hashed part of a transaction: {"kind": .., "payload": ..}.
inline std::string tx_canonical_bytes(const Transaction& tx) {
  return canonical_dump(
      Json{{"kind", to_string(tx.kind())}, {"payload", detail::payload_to_json(tx.payload)}});
}

inline Digest compute_tx_id(const Transaction& tx) { return sha256(tx_canonical_bytes(tx)); }

inline Transaction make_tx(TxPayload payload) {
  Transaction tx{std::move(payload), {}};
  if (const auto* r = std::get_if<Reward>(&tx.payload)) {
    if (!(r->amount >= 0.0) || !std::isfinite(r->amount)) {
      throw InvalidArgument("reward amount must be non-negative");
    }
  }
  tx.tx_id = compute_tx_id(tx);
  return tx;
}

inline Transaction make_aggregation_tx(std::uint64_t round, const ParameterVector& params,
                                       bool store_full_params = true) {
  Aggregation a;
  a.round = round;
  a.params_digest = params_digest(params);
  if (store_full_params) a.params = params;
  return make_tx(std::move(a));
}

inline Json tx_to_json(const Transaction& tx) {
  return Json{{"kind", to_string(tx.kind())},
              {"payload", detail::payload_to_json(tx.payload)},
              {"tx_id", to_hex(tx.tx_id)}};
}

inline Transaction tx_from_json(const Json& j) {
  Transaction tx;
  tx.payload = detail::payload_from_json(detail::as_string(detail::field(j, "kind")),
                                         detail::field(j, "payload"));
  tx.tx_id = detail::as_digest(detail::field(j, "tx_id"));
  return tx;
}

// ---------------------------------------------------------------------------
// Merkle tree

// Root over precomputed leaf hashes. A level with an odd node count pairs its
// last node with itself; a single leaf is its own root.
inline Digest merkle_root_of_leaves(std::vector<Digest> level) {
  if (level.empty()) throw InvalidArgument("merkle_root: empty transaction list");
  while (level.size() > 1) {
    if (level.size() % 2 == 1) level.push_back(level.back());
    std::vector<Digest> next;
    next.reserve(level.size() / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
      next.push_back(sha256_pair(level[i], level[i + 1]));
    }
    level = std::move(next);
  }
  return level.front();
}

inline Digest merkle_root(std::span<const Transaction> txs) {
  std::vector<Digest> leaves;
  leaves.reserve(txs.size());
  for (const auto& tx : txs) leaves.push_back(compute_tx_id(tx));
  return merkle_root_of_leaves(std::move(leaves));
}

// ---------------------------------------------------------------------------
// Blocks and chain

struct BlockHeader {
  std::uint64_t number = 0;
  Digest prev_hash{};
  Digest merkle_root{};
  std::uint64_t timestamp = 0;  // simulation clock, milliseconds
  std::string proposer;
  friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

struct Block {
  BlockHeader header;
  std::vector<Transaction> body;
  friend bool operator==(const Block&, const Block&) = default;
};

inline Json header_to_json(const BlockHeader& h) {
  return Json{{"merkle_root", to_hex(h.merkle_root)},
              {"number", h.number},
              {"prev_hash", to_hex(h.prev_hash)},
              {"proposer", h.proposer},
              {"timestamp", h.timestamp}};
}

inline Digest header_hash(const BlockHeader& h) {
  return sha256(canonical_dump(header_to_json(h)));
}

inline Json block_to_json(const Block& b, const Digest& stored_hash) {
  Json body = Json::array();
  for (const auto& tx : b.body) body.push_back(tx_to_json(tx));
  return Json{{"body", std::move(body)},
              {"hash", to_hex(stored_hash)},
              {"header", header_to_json(b.header)}};
}

inline std::string serialize_block(const Block& b) {
  return canonical_dump(block_to_json(b, header_hash(b.header)));
}

struct DecodedBlock {
  Block block;
  Digest stored_hash{};
};

inline DecodedBlock block_from_json(const Json& j) {
  using namespace detail;
  DecodedBlock out;
  const Json& h = field(j, "header");
  out.block.header.merkle_root = as_digest(field(h, "merkle_root"));
  out.block.header.number = as_u64(field(h, "number"));
  out.block.header.prev_hash = as_digest(field(h, "prev_hash"));
  out.block.header.proposer = as_string(field(h, "proposer"));
  out.block.header.timestamp = as_u64(field(h, "timestamp"));
  const Json& body = field(j, "body");
  if (!body.is_array()) throw LedgerError("body must be an array");
  for (const auto& tx : body) out.block.body.push_back(tx_from_json(tx));
  out.stored_hash = as_digest(field(j, "hash"));
  return out;
}

inline Block deserialize_block(std::string_view line) {
  return block_from_json(Json::parse(line)).block;
}

class Chain {
 public:
  // Block 0: zero prev_hash, timestamp 0, one Deployment(migration) tx.
  static Chain with_genesis() {
    Block genesis;
    genesis.body.push_back(make_tx(Deployment{DeploymentLabel::kMigration}));
    genesis.header.number = 0;
    genesis.header.prev_hash = kZeroDigest;
    genesis.header.merkle_root = merkle_root(genesis.body);
    genesis.header.timestamp = 0;
    genesis.header.proposer = "genesis";
    Chain c;
    c.blocks_.push_back(std::move(genesis));
    return c;
  }

  explicit Chain(std::vector<Block> blocks) : blocks_(std::move(blocks)) {}

  const std::vector<Block>& blocks() const { return blocks_; }
  std::vector<Block>& mutable_blocks() { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }
  const Block& tip() const { return blocks_.back(); }
  std::uint64_t next_number() const { return blocks_.size(); }

  void push(Block b) { blocks_.push_back(std::move(b)); }

  std::string serialize() const {
    std::string out;
    for (const auto& b : blocks_) {
      out += serialize_block(b);
      out.push_back('\n');
    }
    return out;
  }

 private:
  Chain() = default;
  std::vector<Block> blocks_;
};

// Builds (but does not append) the block that would follow the chain tip.
inline Block make_next_block(const Chain& chain, std::vector<Transaction> txs,
                             std::string proposer, std::uint64_t timestamp) {
  if (chain.empty()) throw InvalidArgument("append_block: chain has no genesis");
  if (txs.empty()) throw InvalidArgument("append_block: empty transaction list");
  if (timestamp < chain.tip().header.timestamp) {
    throw InvalidArgument("append_block: timestamp regression");
  }
  Block b;
  b.header.number = chain.next_number();
  b.header.prev_hash = header_hash(chain.tip().header);
  b.header.merkle_root = merkle_root(txs);
  b.header.timestamp = timestamp;
  b.header.proposer = std::move(proposer);
  b.body = std::move(txs);
  return b;
}

inline const Block& append_block(Chain& chain, std::vector<Transaction> txs,
                                 std::string proposer, std::uint64_t timestamp) {
  chain.push(make_next_block(chain, std::move(txs), std::move(proposer), timestamp));
  return chain.tip();
}

// ---------------------------------------------------------------------------
// Chain validation

enum class ChainFailure {
  kNone,
  kMalformed,   // unparsable or non-canonical line (serialized form only)
  kNumber,
  kHashLink,
  kTimestamp,
  kMerkle,
  kTxId,
  kBlockHash,   // stored header hash disagrees (serialized form only)
};

inline const char* to_string(ChainFailure f) {
  switch (f) {
    case ChainFailure::kNone:
      return "ok";
    case ChainFailure::kMalformed:
      return "malformed";
    case ChainFailure::kNumber:
      return "number";
    case ChainFailure::kHashLink:
      return "hash-link";
    case ChainFailure::kTimestamp:
      return "timestamp";
    case ChainFailure::kMerkle:
      return "merkle";
    case ChainFailure::kTxId:
      return "tx-id";
    case ChainFailure::kBlockHash:
      return "block-hash";
  }
  return "";
}

struct ChainCheck {
  bool ok = true;
  std::size_t index = 0;
  ChainFailure reason = ChainFailure::kNone;
  std::string detail;

  static ChainCheck fail(std::size_t index, ChainFailure reason, std::string detail) {
    return ChainCheck{false, index, reason, std::move(detail)};
  }
};

// Checks block `i` against its predecessor (null for genesis).
inline ChainCheck check_block(const Block& b, const Block* prev, std::size_t i) {
  if (b.header.number != i) {
    return ChainCheck::fail(i, ChainFailure::kNumber,
                            "expected number " + std::to_string(i));
  }
  const Digest expected_prev = prev ? header_hash(prev->header) : kZeroDigest;
  if (b.header.prev_hash != expected_prev) {
    return ChainCheck::fail(i, ChainFailure::kHashLink, "prev_hash mismatch");
  }
  if (prev && b.header.timestamp < prev->header.timestamp) {
    return ChainCheck::fail(i, ChainFailure::kTimestamp, "timestamp regression");
  }
  if (b.body.empty()) {
    return ChainCheck::fail(i, ChainFailure::kMerkle, "empty body");
  }
  if (merkle_root(b.body) != b.header.merkle_root) {
    return ChainCheck::fail(i, ChainFailure::kMerkle, "merkle root mismatch");
  }
  for (std::size_t t = 0; t < b.body.size(); ++t) {
    if (compute_tx_id(b.body[t]) != b.body[t].tx_id) {
      return ChainCheck::fail(i, ChainFailure::kTxId,
                              "tx " + std::to_string(t) + " id mismatch");
    }
  }
  return ChainCheck{};
}

inline ChainCheck validate_chain(std::span<const Block> blocks) {
  if (blocks.empty()) return ChainCheck::fail(0, ChainFailure::kMalformed, "no genesis block");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    ChainCheck c = check_block(blocks[i], i == 0 ? nullptr : &blocks[i - 1], i);
    if (!c.ok) return c;
  }
  return ChainCheck{};
}

inline ChainCheck validate_chain(const Chain& chain) { return validate_chain(chain.blocks()); }

// Validates the newline-delimited file form. Besides the in-memory checks,
// every line must be exactly the canonical serialization of what it decodes
// to, and its stored "hash" must equal the recomputed header hash. Together
// these make every byte of the file covered by some check.
inline ChainCheck validate_serialized_chain(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  bool terminated = true;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      nl = text.size();
      terminated = false;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.empty()) return ChainCheck::fail(0, ChainFailure::kMalformed, "empty ledger");

  std::vector<Block> blocks;
  blocks.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    DecodedBlock d;
    try {
      d = block_from_json(Json::parse(lines[i]));
      if (canonical_dump(block_to_json(d.block, d.stored_hash)) != lines[i]) {
        return ChainCheck::fail(i, ChainFailure::kMalformed, "non-canonical line");
      }
    } catch (const std::exception& e) {
      return ChainCheck::fail(i, ChainFailure::kMalformed, e.what());
    }
    ChainCheck c = check_block(d.block, i == 0 ? nullptr : &blocks.back(), i);
    if (!c.ok) return c;
    if (d.stored_hash != header_hash(d.block.header)) {
      return ChainCheck::fail(i, ChainFailure::kBlockHash, "stored hash mismatch");
    }
    blocks.push_back(std::move(d.block));
  }
  if (!terminated) {
    return ChainCheck::fail(lines.size() - 1, ChainFailure::kMalformed,
                            "missing trailing newline");
  }
  return ChainCheck{};
}

inline Chain parse_chain(std::string_view text) {
  std::vector<Block> blocks;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    blocks.push_back(deserialize_block(line));
  }
  return Chain(std::move(blocks));
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LedgerError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LedgerError("cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

// ---------------------------------------------------------------------------
// Update validation and consensus

struct ValidationPolicy {
  double max_norm = std::numeric_limits<double>::infinity();
  bool require_privacy_tag = false;
  std::size_t expected_dim = 0;  // 0 accepts any dimension
};

enum class RejectReason { kNone, kNorm, kMissingPrivacyTag, kNonFinite, kDimension };

inline const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::kNone:
      return "none";
    case RejectReason::kNorm:
      return "norm";
    case RejectReason::kMissingPrivacyTag:
      return "missing-privacy-tag";
    case RejectReason::kNonFinite:
      return "non-finite";
    case RejectReason::kDimension:
      return "dimension";
  }
  return "";
}

struct UpdateVerdict {
  bool accept = true;
  RejectReason reason = RejectReason::kNone;
};

// Norm bound is inclusive.
inline UpdateVerdict validate_update(const ClientUpdate& u, const ValidationPolicy& policy) {
  if (!u.params.all_finite()) return {false, RejectReason::kNonFinite};
  if (policy.expected_dim != 0 && u.params.size() != policy.expected_dim) {
    return {false, RejectReason::kDimension};
  }
  if (policy.require_privacy_tag && !u.privacy_tag) {
    return {false, RejectReason::kMissingPrivacyTag};
  }
  if (u.params.l2_norm() > policy.max_norm) return {false, RejectReason::kNorm};
  return {};
}

struct Validator {
  std::string id;
  bool faulty = false;  // a faulty validator votes against every block
};

struct Exclusion {
  std::size_t tx_index = 0;
  ClientId client_id;
  RejectReason reason = RejectReason::kNone;
};

struct CommitOutcome {
  bool committed = false;
  std::size_t proposer_index = 0;
  std::size_t approvals = 0;
  std::size_t votes = 0;
  std::vector<Exclusion> exclusions;
  std::string rejection;  // empty when committed
};

// An honest validator's vote on a candidate block.
inline bool approve_block(const Validator& v, const Chain& chain, const Block& candidate,
                          const ValidationPolicy& policy) {
  if (v.faulty) return false;
  if (candidate.header.number != chain.next_number()) return false;
  if (candidate.header.prev_hash != header_hash(chain.tip().header)) return false;
  if (candidate.header.timestamp < chain.tip().header.timestamp) return false;
  if (candidate.body.empty() || merkle_root(candidate.body) != candidate.header.merkle_root) {
    return false;
  }
  for (const auto& tx : candidate.body) {
    if (const auto* u = std::get_if<ClientUpdate>(&tx.payload)) {
      if (!validate_update(*u, policy).accept) return false;
    }
  }
  return true;
}

// Round-robin proposer with strict-majority approval. ModelUpdate
// transactions failing validate_update are dropped from the proposal and
// reported as exclusions; the survivors are marked accepted. The block is
// appended iff more than half of the validators approve it.
inline CommitOutcome propose_and_commit(std::span<const Validator> validators, Chain& chain,
                                        std::vector<Transaction> txs, std::uint64_t sim_time,
                                        const ValidationPolicy& policy) {
  if (validators.empty()) throw InvalidArgument("propose_and_commit: no validators");
  CommitOutcome out;
  out.proposer_index = static_cast<std::size_t>(chain.next_number() % validators.size());

  std::vector<Transaction> kept;
  kept.reserve(txs.size());
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (auto* u = std::get_if<ClientUpdate>(&txs[i].payload)) {
      const UpdateVerdict verdict = validate_update(*u, policy);
      if (!verdict.accept) {
        out.exclusions.push_back(Exclusion{i, u->client_id, verdict.reason});
        continue;
      }
      u->accepted = Acceptance::kAccepted;
      txs[i].tx_id = compute_tx_id(txs[i]);
    }
    kept.push_back(std::move(txs[i]));
  }
  if (kept.empty()) {
    out.rejection = "no transactions left after validation";
    return out;
  }

  Block candidate = make_next_block(chain, std::move(kept),
                                    validators[out.proposer_index].id, sim_time);
  for (const auto& v : validators) {
    ++out.votes;
    if (approve_block(v, chain, candidate, policy)) ++out.approvals;
  }
  if (2 * out.approvals > out.votes) {
    chain.push(std::move(candidate));
    out.committed = true;
  } else {
    out.rejection = "approved by " + std::to_string(out.approvals) + " of " +
                    std::to_string(out.votes) + " validators";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gas

using GasTable = std::map<std::string, std::uint64_t>;

// Deployment costs as measured for the reference contracts; per-transaction
// costs are placeholders at the base transfer price.
inline GasTable default_gas_table() {
  return GasTable{{"migration", 164391},
                  {"federated_contract", 263330},
                  {"contribution_contract", 1018839},
                  {"Registration", 21000},
                  {"ModelUpdate", 21000},
                  {"Aggregation", 21000},
                  {"Reward", 21000}};
}

inline std::uint64_t gas_cost(const GasTable& table, const std::string& item) {
  auto it = table.find(item);
  if (it == table.end()) throw InvalidArgument("gas_cost: unknown item " + item);
  return it->second;
}

// Deployments are priced by label, everything else by kind.
inline std::string gas_item(const Transaction& tx) {
  if (const auto* d = std::get_if<Deployment>(&tx.payload)) return to_string(d->label);
  return to_string(tx.kind());
}

inline std::uint64_t tx_gas(const GasTable& table, const Transaction& tx) {
  return gas_cost(table, gas_item(tx));
}

inline std::uint64_t block_gas(const GasTable& table, const Block& b) {
  std::uint64_t total = 0;
  for (const auto& tx : b.body) total += tx_gas(table, tx);
  return total;
}

}  // namespace vfl
