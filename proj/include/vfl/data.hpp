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
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>
#include <vector>

#include "vfl/config.hpp"
#include "vfl/fl_core.hpp"
#include "vfl/hash.hpp"
#include "vfl/rng.hpp"

namespace vfl {

// seed_{k,t}: first 8 bytes (big-endian) of
// SHA-256(master_seed as u64 BE || client_id bytes || round as u64 BE).
inline std::uint64_t derive_client_seed(std::uint64_t master_seed, const ClientId& client,
                                        std::uint64_t round) {
  std::string buf;
  append_u64_be(buf, master_seed);
  buf += client;
  append_u64_be(buf, round);
  return digest_prefix_u64(sha256(buf));
}

inline std::string client_name(std::uint32_t index, std::uint32_t count) {
  const int width = std::max<int>(3, static_cast<int>(std::to_string(count - 1).size()));
  std::string digits = std::to_string(index);
  return "vehicle-" + std::string(width - digits.size(), '0') + digits;
}

namespace seed_tag {
inline constexpr std::uint64_t kClassMeans = 0x6d65616e73;  // "means"
inline constexpr std::uint64_t kSamples = 0x73616d706c;     // "sampl"
inline constexpr std::uint64_t kHoldout = 0x686f6c64;       // "hold"
inline constexpr std::uint64_t kNoise = 0x6e6f697365;       // "noise"
inline constexpr std::uint64_t kNetwork = 0x6e6574;         // "net"
}  // namespace seed_tag

// Class c is centered at separation * u_c, u_c a seeded random unit vector
// shared by all clients; samples add N(0, I) and labels are uniform.
inline std::vector<LocalDataset> generate_synthetic(const SyntheticSpec& spec,
                                                    std::uint32_t clients,
                                                    std::uint64_t master_seed) {
  if (spec.features == 0 || spec.classes < 2 || spec.samples_per_client == 0 ||
      clients == 0 || !(spec.separation >= 0.0)) {
    throw InvalidArgument("generate_synthetic: invalid shape parameters");
  }
  std::vector<std::vector<double>> means(spec.classes, std::vector<double>(spec.features));
  CounterRng mean_rng(mix_seed(master_seed, seed_tag::kClassMeans));
  for (auto& m : means) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : m) {
        v = mean_rng.standard_normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& v : m) v = spec.separation * v / norm;
  }

  std::vector<LocalDataset> out;
  out.reserve(clients);
  for (std::uint32_t k = 0; k < clients; ++k) {
    LocalDataset d;
    d.client_id = client_name(k, clients);
    d.features = spec.features;
    CounterRng rng(derive_client_seed(mix_seed(master_seed, seed_tag::kSamples), d.client_id, 0));
    d.x.reserve(std::size_t{spec.samples_per_client} * spec.features);
    d.labels.reserve(spec.samples_per_client);
    for (std::uint32_t i = 0; i < spec.samples_per_client; ++i) {
      const auto label = static_cast<std::uint32_t>(rng.uniform_index(spec.classes));
      d.labels.push_back(label);
      for (std::uint32_t j = 0; j < spec.features; ++j) {
        d.x.push_back(means[label][j] + rng.standard_normal());
      }
    }
    out.push_back(std::move(d));
  }
  return out;
}

// ---------------------------------------------------------------------------
// IDX container (big-endian): u32 magic, u32 dims..., then u8 payload.

enum class IdxErrorCode { kOpen, kWrongMagic, kTruncated, kCountMismatch };

class IdxError : public std::runtime_error {
 public:
  IdxError(IdxErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  IdxErrorCode code() const { return code_; }

 private:
  IdxErrorCode code_;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

namespace detail {

inline std::vector<std::uint8_t> read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxErrorCode::kOpen, "cannot open " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

inline std::uint32_t read_u32_be(const std::vector<std::uint8_t>& b, std::size_t off,
                                 const std::string& path) {
  if (b.size() < off + 4) throw IdxError(IdxErrorCode::kTruncated, path + ": truncated header");
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

}  // namespace detail

// Pixels are scaled from [0, 255] to [0, 1].
inline LocalDataset load_idx(const std::string& images_path, const std::string& labels_path) {
  const auto img = detail::read_binary(images_path);
  const auto lab = detail::read_binary(labels_path);

  if (detail::read_u32_be(img, 0, images_path) != kIdxImagesMagic) {
    throw IdxError(IdxErrorCode::kWrongMagic, images_path + ": not an IDX image file");
  }
  if (detail::read_u32_be(lab, 0, labels_path) != kIdxLabelsMagic) {
    throw IdxError(IdxErrorCode::kWrongMagic, labels_path + ": not an IDX label file");
  }
  const std::uint64_t count = detail::read_u32_be(img, 4, images_path);
  const std::uint64_t rows = detail::read_u32_be(img, 8, images_path);
  const std::uint64_t cols = detail::read_u32_be(img, 12, images_path);
  const std::uint64_t label_count = detail::read_u32_be(lab, 4, labels_path);
  if (count != label_count) {
    throw IdxError(IdxErrorCode::kCountMismatch,
                   "image count " + std::to_string(count) + " != label count " +
                       std::to_string(label_count));
  }
  const std::uint64_t pixels = rows * cols;
  if (pixels == 0) throw IdxError(IdxErrorCode::kTruncated, images_path + ": zero-size images");
  if (img.size() < 16 + count * pixels) {
    throw IdxError(IdxErrorCode::kTruncated, images_path + ": truncated pixel data");
  }
  if (lab.size() < 8 + count) {
    throw IdxError(IdxErrorCode::kTruncated, labels_path + ": truncated label data");
  }

  LocalDataset d;
  d.client_id = "idx";
  d.features = static_cast<std::size_t>(pixels);
  d.x.resize(count * pixels);
  for (std::uint64_t i = 0; i < count * pixels; ++i) d.x[i] = img[16 + i] / 255.0;
  d.labels.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) d.labels[i] = lab[8 + i];
  return d;
}

// ---------------------------------------------------------------------------
// Partitioning

struct PartitionedData {
  std::vector<LocalDataset> clients;  // training portion per client
  LocalDataset holdout;
  std::size_t classes = 0;
};

namespace detail {

inline LocalDataset take_rows(const LocalDataset& src, std::span<const std::size_t> rows,
                              ClientId id) {
  LocalDataset d;
  d.client_id = std::move(id);
  d.features = src.features;
  d.x.reserve(rows.size() * src.features);
  d.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    const auto row = src.row(r);
    d.x.insert(d.x.end(), row.begin(), row.end());
    d.labels.push_back(src.labels[r]);
  }
  return d;
}

inline std::size_t holdout_count(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction));
}

}  // namespace detail

// Seeded split of each dataset into a held-out part (fraction of its rows)
// and a training part.
inline PartitionedData split_holdout(const std::vector<LocalDataset>& full, double fraction,
                                     std::uint64_t master_seed) {
  PartitionedData out;
  std::vector<LocalDataset> held;
  for (const auto& d : full) {
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    CounterRng rng(derive_client_seed(mix_seed(master_seed, seed_tag::kHoldout), d.client_id, 0));
    rng.shuffle(std::span<std::size_t>(order));
    const std::size_t h = detail::holdout_count(d.size(), fraction);
    if (h >= d.size()) throw InvalidArgument("split_holdout: no training rows left");
    const auto view = std::span<const std::size_t>(order);
    held.push_back(detail::take_rows(d, view.first(h), d.client_id));
    out.clients.push_back(detail::take_rows(d, view.subspan(h), d.client_id));
  }
  out.holdout = concatenate(held, "holdout");
  return out;
}

inline std::size_t max_label(const LocalDataset& d) {
  std::size_t m = 0;
  for (auto l : d.labels) m = std::max<std::size_t>(m, l);
  return m;
}

// Builds the per-client training sets and the held-out set for a config.
inline PartitionedData prepare_data(const ExperimentConfig& cfg) {
  if (const auto* s = std::get_if<SyntheticSpec>(&cfg.dataset)) {
    PartitionedData p = split_holdout(generate_synthetic(*s, cfg.clients, cfg.master_seed),
                                      cfg.holdout_fraction, cfg.master_seed);
    p.classes = s->classes;
    return p;
  }
  const auto& spec = std::get<IdxSpec>(cfg.dataset);
  const LocalDataset pool = load_idx(spec.images, spec.labels);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  CounterRng rng(mix_seed(cfg.master_seed, seed_tag::kHoldout));
  rng.shuffle(std::span<std::size_t>(order));

  PartitionedData out;
  std::span<const std::size_t> remaining(order);
  if (!spec.test_images.empty()) {
    out.holdout = load_idx(spec.test_images, spec.test_labels);
    out.holdout.client_id = "holdout";
    if (out.holdout.features != pool.features) {
      throw ConfigError("idx: test images have a different shape");
    }
  } else {
    const std::size_t h = detail::holdout_count(pool.size(), cfg.holdout_fraction);
    out.holdout = detail::take_rows(pool, remaining.first(h), "holdout");
    remaining = remaining.subspan(h);
  }
  const std::uint64_t needed =
      std::accumulate(spec.partition.begin(), spec.partition.end(), std::uint64_t{0});
  if (needed > remaining.size()) {
    throw ConfigError("idx: partition sizes (" + std::to_string(needed) +
                      ") exceed the available training rows (" +
                      std::to_string(remaining.size()) + ")");
  }
  for (std::uint32_t k = 0; k < spec.partition.size(); ++k) {
    const auto n = static_cast<std::size_t>(spec.partition[k]);
    out.clients.push_back(
        detail::take_rows(pool, remaining.first(n), client_name(k, cfg.clients)));
    remaining = remaining.subspan(n);
  }
  std::size_t top = max_label(out.holdout);
  for (const auto& c : out.clients) top = std::max(top, max_label(c));
  out.classes = std::max<std::size_t>(2, top + 1);
  return out;
}

}  // namespace vfl
