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
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vfl {

// Raised when an argument violates an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using ClientId = std::string;

// Flat model parameters. For the linear softmax model the layout is
// class-major: for each class c, `features` weights followed by its bias.
class ParameterVector {
 public:
  ParameterVector() = default;
  explicit ParameterVector(std::size_t dim, double fill = 0.0)
      : values_(dim, fill) {}
  explicit ParameterVector(std::vector<double> values)
      : values_(std::move(values)) {}
  ParameterVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  const std::vector<double>& values() const { return values_; }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  bool all_finite() const {
    for (double v : values_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  double l2_norm() const {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
  }

  friend bool operator==(const ParameterVector&,
                         const ParameterVector&) = default;

 private:
  std::vector<double> values_;
};

// (epsilon, delta) budget of one Gaussian-mechanism release together with
// the L2 sensitivity bound `clip_norm` the release was clipped to.
struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-5;
  double clip_norm = 1.0;

  void validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw InvalidArgument("privacy: epsilon must be positive and finite");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
      throw InvalidArgument("privacy: delta must lie in (0, 1)");
    }
    if (!(clip_norm > 0.0) || !std::isfinite(clip_norm)) {
      throw InvalidArgument("privacy: clip_norm must be positive and finite");
    }
  }

  friend bool operator==(const PrivacyParams&, const PrivacyParams&) = default;
};

enum class Acceptance { kPending, kAccepted, kRejected };

inline const char* to_string(Acceptance a) {
  switch (a) {
    case Acceptance::kPending:
      return "pending";
    case Acceptance::kAccepted:
      return "accepted";
    case Acceptance::kRejected:
      return "rejected";
  }
  return "pending";
}

inline Acceptance acceptance_from_string(const std::string& s) {
  if (s == "pending") return Acceptance::kPending;
  if (s == "accepted") return Acceptance::kAccepted;
  if (s == "rejected") return Acceptance::kRejected;
  throw InvalidArgument("unknown acceptance state: " + s);
}

// One client's contribution to round `round`: parameters after clipping and
// noising, the local sample count used as aggregation weight, and the
// privacy parameters the client claims to have applied.
struct ClientUpdate {
  ClientId client_id;
  std::uint64_t round = 0;
  ParameterVector params;
  std::uint64_t sample_count = 1;
  std::optional<PrivacyParams> privacy_tag;
  Acceptance accepted = Acceptance::kPending;

  friend bool operator==(const ClientUpdate&, const ClientUpdate&) = default;
};

}  // namespace vfl
