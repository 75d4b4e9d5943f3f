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

// Discrete-event model of V2I message exchange.
//
// A message's fate (drop or delivery delay) is drawn from the simulator's
// seeded stream when it is sent. Two events are queued per message: the
// transmission at send_time and, if not dropped, the delivery. Events run in
// (time, sequence) order, so simultaneous events keep insertion order.
//
// Metrics:
//   pdr            = delivered / sent, and 1.0 when nothing was sent
//   overhead_ratio = sum(overhead) / sum(overhead + payload) over *sent*
//                    messages; header bytes are spent whether or not the
//                    frame arrives.
// The per-second samples cover the messages transmitted inside each
// one-second window, with the window PDR counting messages not dropped.

#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "vfl/rng.hpp"
#include "vfl/types.hpp"

namespace vfl {

struct LinkModel {
  double drop_probability = 0.0;
  std::uint64_t delay_min_ms = 1;
  std::uint64_t delay_max_ms = 10;
  std::uint64_t overhead_bytes_per_msg = 30;

  void validate() const {
    if (!(drop_probability >= 0.0 && drop_probability <= 1.0)) {
      throw InvalidArgument("link: drop_probability must lie in [0, 1]");
    }
    if (delay_min_ms > delay_max_ms) throw InvalidArgument("link: delay min > max");
  }
};

enum class MessageKind { kModelDownload, kUpdateUpload, kControl };

struct Message {
  std::string src;
  std::string dst;
  std::uint64_t payload_bytes = 0;
  MessageKind kind = MessageKind::kControl;
  std::uint64_t send_time = 0;  // ms
};

struct SendRecord {
  std::uint64_t id = 0;
  bool dropped = false;
  std::uint64_t send_time = 0;
  std::uint64_t deliver_time = 0;  // meaningful only when not dropped
};

struct MetricSample {
  std::uint64_t second = 0;  // window [second, second + 1) in simulated seconds
  std::uint64_t sent = 0;
  double pdr = 1.0;
  double overhead_ratio = 0.0;
};

struct NetMetrics {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;
  std::uint64_t payload_bytes = 0;
  std::uint64_t overhead_bytes = 0;
  double pdr = 1.0;
  double overhead_ratio = 0.0;
  std::vector<MetricSample> samples;
};

class NetworkSimulator {
 public:
  NetworkSimulator(LinkModel link, std::uint64_t seed) : link_(link), rng_(seed) {
    link_.validate();
  }

  void add_node(const std::string& id) { nodes_.insert(id); }
  bool has_node(const std::string& id) const { return nodes_.contains(id); }

  std::uint64_t now() const { return now_; }
  const LinkModel& link() const { return link_; }

  // Registers a callback run when a message is delivered.
  void on_delivery(std::function<void(std::uint64_t id, const Message&)> cb) {
    delivery_cb_ = std::move(cb);
  }

  SendRecord send(const Message& msg) {
    if (!has_node(msg.src)) throw InvalidArgument("netsim: unknown node " + msg.src);
    if (!has_node(msg.dst)) throw InvalidArgument("netsim: unknown node " + msg.dst);
    if (msg.send_time < now_) throw InvalidArgument("netsim: send_time in the past");

    SendRecord rec;
    rec.id = next_message_id_++;
    rec.send_time = msg.send_time;
    rec.dropped = rng_.bernoulli(link_.drop_probability);
    if (!rec.dropped) {
      const std::uint64_t span = link_.delay_max_ms - link_.delay_min_ms + 1;
      rec.deliver_time = msg.send_time + link_.delay_min_ms + rng_.uniform_index(span);
    }
    messages_.emplace(rec.id, Pending{msg, rec});
    push_event(msg.send_time, EventKind::kTransmit, rec.id);
    if (!rec.dropped) push_event(rec.deliver_time, EventKind::kDeliver, rec.id);
    return rec;
  }

  // Processes every event with time <= t_end and advances the clock to t_end.
  NetMetrics run_until(std::uint64_t t_end) {
    if (t_end < now_) throw InvalidArgument("netsim: run_until into the past");
    while (!queue_.empty() && queue_.top().time <= t_end) {
      const Event ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      process(ev);
    }
    now_ = t_end;
    return metrics();
  }

  NetMetrics metrics() const {
    NetMetrics m = totals_;
    m.pdr = m.sent == 0 ? 1.0
                        : static_cast<double>(m.delivered) / static_cast<double>(m.sent);
    const std::uint64_t bytes = m.overhead_bytes + m.payload_bytes;
    m.overhead_ratio =
        bytes == 0 ? 0.0 : static_cast<double>(m.overhead_bytes) / static_cast<double>(bytes);
    m.samples.reserve(windows_.size());
    for (const auto& [second, w] : windows_) {
      MetricSample s;
      s.second = second;
      s.sent = w.sent;
      s.pdr = w.sent == 0 ? 1.0
                          : static_cast<double>(w.sent - w.dropped) / static_cast<double>(w.sent);
      const std::uint64_t wb = w.overhead_bytes + w.payload_bytes;
      s.overhead_ratio =
          wb == 0 ? 0.0 : static_cast<double>(w.overhead_bytes) / static_cast<double>(wb);
      m.samples.push_back(s);
    }
    return m;
  }

 private:
  enum class EventKind { kTransmit, kDeliver };

  struct Event {
    std::uint64_t time;
    std::uint64_t seq;
    EventKind kind;
    std::uint64_t message_id;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };
  struct Pending {
    Message msg;
    SendRecord rec;
  };
  struct Window {
    std::uint64_t sent = 0;
    std::uint64_t dropped = 0;
    std::uint64_t payload_bytes = 0;
    std::uint64_t overhead_bytes = 0;
  };

  void push_event(std::uint64_t time, EventKind kind, std::uint64_t id) {
    queue_.push(Event{time, next_seq_++, kind, id});
  }

  void process(const Event& ev) {
    auto it = messages_.find(ev.message_id);
    if (it == messages_.end()) return;
    const Pending& p = it->second;
    if (ev.kind == EventKind::kTransmit) {
      ++totals_.sent;
      totals_.payload_bytes += p.msg.payload_bytes;
      totals_.overhead_bytes += link_.overhead_bytes_per_msg;
      Window& w = windows_[ev.time / 1000];
      ++w.sent;
      w.payload_bytes += p.msg.payload_bytes;
      w.overhead_bytes += link_.overhead_bytes_per_msg;
      if (p.rec.dropped) {
        ++totals_.dropped;
        ++w.dropped;
        messages_.erase(it);
      } else {
        ++totals_.in_flight;
      }
      return;
    }
    --totals_.in_flight;
    ++totals_.delivered;
    const Message msg = p.msg;
    messages_.erase(it);
    if (delivery_cb_) delivery_cb_(ev.message_id, msg);
  }

  LinkModel link_;
  CounterRng rng_;
  std::set<std::string> nodes_;
  std::uint64_t now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_message_id_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::map<std::uint64_t, Pending> messages_;
  std::map<std::uint64_t, Window> windows_;
  NetMetrics totals_;
  std::function<void(std::uint64_t, const Message&)> delivery_cb_;
};

// The shipped V2I scenario: vehicles beacon 100-byte frames with 30 bytes of
// MAC/PHY header to their roadside unit every 100 ms. During the first 17 s
// the routing layer also floods header-only control frames while the
// topology settles, so the overhead ratio starts high and falls into the
// steady band afterwards.
struct V2iScenario {
  std::uint32_t vehicles = 20;
  std::uint32_t rsus = 2;
  std::uint64_t duration_ms = 100'000;
  std::uint64_t beacon_period_ms = 100;
  std::uint64_t payload_bytes = 100;
  std::uint64_t warmup_ms = 17'000;
  std::uint64_t control_period_ms = 250;
  LinkModel link{0.1, 1, 20, 30};
  std::uint64_t seed = 1;
};

inline NetMetrics run_v2i_scenario(const V2iScenario& sc) {
  NetworkSimulator sim(sc.link, sc.seed);
  std::vector<std::string> vehicles;
  for (std::uint32_t v = 0; v < sc.vehicles; ++v) {
    vehicles.push_back("vehicle-" + std::to_string(v));
    sim.add_node(vehicles.back());
  }
  std::vector<std::string> rsus;
  for (std::uint32_t r = 0; r < sc.rsus; ++r) {
    rsus.push_back("rsu-" + std::to_string(r));
    sim.add_node(rsus.back());
  }
  // Schedule one second at a time so the queue stays small.
  for (std::uint64_t window = 0; window < sc.duration_ms; window += 1000) {
    const std::uint64_t end = std::min(window + 1000, sc.duration_ms);
    for (std::uint64_t t = window; t < end; t += sc.beacon_period_ms) {
      for (std::size_t v = 0; v < vehicles.size(); ++v) {
        sim.send(Message{vehicles[v], rsus[v % rsus.size()], sc.payload_bytes,
                         MessageKind::kUpdateUpload, t});
      }
    }
    if (window < sc.warmup_ms) {
      for (std::uint64_t t = window; t < std::min(end, sc.warmup_ms); t += sc.control_period_ms) {
        for (std::size_t v = 0; v < vehicles.size(); ++v) {
          sim.send(Message{vehicles[v], rsus[v % rsus.size()], 0, MessageKind::kControl, t});
        }
      }
    }
    sim.run_until(end - 1);
  }
  return sim.run_until(sc.duration_ms + sc.link.delay_max_ms);
}

}  // namespace vfl
