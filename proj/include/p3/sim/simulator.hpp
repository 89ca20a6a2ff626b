// Copyright 2026 The P3 Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "p3/node/node.hpp"

namespace p3::sim {

using crypto::Digest;

struct NodeSpec {
  std::string name;
  node::NodeConfig config;
};

struct SimConfig {
  std::uint64_t seed = 1;
  std::vector<NodeSpec> nodes;
  // Empty means full mesh.
  std::vector<std::pair<std::string, std::string>> edges;
  std::int64_t duration = 1000;
  std::int64_t latency_min = 1;
  std::int64_t latency_max = 5;
  // After `duration`, decoy traffic stops and the queue drains for at
  // most this many ticks.
  std::int64_t drain_limit = 5000;
};

// One delivered envelope as seen on the wire. Metadata only: the observer
// never gets envelope bodies. `flow` is an opaque number shared by all
// messages of one session.
struct TraceRecord {
  std::int64_t time = 0;
  std::string src;
  std::string dst;
  protocol::MsgType type = protocol::MsgType::kRequest;
  std::size_t size = 0;
  std::uint64_t flow = 0;
};

// First time a block appeared on the network. Block gossip is relayed, so
// who sent it carries no information and is not recorded.
struct BlockSighting {
  std::int64_t time = 0;
  Digest hash{};
};

struct ObserverTrace {
  std::vector<TraceRecord> envelopes;
  std::vector<BlockSighting> blocks;

  // Line-delimited, fixed column order:
  //   E <time> <src> <dst> <type> <size> <flow>
  //   B <time> <block-hash>
  std::string export_text() const;
};

// Harness-side ground truth for a flow. Not part of the observer view.
struct FlowTruth {
  protocol::SessionId session_id{};
  std::string consumer;
  std::string owner;
  bool fake = false;
  bool erasure = false;
};

class Simulator final : public node::Network {
 public:
  // Builds every node (identity keys come from the seed) and pins all
  // identities everywhere. Throws Errc::kScenario for duplicate names,
  // unknown edge endpoints or bad latency bounds.
  explicit Simulator(SimConfig cfg);
  ~Simulator() override;

  std::int64_t now() const override { return now_; }
  void send(const std::string& from, const std::string& to, Bytes wire) override;
  void schedule(const std::string& node, std::int64_t delay, std::function<void()> fn) override;

  const SimConfig& config() const { return cfg_; }
  node::Node& node(const std::string& name);
  const node::Node& node(const std::string& name) const;
  bool has_node(const std::string& name) const { return index_.contains(name); }
  std::vector<std::string> names() const;

  // Runs fn at absolute time t (not before now).
  void at(std::int64_t t, std::function<void()> fn);
  // Processes every event with time <= t.
  void run_until(std::int64_t t);
  // Starts every node's decoy scheduler.
  void start_nodes();
  // Runs to the configured duration, silences decoys and drains.
  void finish();

  const ObserverTrace& trace() const { return trace_; }
  const std::map<std::uint64_t, FlowTruth>& flows() const { return flows_; }
  std::size_t dropped() const { return dropped_; }
  std::size_t pending_events() const { return queue_.size(); }

  // True when every node that is up has the same tip.
  bool converged() const;

 private:
  struct Event {
    std::int64_t time;
    std::uint64_t seq;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  void push(std::int64_t time, std::function<void()> fn);
  bool adjacent(const std::string& a, const std::string& b) const;
  void observe(const std::string& from, const std::string& to, ByteView wire);

  SimConfig cfg_;
  Rng rng_;
  std::int64_t now_ = 0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::vector<std::unique_ptr<node::Node>> nodes_;
  std::map<std::string, std::size_t> index_;
  std::set<std::pair<std::string, std::string>> edges_;
  std::map<std::pair<std::string, std::string>, std::int64_t> link_clock_;
  ObserverTrace trace_;
  std::set<Digest> seen_blocks_;
  std::map<protocol::SessionId, std::uint64_t> flow_ids_;
  std::map<std::uint64_t, FlowTruth> flows_;
  std::size_t dropped_ = 0;
};

}  // namespace p3::sim
