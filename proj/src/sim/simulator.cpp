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

#include "p3/sim/simulator.hpp"

#include <algorithm>
#include <sstream>

#include "p3/error.hpp"

namespace p3::sim {

std::string ObserverTrace::export_text() const {
  std::ostringstream out;
  std::size_t e = 0;
  std::size_t b = 0;
  // Merge both streams by time; envelopes first on ties.
  while (e < envelopes.size() || b < blocks.size()) {
    const bool take_envelope =
        b == blocks.size() || (e < envelopes.size() && envelopes[e].time <= blocks[b].time);
    if (take_envelope) {
      const auto& r = envelopes[e++];
      out << "E " << r.time << ' ' << r.src << ' ' << r.dst << ' '
          << protocol::msg_type_name(r.type) << ' ' << r.size << ' ' << r.flow << '\n';
    } else {
      const auto& s = blocks[b++];
      out << "B " << s.time << ' ' << to_hex(s.hash) << '\n';
    }
  }
  return out.str();
}

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)), rng_(cfg_.seed) {
  if (cfg_.latency_min < 0 || cfg_.latency_min > cfg_.latency_max) {
    throw Error(Errc::kScenario, "bad latency bounds");
  }
  for (const auto& spec : cfg_.nodes) {
    if (spec.name.empty() || index_.contains(spec.name)) {
      throw Error(Errc::kScenario, "duplicate or empty node name '" + spec.name + "'");
    }
    auto config = spec.config;
    config.identity_id = spec.name;
    index_[spec.name] = nodes_.size();
    nodes_.push_back(
        std::make_unique<node::Node>(std::move(config), rng_.fork("node/" + spec.name), *this));
  }
  for (const auto& [a, b] : cfg_.edges) {
    if (!index_.contains(a) || !index_.contains(b)) {
      throw Error(Errc::kScenario, "edge " + a + " - " + b + " names an unknown node");
    }
    edges_.insert({a, b});
    edges_.insert({b, a});
  }
  for (auto& n : nodes_) {
    for (const auto& m : nodes_) n->pin_peer(m->id(), m->identity().keys.public_key);
    if (!edges_.empty()) {
      std::vector<std::string> nb;
      for (const auto& [a, b] : edges_) {
        if (a == n->id()) nb.push_back(b);
      }
      n->set_neighbors(std::move(nb));
    }
  }
}

Simulator::~Simulator() = default;

node::Node& Simulator::node(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(Errc::kScenario, "unknown node " + name);
  return *nodes_[it->second];
}

const node::Node& Simulator::node(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(Errc::kScenario, "unknown node " + name);
  return *nodes_[it->second];
}

std::vector<std::string> Simulator::names() const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) out.push_back(n->id());
  return out;
}

void Simulator::push(std::int64_t time, std::function<void()> fn) {
  queue_.push(Event{time, seq_++, std::move(fn)});
}

bool Simulator::adjacent(const std::string& a, const std::string& b) const {
  return edges_.empty() || edges_.contains({a, b});
}

void Simulator::send(const std::string& from, const std::string& to, Bytes wire) {
  if (!index_.contains(to) || !adjacent(from, to)) {
    ++dropped_;
    return;
  }
  const auto latency = static_cast<std::int64_t>(rng_.uniform(
      static_cast<std::uint64_t>(cfg_.latency_min), static_cast<std::uint64_t>(cfg_.latency_max)));
  // Links are FIFO, like the stream channels they stand in for.
  auto& last = link_clock_[{from, to}];
  last = std::max(last, now_ + latency);
  push(last, [this, from, to, wire = std::move(wire)] {
    auto& dst = node(to);
    if (dst.crashed()) {
      ++dropped_;
      return;
    }
    observe(from, to, wire);
    dst.deliver(from, wire);
  });
}

void Simulator::observe(const std::string& from, const std::string& to, ByteView wire) {
  protocol::Envelope env;
  try {
    env = protocol::Envelope::decode(wire);
  } catch (const DecodeError&) {
    return;
  }
  if (env.type == protocol::MsgType::kBlock) {
    if (env.body.empty() || env.body[0] != 1) return;
    try {
      auto block = ledger::Block::parse(ByteView(env.body).subspan(1));
      auto h = ledger::block_hash(block);
      if (seen_blocks_.insert(h).second) trace_.blocks.push_back({now_, h});
    } catch (const Error&) {
    }
    return;
  }
  auto [it, fresh] = flow_ids_.try_emplace(env.session_id, flow_ids_.size() + 1);
  if (fresh) {
    FlowTruth t;
    t.session_id = env.session_id;
    t.erasure = env.type == protocol::MsgType::kEraseRequest ||
                env.type == protocol::MsgType::kEraseAck;
    if (env.type == protocol::MsgType::kRequest) {
      t.consumer = from;
      t.owner = to;
      try {
        t.fake = protocol::Request::decode(env.body).datum_id == ledger::kFakeDatum;
      } catch (const Error&) {
      }
    } else {
      t.consumer = to;
      t.owner = from;
    }
    flows_[it->second] = t;
  }
  trace_.envelopes.push_back({now_, from, to, env.type, wire.size(), it->second});
}

void Simulator::schedule(const std::string&, std::int64_t delay, std::function<void()> fn) {
  push(now_ + std::max<std::int64_t>(0, delay), std::move(fn));
}

void Simulator::at(std::int64_t t, std::function<void()> fn) {
  push(std::max(t, now_), std::move(fn));
}

void Simulator::run_until(std::int64_t t) {
  while (!queue_.empty() && queue_.top().time <= t) {
    // Copy out before pop: the handler may push.
    auto ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ev.fn();
  }
  now_ = std::max(now_, t);
}

void Simulator::start_nodes() {
  for (auto& n : nodes_) n->start();
}

void Simulator::finish() {
  run_until(cfg_.duration);
  for (auto& n : nodes_) n->stop();
  const auto limit = cfg_.duration + cfg_.drain_limit;
  while (!queue_.empty() && queue_.top().time <= limit) run_until(queue_.top().time);
}

bool Simulator::converged() const {
  std::optional<Digest> tip;
  for (const auto& n : nodes_) {
    if (n->crashed()) continue;
    if (tip && *tip != n->tip()) return false;
    tip = n->tip();
  }
  return true;
}

}  // namespace p3::sim
