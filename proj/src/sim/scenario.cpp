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

#include "p3/sim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

#include "p3/error.hpp"

namespace p3::sim {

namespace {

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

template <typename T>
T number(const std::string& s, std::size_t line, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(Errc::kScenario,
                "line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  }
  return v;
}

void apply_settings(node::NodeConfig& c, const std::vector<std::string>& words,
                    std::size_t from, std::size_t line) {
  for (std::size_t i = from; i < words.size(); ++i) {
    auto eq = words[i].find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::kScenario,
                  "line " + std::to_string(line) + ": expected key=value, got '" + words[i] + "'");
    }
    try {
      c.set(std::string_view(words[i]).substr(0, eq), std::string_view(words[i]).substr(eq + 1));
    } catch (const Error& e) {
      throw Error(Errc::kScenario, "line " + std::to_string(line) + ": " + e.what());
    }
  }
}

bool is_hex(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char ch) { return std::isxdigit(static_cast<unsigned char>(ch)); });
}

}  // namespace

ledger::DatumId datum_id_from_token(std::string_view token) {
  if (token.size() == 32 && is_hex(token)) return array_from_hex<16>(token);
  auto d = crypto::blake2s({as_bytes("p3/datum/"), as_bytes(token)});
  ledger::DatumId id{};
  std::copy_n(d.begin(), id.size(), id.begin());
  return id;
}

Scenario Scenario::parse(std::string_view text, const node::NodeConfig& base) {
  Scenario sc;
  node::NodeConfig defaults = base;
  std::map<std::string, std::size_t> declared;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    throw Error(Errc::kScenario, "line " + std::to_string(line_no) + ": " + why);
  };
  auto require_node = [&](const std::string& name) {
    if (!declared.contains(name)) fail("unknown node '" + name + "'");
  };

  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto w = split_words(line);
    if (w.empty()) continue;
    const auto& verb = w[0];

    if (verb == "seed") {
      if (w.size() != 2) fail("usage: seed <u64>");
      sc.config.seed = number<std::uint64_t>(w[1], line_no, "seed");
    } else if (verb == "duration") {
      if (w.size() != 2) fail("usage: duration <ticks>");
      sc.config.duration = number<std::int64_t>(w[1], line_no, "duration");
      if (sc.config.duration < 0) fail("negative duration");
    } else if (verb == "latency") {
      if (w.size() != 3) fail("usage: latency <min> <max>");
      sc.config.latency_min = number<std::int64_t>(w[1], line_no, "latency");
      sc.config.latency_max = number<std::int64_t>(w[2], line_no, "latency");
      if (sc.config.latency_min < 0 || sc.config.latency_min > sc.config.latency_max) {
        fail("bad latency bounds");
      }
    } else if (verb == "edge") {
      if (w.size() != 3) fail("usage: edge <a> <b>");
      require_node(w[1]);
      require_node(w[2]);
      sc.config.edges.emplace_back(w[1], w[2]);
    } else if (verb == "defaults") {
      apply_settings(defaults, w, 1, line_no);
    } else if (verb == "node") {
      if (w.size() < 2) fail("usage: node <name> [key=value ...]");
      const auto& name = w[1];
      if (declared.contains(name)) fail("duplicate node '" + name + "'");
      // Identities are matched as raw bytes in stores; no name may
      // contain another.
      for (const auto& [other, idx] : declared) {
        if (other.find(name) != std::string::npos || name.find(other) != std::string::npos) {
          fail("node names '" + name + "' and '" + other + "' overlap");
        }
      }
      NodeSpec spec{name, defaults};
      spec.config.identity_id = name;
      apply_settings(spec.config, w, 2, line_no);
      if (spec.config.n_min > spec.config.n_max) fail("n_min exceeds n_max");
      declared[name] = sc.config.nodes.size();
      sc.config.nodes.push_back(std::move(spec));
    } else if (verb == "datum") {
      if (w.size() != 3 && w.size() != 4) fail("usage: datum <owner> <datum> [size]");
      require_node(w[1]);
      DatumSpec d{w[1], datum_id_from_token(w[2]), 256};
      if (d.id == ledger::kFakeDatum) fail("the all-zero datum id is reserved");
      if (w.size() == 4) d.size = number<std::size_t>(w[3], line_no, "size");
      sc.datums.push_back(d);
    } else if (verb == "at") {
      if (w.size() < 4) fail("usage: at <tick> <node> <action> ...");
      Action a;
      a.line = line_no;
      a.time = number<std::int64_t>(w[1], line_no, "tick");
      if (a.time < 0) fail("negative tick");
      a.node = w[2];
      require_node(a.node);
      const auto& what = w[3];
      if (what == "request") {
        if (w.size() < 6) fail("usage: at <tick> <node> request <owner> <datum> [purpose]");
        a.kind = Action::Kind::kRequest;
        a.owner = w[4];
        require_node(a.owner);
        if (a.owner == a.node) fail("a node cannot request from itself");
        a.datum = datum_id_from_token(w[5]);
        for (std::size_t i = 6; i < w.size(); ++i) {
          if (i > 6) a.purpose += ' ';
          a.purpose += w[i];
        }
      } else if (what == "fake") {
        if (w.size() != 5) fail("usage: at <tick> <node> fake <owner>");
        a.kind = Action::Kind::kFake;
        a.owner = w[4];
        require_node(a.owner);
        if (a.owner == a.node) fail("a node cannot request from itself");
      } else if (what == "erase") {
        if (w.size() != 5) fail("usage: at <tick> <node> erase <pseudonym-hex|last>");
        a.kind = Action::Kind::kErase;
        a.pseudonym = w[4];
        if (a.pseudonym != "last" && (a.pseudonym.size() != 64 || !is_hex(a.pseudonym))) {
          fail("bad pseudonym '" + a.pseudonym + "'");
        }
      } else if (what == "crash" || what == "restore") {
        if (w.size() != 4) fail("usage: at <tick> <node> " + what);
        a.kind = what == "crash" ? Action::Kind::kCrash : Action::Kind::kRestore;
      } else {
        fail("unknown action '" + what + "'");
      }
      sc.actions.push_back(a);
    } else {
      fail("unknown directive '" + verb + "'");
    }
  }
  if (sc.config.nodes.empty()) throw Error(Errc::kScenario, "scenario declares no nodes");
  return sc;
}

Bytes datum_bytes(std::uint64_t seed, const DatumSpec& d) {
  Rng rng(seed);
  return rng.fork("datum/" + d.owner + "/" + to_hex(d.id)).bytes(d.size);
}

std::unique_ptr<Simulator> run_scenario(const Scenario& scenario) {
  auto sim = std::make_unique<Simulator>(scenario.config);
  for (const auto& d : scenario.datums) {
    sim->node(d.owner).put_datum(d.id, datum_bytes(scenario.config.seed, d));
  }
  Simulator* s = sim.get();
  for (const auto& a : scenario.actions) {
    sim->at(a.time, [s, a] {
      auto& n = s->node(a.node);
      if (n.crashed() && a.kind != Action::Kind::kRestore) return;
      switch (a.kind) {
        case Action::Kind::kRequest:
          n.request_datum(a.owner, a.datum, a.purpose);
          break;
        case Action::Kind::kFake:
          n.request_fake(a.owner);
          break;
        case Action::Kind::kErase: {
          std::optional<crypto::Pseudonym> target;
          if (a.pseudonym == "last") {
            const auto& entries = n.keystore().entries();
            for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
              if (!it->erased && it->role == keystore::Role::kConsumer) {
                target = it->pseudonym;
                break;
              }
            }
            if (!target) {
              throw Error(Errc::kScenario, "line " + std::to_string(a.line) + ": " + a.node +
                                               " has nothing to erase");
            }
          } else {
            target = crypto::Pseudonym::from_hex(a.pseudonym);
          }
          try {
            n.request_erasure(*target);
          } catch (const Error& e) {
            throw Error(Errc::kScenario, "line " + std::to_string(a.line) + ": " + e.what());
          }
          break;
        }
        case Action::Kind::kCrash:
          n.crash();
          break;
        case Action::Kind::kRestore:
          n.restore();
          break;
      }
    });
  }
  sim->start_nodes();
  sim->finish();
  return sim;
}

}  // namespace p3::sim
