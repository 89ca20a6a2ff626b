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

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "p3/sim/simulator.hpp"

namespace p3::sim {

// Scenario files, one directive per line, '#' comments:
//
//   seed <u64>
//   duration <ticks>
//   latency <min> <max>
//   edge <a> <b>                      (any edge switches off the full mesh)
//   defaults <key>=<value> ...        (applies to nodes declared later)
//   node <name> [<key>=<value> ...]
//   datum <owner> <datum> [<size>]
//   at <tick> <node> request <owner> <datum> [<purpose words>]
//   at <tick> <node> fake <owner>
//   at <tick> <node> erase <pseudonym-hex | last>
//   at <tick> <node> crash | restore
//
// A <datum> is 32 hex digits or a name; names map to the first 16 bytes of
// BLAKE2s("p3/datum/" || name).

struct DatumSpec {
  std::string owner;
  ledger::DatumId id{};
  std::size_t size = 256;
};

struct Action {
  enum class Kind { kRequest, kFake, kErase, kCrash, kRestore };
  std::int64_t time = 0;
  std::string node;
  Kind kind = Kind::kRequest;
  std::string owner;
  ledger::DatumId datum{};
  std::string purpose;
  std::string pseudonym;  // hex or "last"
  std::size_t line = 0;
};

struct Scenario {
  SimConfig config;
  std::vector<DatumSpec> datums;
  std::vector<Action> actions;

  // Throws Errc::kScenario with the offending line number. `base` is the
  // starting point for every node before `defaults` lines and per-node
  // settings apply.
  static Scenario parse(std::string_view text, const node::NodeConfig& base = {});
};

ledger::DatumId datum_id_from_token(std::string_view token);

// Builds the simulator, installs data, schedules the script and runs it to
// the end. Script actions that cannot run (e.g. `erase last` with nothing
// to erase) throw Errc::kScenario.
std::unique_ptr<Simulator> run_scenario(const Scenario& scenario);

// Deterministic content for a scripted datum.
Bytes datum_bytes(std::uint64_t seed, const DatumSpec& d);

}  // namespace p3::sim
