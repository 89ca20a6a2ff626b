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
#include <optional>

#include "p3/protocol/session.hpp"

namespace p3::protocol {

// Runs one session between two in-process parties without a network. The
// consumer can be told to stop after receiving share k: it withholds that
// acknowledgment, the owner times out, and the consumer tries to compose
// whatever it has.
struct Parties {
  const Identity* consumer = nullptr;
  const Identity* owner = nullptr;
  const TrustStore* owner_trust = nullptr;
  DatumLookup datums;
  OwnerPolicy policy;
};

struct RunOptions {
  std::optional<std::uint32_t> stop_after;
};

struct RunResult {
  ConsumerSession consumer;
  OwnerSession owner;
  std::uint32_t share_messages = 0;
  std::uint32_t ack_messages = 0;
  bool end_sent = false;
  // What the consumer holds at the end, by honest finalization or by
  // composing early.
  std::optional<Bytes> datum;
  std::optional<EvidenceOwner> owner_evidence;
  std::optional<EvidenceConsumer> consumer_evidence;

  bool owner_has_ack_n() const { return owner.ack_n.has_value(); }
};

// Propagates errors from owner_accept; protocol failures after that end
// the session and are reflected in the result.
RunResult run_session(const Parties& p, const DatumId& datum_id, const std::string& purpose,
                      OneTimeKey consumer_onetime, OneTimeKey owner_onetime, Rng& rng,
                      const RunOptions& options = {});

struct CheatOutcome {
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  bool obtained_datum = false;
  bool owner_has_ack_n = false;
  // The consumer holds the datum and the owner holds no proof of it.
  bool succeeded() const { return obtained_datum && !owner_has_ack_n; }
};

// Consumer that sends no acknowledgment after share k and composes.
CheatOutcome cheat_strategy_stop_at(std::uint32_t k, const Parties& p, const DatumId& datum_id,
                                    OneTimeKey consumer_onetime, OneTimeKey owner_onetime,
                                    Rng& rng);

}  // namespace p3::protocol
