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
#include <map>
#include <string>
#include <vector>

#include "p3/keystore/keystore.hpp"
#include "p3/ledger/chain.hpp"
#include "p3/sim/simulator.hpp"

namespace p3::sim {

struct AttackReport {
  std::string attack;     // "a", "b", "c", "d", "fake-vs-real", "block-attribution"
  std::string heuristic;  // what produced the reported rate
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double baseline = 0.0;

  // Binomial standard deviation of the rate under the baseline.
  double sigma() const;
  bool within_3_sigma() const;
  // attack heuristic trials successes rate baseline sigma
  std::string to_line() const;
};

// Who was behind a block, known to the harness only.
struct BlockTruth {
  std::size_t index = 0;  // position in the chain
  Digest hash{};
  std::string owner;
  std::string consumer;
};

// Ground truth for every non-genesis block of `chain`, taken from the
// owners' publication records. Blocks no node claims are skipped.
std::vector<BlockTruth> block_truth(const Simulator& sim, const ledger::Chain& chain);

using StoreMap = std::map<std::string, const keystore::KeyStore*>;

// Attack (a): guess the owner and the consumer of each block from chain
// bytes. Feature-bucket heuristics are fitted on a labeled part of the chain
// (the adversary's own or leaked entries), the best one is picked on a
// validation part and scored on the rest. Baseline 1/participants.
AttackReport attack_identity_inversion(const ledger::Chain& chain,
                                       const std::vector<BlockTruth>& truth,
                                       std::size_t participants, std::uint64_t seed);

// Same attack with keystores in hand: a pseudonym found in a store belongs
// to that store's node. With every store this reaches 1.0; with one
// victim's store, 1.0 on the victim's blocks.
AttackReport attack_identity_inversion_oracle(const ledger::Chain& chain,
                                              const std::vector<BlockTruth>& truth,
                                              const StoreMap& stores,
                                              std::size_t participants);

enum class LinkMode { kConsumer, kOwner };

// Attacks (b) and (c): for each block pick another block believed to share
// its consumer (or owner). Baseline is the chance that a random other block
// shares it. Only blocks that have a true partner are scored.
AttackReport attack_linkage(const ledger::Chain& chain, const std::vector<BlockTruth>& truth,
                            LinkMode mode, std::uint64_t seed);
AttackReport attack_linkage_oracle(const ledger::Chain& chain,
                                   const std::vector<BlockTruth>& truth, LinkMode mode,
                                   const StoreMap& stores);

// Attack (d). For every acknowledged erasure the adversarial counterparty
// did not honor, the adversary publishes a bare claim and an evidence-backed
// claim. Successes count claims that behave as required: bare rejected, and
// accepted only with the claimant's own verifying signatures inside. Honest
// counterparties must be unable to produce any claim after erasure; each
// such attempt is a trial too.
AttackReport attack_post_erasure_leak(const Simulator& sim);

// Real vs decoy sessions from the observer trace alone. Features per flow:
// message count, total bytes, request size, share size, duration and mean
// gap. Decision stumps are fitted per feature, the best is picked on a
// validation part and scored on held-out flows. Baseline is the majority
// class rate of the held-out flows.
AttackReport classify_fake_vs_real(const ObserverTrace& trace,
                                   const std::map<std::uint64_t, FlowTruth>& flows,
                                   std::uint64_t seed);

// Attributes each block to the owner of the session flow that most recently
// completed before the block first appeared. Baseline 1/participants.
AttackReport attribute_blocks(const ObserverTrace& trace,
                              const std::map<std::uint64_t, FlowTruth>& flows,
                              const std::vector<BlockTruth>& truth, std::size_t participants);

}  // namespace p3::sim
