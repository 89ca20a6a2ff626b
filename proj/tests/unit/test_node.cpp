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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "p3/crypto/pseudonym.hpp"
#include "p3/sim/simulator.hpp"
#include "test_util.hpp"

using namespace p3;
using namespace p3::node;
using p3::protocol::MsgType;
using p3::test::require_errc;

namespace {

NodeConfig small_config() {
  NodeConfig c;
  c.key_bits = 2048;
  c.difficulty = 4;
  c.slow_iterations = 16;
  c.n_min = 4;
  c.n_max = 6;
  return c;
}

std::unique_ptr<sim::Simulator> make_sim(const std::vector<std::string>& names,
                                         const std::function<void(const std::string&, NodeConfig&)>&
                                             tweak = {},
                                         std::uint64_t seed = 7) {
  sim::SimConfig cfg;
  cfg.seed = seed;
  cfg.duration = 400;
  for (const auto& n : names) {
    auto c = small_config();
    if (tweak) tweak(n, c);
    cfg.nodes.push_back({n, c});
  }
  return std::make_unique<sim::Simulator>(cfg);
}

DatumId datum_id(std::uint8_t tag) {
  DatumId d{};
  d[15] = tag;
  return d;
}

Bytes datum_bytes(std::size_t n, std::uint8_t fill) { return Bytes(n, fill); }

bool contains(const Bytes& hay, ByteView needle) {
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

bool contains(const Bytes& hay, std::string_view needle) {
  return contains(hay, ByteView(reinterpret_cast<const std::uint8_t*>(needle.data()), needle.size()));
}

// Runs one alice -> bob usage and returns the simulator.
std::unique_ptr<sim::Simulator> one_usage(
    const std::function<void(const std::string&, NodeConfig&)>& tweak = {}) {
  auto s = make_sim({"alice", "bob"}, tweak);
  s->node("bob").put_datum(datum_id(1), datum_bytes(256, 0xAB));
  s->at(1, [&n = s->node("alice")] { n.request_datum("bob", datum_id(1), "billing"); });
  s->run_until(300);
  return s;
}

}  // namespace

TEST_CASE("request round trip returns the owner's bytes and records both sides") {
  auto s = one_usage();
  auto& alice = s->node("alice");
  auto& bob = s->node("bob");
  REQUIRE(alice.outcomes().size() == 1);
  const auto& out = alice.outcomes()[0];
  CHECK(out.success);
  CHECK_FALSE(out.error);
  CHECK(out.datum == datum_bytes(256, 0xAB));

  REQUIRE(bob.served().size() == 1);
  CHECK(bob.served()[0].completed);
  REQUIRE(bob.own_blocks().size() == 1);
  CHECK(bob.own_blocks()[0].announced_at);

  CHECK(alice.height() == 1);
  CHECK(bob.height() == 1);
  CHECK(alice.tip() == bob.tip());

  auto a_entries = alice.keystore().list_own_pseudonyms(keystore::Role::kConsumer);
  REQUIRE(a_entries.size() == 1);
  const auto& ae = alice.keystore().lookup(a_entries[0]);
  CHECK(ae.counterparty_identity == std::optional<std::string>("bob"));
  CHECK(ae.evidence);
  const auto& be = bob.keystore().lookup(bob.keystore().list_own_pseudonyms()[0]);
  CHECK(be.role == keystore::Role::kOwner);
  CHECK(be.counterparty_identity == std::optional<std::string>("alice"));

  // The consumer finds its block from its own store.
  auto chain = alice.chain();
  auto hits = ledger::query_by_pseudonym(chain, a_entries[0]);
  REQUIRE(hits.size() == 1);
  auto own = ledger::read_own_entries(chain, alice.keystore());
  REQUIRE(own.size() == 1);
  CHECK(own[0].status == ledger::OwnEntry::Status::kOk);
  CHECK(own[0].record->purpose == "billing");
}

TEST_CASE("unpinned sender is rejected before any share") {
  auto s = make_sim({"alice", "bob"});
  auto& bob = s->node("bob");
  bob.put_datum(datum_id(1), datum_bytes(64, 1));
  protocol::Identity mallory{"mallory", test::test_key(0)};
  Rng rng(3);
  auto [req, cs] = protocol::consumer_start(mallory, "bob", datum_id(1), "x",
                                            protocol::OneTimeKey::real(test::test_key(1)), rng);
  auto env = protocol::seal_envelope("mallory", MsgType::kRequest, req.session_id, req.encode(),
                                     mallory.keys.private_key, rng);
  bob.deliver("mallory", env.encode());
  CHECK(bob.rejected_messages() == 1);
  CHECK(bob.served().empty());
  CHECK(s->pending_events() == 0);
}

TEST_CASE("unknown datum is rejected") {
  auto s = make_sim({"alice", "bob"});
  s->node("alice").request_datum("bob", datum_id(9), "x");
  s->run_until(200);
  CHECK(s->node("bob").served().empty());
  CHECK(s->node("bob").rejected_messages() == 1);
  const auto& out = s->node("alice").outcomes().at(0);
  CHECK_FALSE(out.success);
  CHECK(out.error == Errc::kProtocolFailure);
}

TEST_CASE("reserved decoy id cannot be stored") {
  auto s = make_sim({"alice"});
  require_errc(Errc::kInvalidArgument,
               [&] { s->node("alice").put_datum(ledger::kFakeDatum, Bytes{1}); });
}

TEST_CASE("decoy request runs a full session and schedules no block") {
  auto s = make_sim({"alice", "bob"});
  s->node("alice").request_fake("bob");
  s->run_until(300);
  const auto& bob = s->node("bob");
  REQUIRE(bob.served().size() == 1);
  CHECK(bob.served()[0].fake);
  CHECK(bob.served()[0].completed);
  CHECK(bob.own_blocks().empty());
  CHECK(bob.height() == 0);
  CHECK(s->node("alice").outcomes().at(0).success);
  CHECK(s->node("alice").keystore().entries().empty());
  CHECK(bob.keystore().entries().empty());
}

TEST_CASE("owner offline surfaces as protocol failure") {
  auto s = make_sim({"alice", "bob"});
  s->node("bob").put_datum(datum_id(1), datum_bytes(64, 1));
  s->node("bob").crash();
  s->node("alice").request_datum("bob", datum_id(1), "x");
  s->run_until(300);
  const auto& out = s->node("alice").outcomes().at(0);
  CHECK_FALSE(out.success);
  CHECK(out.error == Errc::kProtocolFailure);
  CHECK(s->node("alice").keystore().entries().empty());
}

TEST_CASE("unpinned owner cannot be asked") {
  auto s = make_sim({"alice"});
  require_errc(Errc::kUnknownIdentity,
               [&] { s->node("alice").request_datum("nobody", datum_id(1), "x"); });
}

TEST_CASE("zero publication delay announces at completion") {
  auto s = one_usage();
  const auto& ob = s->node("bob").own_blocks().at(0);
  CHECK(ob.announced_at == ob.completed_at);
}

TEST_CASE("wait-for-k announces strictly after k foreign blocks") {
  auto s = make_sim({"alice", "bob", "carol", "dave"}, [](const std::string& n, NodeConfig& c) {
    if (n == "bob") {
      c.wait_for_k = 2;
      c.wait_timeout = 100000;
    }
  });
  s->node("bob").put_datum(datum_id(1), datum_bytes(64, 1));
  s->node("carol").put_datum(datum_id(2), datum_bytes(64, 2));
  s->node("dave").put_datum(datum_id(3), datum_bytes(64, 3));
  s->at(1, [&a = s->node("alice")] { a.request_datum("bob", datum_id(1), "x"); });
  s->at(100, [&a = s->node("alice")] { a.request_datum("carol", datum_id(2), "y"); });
  s->at(200, [&a = s->node("alice")] { a.request_datum("dave", datum_id(3), "z"); });
  s->run_until(150);
  CHECK_FALSE(s->node("bob").own_blocks().at(0).announced_at);
  s->run_until(400);
  const auto& ob = s->node("bob").own_blocks().at(0);
  REQUIRE(ob.announced_at);
  CHECK(ob.foreign_seen >= 2);
  const auto& dave_blocks = s->node("dave").own_blocks();
  REQUIRE(dave_blocks.size() == 1);
  CHECK(*ob.announced_at > *dave_blocks[0].announced_at);
  CHECK(s->converged());
  CHECK(s->node("alice").height() == 3);
}

TEST_CASE("an owner never mines on top of its own block") {
  auto s = make_sim({"alice", "bob", "carol"}, [](const std::string&, NodeConfig& c) {
    c.wait_timeout = 1000;
  });
  s->node("bob").put_datum(datum_id(1), datum_bytes(64, 1));
  s->node("carol").put_datum(datum_id(2), datum_bytes(64, 2));
  s->at(1, [&a = s->node("alice")] { a.request_datum("bob", datum_id(1), "x"); });
  s->at(120, [&a = s->node("alice")] { a.request_datum("bob", datum_id(1), "y"); });
  s->at(300, [&a = s->node("alice")] { a.request_datum("carol", datum_id(2), "z"); });
  s->run_until(290);
  const auto& own = s->node("bob").own_blocks();
  REQUIRE(own.size() == 2);
  CHECK(own[0].announced_at);
  CHECK_FALSE(own[1].announced_at);
  CHECK(s->node("alice").height() == 1);

  // Carol's block lands on bob's; only then does bob's second go out.
  s->run_until(500);
  REQUIRE(own[1].announced_at);
  CHECK(*own[1].announced_at > *s->node("carol").own_blocks().at(0).announced_at);
  const auto chain = s->node("alice").chain();
  REQUIRE(chain.length() == 4);
  const auto& blocks = chain.blocks();
  CHECK(blocks[1].payload.owner_pseudonym == own[0].payload.owner_pseudonym);
  CHECK(blocks[3].payload.owner_pseudonym == own[1].payload.owner_pseudonym);
  CHECK(s->converged());
}

TEST_CASE("a queued own block is mined after wait_timeout when nobody else publishes") {
  auto s = make_sim({"alice", "bob"}, [](const std::string&, NodeConfig& c) {
    c.wait_timeout = 50;
  });
  s->node("bob").put_datum(datum_id(1), datum_bytes(64, 1));
  s->at(1, [&a = s->node("alice")] { a.request_datum("bob", datum_id(1), "x"); });
  s->at(120, [&a = s->node("alice")] { a.request_datum("bob", datum_id(1), "y"); });
  s->run_until(390);
  const auto& own = s->node("bob").own_blocks();
  REQUIRE(own.size() == 2);
  REQUIRE(own[1].announced_at);
  CHECK(*own[1].announced_at == own[1].completed_at + 50);
  CHECK(s->node("alice").height() == 2);
}

TEST_CASE("publication delays are uniform on [0, delta_max]") {
  // One-sample Kolmogorov-Smirnov against the discrete uniform CDF.
  constexpr int kDraws = 1000;
  constexpr std::int64_t kMax = 100;
  Rng rng(2026);
  std::vector<std::int64_t> d;
  for (int i = 0; i < kDraws; ++i) {
    auto v = Node::draw_publish_delay(kMax, rng);
    REQUIRE(v >= 0);
    REQUIRE(v <= kMax);
    d.push_back(v);
  }
  std::sort(d.begin(), d.end());
  double stat = 0.0;
  std::size_t j = 0;
  for (std::int64_t x = 0; x <= kMax; ++x) {
    while (j < d.size() && d[j] <= x) ++j;
    const double emp = double(j) / kDraws;
    const double cdf = double(x + 1) / double(kMax + 1);
    stat = std::max(stat, std::abs(emp - cdf));
  }
  // Critical value at alpha = 0.01.
  CHECK(stat < 1.628 / std::sqrt(double(kDraws)));
  CHECK(Node::draw_publish_delay(0, rng) == 0);
}

TEST_CASE("zero fake rate produces no decoy traffic") {
  auto s = make_sim({"alice", "bob", "carol"});
  s->start_nodes();
  s->run_until(300);
  CHECK(s->trace().envelopes.empty());
}

TEST_CASE("positive fake rate produces decoys and no blocks") {
  auto s = make_sim({"alice", "bob", "carol"},
                    [](const std::string&, NodeConfig& c) { c.fake_rate = 0.02; });
  s->start_nodes();
  s->finish();
  std::size_t fakes = 0;
  for (const auto& [id, f] : s->flows()) fakes += f.fake;
  CHECK(fakes > 0);
  for (const auto& n : s->names()) CHECK(s->node(n).height() == 0);
}

TEST_CASE("decoy transcript matches a real one with equal n") {
  auto s = make_sim({"alice", "bob"}, [](const std::string&, NodeConfig& c) {
    c.n_min = c.n_max = 5;
    c.fake_datum_size = 256;
  });
  s->node("bob").put_datum(datum_id(1), datum_bytes(256, 0xAB));
  s->node("alice").request_datum("bob", datum_id(1), "billing");
  s->run_until(200);
  s->node("alice").request_fake("bob");
  s->run_until(400);
  std::map<std::uint64_t, std::vector<std::pair<MsgType, std::size_t>>> by_flow;
  for (const auto& r : s->trace().envelopes) by_flow[r.flow].push_back({r.type, r.size});
  REQUIRE(by_flow.size() == 2);
  const auto& real = by_flow.begin()->second;
  const auto& fake = std::next(by_flow.begin())->second;
  CHECK(real.size() == 2 + 5 + 5 + 1);  // REQ, ACCEPT, shares, acks, END
  CHECK(real == fake);
}

TEST_CASE("valid erasure removes the identity link and leaves the chain alone") {
  auto s = one_usage();
  auto& alice = s->node("alice");
  auto& bob = s->node("bob");
  const auto mine = alice.keystore().list_own_pseudonyms().at(0);
  const auto chain_before = bob.chain_file();
  CHECK(contains(bob.store_file(), "alice"));

  alice.request_erasure(mine);
  s->run_until(400);

  REQUIRE(alice.erasures().size() == 1);
  CHECK(alice.erasures()[0].status == ErasureStatus::kAcknowledged);
  CHECK(alice.erasures()[0].erased_locally);
  REQUIRE(bob.erasures().size() == 1);
  CHECK(bob.erasures()[0].erased_locally);
  CHECK_FALSE(contains(bob.store_file(), "alice"));
  CHECK_FALSE(contains(bob.store_file(), alice.identity().keys.public_key.modulus()));
  CHECK(bob.chain_file() == chain_before);
  CHECK(alice.chain_file() == chain_before);
  CHECK_FALSE(ledger::validate_chain(bob.chain()));
  require_errc(Errc::kNoEvidence, [&] { bob.claim_identity_link(mine); });
  require_errc(Errc::kUnknownPseudonym, [&] { alice.request_erasure(mine); });
}

TEST_CASE("erasure proof from the wrong key is refused") {
  auto s = one_usage();
  auto& alice = s->node("alice");
  auto& bob = s->node("bob");
  const auto target = alice.keystore().list_own_pseudonyms().at(0);
  Rng rng(11);
  auto sealed = [&](Bytes body) {
    return protocol::seal_envelope("alice", MsgType::kEraseRequest, rng.array<16>(),
                                   std::move(body), alice.identity().keys.private_key, rng)
        .encode();
  };
  ByteWriter hello;
  hello.u8(1);
  hello.raw(target.digest);
  hello.raw(Digest{});
  bob.deliver("alice", sealed(std::move(hello).take()));

  auto proof = crypto::prove_ownership(test::test_key(2), rng.bytes(32), rng);
  ByteWriter w;
  w.u8(2);
  w.raw(target.digest);
  w.raw(Digest{});
  w.u8(3);
  w.var32(proof.encode());
  bob.deliver("alice", sealed(std::move(w).take()));

  REQUIRE(bob.erasures().size() == 1);
  CHECK(bob.erasures()[0].status == ErasureStatus::kRefused);
  CHECK_FALSE(bob.erasures()[0].erased_locally);
  CHECK(contains(bob.store_file(), "alice"));
  CHECK_NOTHROW(bob.claim_identity_link(target));
}

TEST_CASE("adversarial counterparty acknowledges without erasing") {
  auto s = one_usage([](const std::string& n, NodeConfig& c) { c.adversarial = n == "bob"; });
  auto& alice = s->node("alice");
  auto& bob = s->node("bob");
  const auto mine = alice.keystore().list_own_pseudonyms().at(0);
  alice.request_erasure(mine);
  s->run_until(400);
  CHECK(alice.erasures().at(0).status == ErasureStatus::kAcknowledged);
  CHECK(bob.erasures().at(0).status == ErasureStatus::kAcknowledged);
  CHECK_FALSE(bob.erasures().at(0).erased_locally);
  CHECK(contains(bob.store_file(), "alice"));
}

TEST_CASE("identity claims need evidence and expose the claimant") {
  auto s = one_usage();
  auto& alice = s->node("alice");
  auto& bob = s->node("bob");
  const auto consumer_p = alice.keystore().list_own_pseudonyms().at(0);
  protocol::PinnedKeys verifier;
  verifier.pin("alice", alice.identity().keys.public_key);
  verifier.pin("bob", bob.identity().keys.public_key);

  auto claim = bob.claim_identity_link(consumer_p);
  CHECK(claim.subject == "alice");
  CHECK(verify_identity_claim(claim, verifier));
  CHECK(claimant_identity(claim, verifier) == std::optional<std::string>("bob"));

  IdentityClaim bare{"bob", "alice", consumer_p, std::nullopt};
  CHECK_FALSE(verify_identity_claim(bare, verifier));

  auto decoded = IdentityClaim::decode(claim.encode());
  CHECK(verify_identity_claim(decoded, verifier));

  // Blaming someone else with the same evidence fails.
  auto wrong = claim;
  wrong.subject = "bob";
  CHECK_FALSE(verify_identity_claim(wrong, verifier));

  // The consumer side holds no owner evidence.
  const auto owner_p = bob.keystore().list_own_pseudonyms().at(0);
  require_errc(Errc::kNoEvidence, [&] { alice.claim_identity_link(owner_p); });
}

TEST_CASE("aborted session leaves nothing to claim") {
  auto s = make_sim({"alice", "bob"});
  s->node("bob").put_datum(datum_id(1), datum_bytes(64, 1));
  s->node("alice").request_datum("bob", datum_id(1), "x");
  // Consumer vanishes after the first share.
  s->run_until(12);
  s->node("alice").crash();
  s->run_until(300);
  const auto& served = s->node("bob").served().at(0);
  CHECK_FALSE(served.completed);
  REQUIRE(served.consumer_pseudonym);
  require_errc(Errc::kNoEvidence,
               [&] { s->node("bob").claim_identity_link(*served.consumer_pseudonym); });
  CHECK(s->node("bob").own_blocks().empty());
}

TEST_CASE("restored node catches up on missed blocks") {
  auto s = make_sim({"alice", "bob", "carol"});
  s->node("bob").put_datum(datum_id(1), datum_bytes(64, 1));
  s->node("carol").crash();
  s->node("alice").request_datum("bob", datum_id(1), "x");
  s->run_until(150);
  CHECK(s->node("carol").height() == 0);
  s->node("carol").restore();
  s->run_until(300);
  CHECK(s->node("carol").height() == 1);
  CHECK(s->node("carol").tip() == s->node("bob").tip());
}

TEST_CASE("config parsing") {
  auto c = NodeConfig::parse(
      "# node\n"
      "identity_id = dora\n"
      "key_bits = 2048\n"
      "n_min = 2\n"
      "n_max = 9\n"
      "difficulty = 6\n"
      "delta_max = 40\n"
      "wait_for_k = 3\n"
      "fake_rate = 0.25\n"
      "slow_iterations = 32\n"
      "adversarial = true\n"
      "erase_keep_keys = false\n");
  CHECK(c.identity_id == "dora");
  CHECK(c.key_bits == 2048);
  CHECK(c.n_min == 2);
  CHECK(c.n_max == 9);
  CHECK(c.difficulty == 6);
  CHECK(c.delta_max == 40);
  CHECK(c.wait_for_k == 3);
  CHECK(c.fake_rate == doctest::Approx(0.25));
  CHECK(c.slow_iterations == 32);
  CHECK(c.adversarial);
  CHECK_FALSE(c.erase_keep_keys);

  require_errc(Errc::kScenario, [] { NodeConfig::parse("colour = blue\n"); });
  require_errc(Errc::kScenario, [] { NodeConfig::parse("key_bits = 1000\n"); });
  require_errc(Errc::kScenario, [] { NodeConfig::parse("adversarial = maybe\n"); });
  require_errc(Errc::kScenario, [] { NodeConfig::parse("n_min\n"); });
}
