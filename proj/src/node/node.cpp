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

#include "p3/node/node.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "p3/error.hpp"

namespace p3::node {

using protocol::Envelope;
using protocol::MsgType;

namespace {

// BLOCK message sub-kinds.
constexpr std::uint8_t kBlockAnnounce = 1;
constexpr std::uint8_t kBlockGet = 2;
constexpr std::uint8_t kBlockTip = 3;

// ERASE_REQ sub-kinds.
constexpr std::uint8_t kEraseHello = 1;
constexpr std::uint8_t kEraseProof = 2;
// ERASE_ACK sub-kinds.
constexpr std::uint8_t kEraseChallenge = 1;
constexpr std::uint8_t kEraseDone = 2;
constexpr std::uint8_t kEraseRefused = 3;

constexpr std::uint8_t kScopeLinkAndEvidence = 3;
constexpr std::size_t kMaxOrphans = 4096;

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw Error(Errc::kScenario, "bad value for " + std::string(key) + ": " + std::string(v));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error(Errc::kScenario, "bad value for " + std::string(key) + ": " + std::string(v));
}

}  // namespace

void NodeConfig::set(std::string_view key, std::string_view value) {
  if (key == "identity_id") {
    if (value.empty()) throw Error(Errc::kScenario, "empty identity_id");
    identity_id = std::string(value);
  } else if (key == "key_bits") {
    key_bits = parse_number<int>(key, value);
    if (!crypto::is_supported_key_bits(key_bits)) {
      throw Error(Errc::kScenario, "unsupported key_bits " + std::string(value));
    }
  } else if (key == "n_min") {
    n_min = parse_number<std::uint32_t>(key, value);
  } else if (key == "n_max") {
    n_max = parse_number<std::uint32_t>(key, value);
  } else if (key == "difficulty") {
    difficulty = parse_number<int>(key, value);
    if (difficulty < 0 || difficulty > ledger::kMaxDifficulty) {
      throw Error(Errc::kScenario, "difficulty out of range");
    }
  } else if (key == "delta_max") {
    delta_max = parse_number<std::int64_t>(key, value);
  } else if (key == "wait_for_k") {
    wait_for_k = parse_number<std::uint32_t>(key, value);
  } else if (key == "wait_timeout") {
    wait_timeout = parse_number<std::int64_t>(key, value);
  } else if (key == "fake_rate") {
    fake_rate = parse_number<double>(key, value);
  } else if (key == "slow_iterations") {
    slow_iterations = parse_number<std::uint32_t>(key, value);
  } else if (key == "fake_datum_size") {
    fake_datum_size = parse_number<std::size_t>(key, value);
  } else if (key == "adversarial") {
    adversarial = parse_bool(key, value);
  } else if (key == "erase_keep_keys") {
    erase_keep_keys = parse_bool(key, value);
  } else {
    throw Error(Errc::kScenario, "unknown node config key " + std::string(key));
  }
  // n_min <= n_max is checked once both are known.
  if (n_min < 1) throw Error(Errc::kScenario, "n_min must be at least 1");
  if (delta_max < 0 || wait_timeout < 0 || fake_rate < 0 || slow_iterations < 1) {
    throw Error(Errc::kScenario, "negative or zero value for " + std::string(key));
  }
}

NodeConfig NodeConfig::parse(std::string_view text) {
  NodeConfig c;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::kScenario, "line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      c.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(Errc::kScenario, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (c.n_min > c.n_max) throw Error(Errc::kScenario, "n_min exceeds n_max");
  return c;
}

protocol::OwnerPolicy NodeConfig::owner_policy() const {
  protocol::OwnerPolicy p;
  p.n_min = n_min;
  p.n_max = n_max;
  p.slow_iterations = slow_iterations;
  p.fake_datum_size = fake_datum_size;
  return p;
}

Node::Node(NodeConfig config, Rng rng, Network& net)
    : config_(std::move(config)),
      identity_{config_.identity_id, crypto::generate_keypair(config_.key_bits, rng)},
      rng_(std::move(rng)),
      net_(net),
      store_(keystore::generate_master(rng_, net.now()), config_.key_bits) {
  init();
}

Node::Node(NodeConfig config, protocol::Identity identity, keystore::MasterKey master, Rng rng,
           Network& net)
    : config_(std::move(config)),
      identity_(std::move(identity)),
      rng_(std::move(rng)),
      net_(net),
      store_(std::move(master), config_.key_bits) {
  config_.identity_id = identity_.id;
  init();
}

void Node::init() {
  if (identity_.id.empty()) throw Error(Errc::kInvalidArgument, "node needs an identity id");
  if (config_.n_min < 1 || config_.n_min > config_.n_max) {
    throw Error(Errc::kInvalidArgument, "bad share count range");
  }
  auto g = ledger::genesis_block();
  tip_ = ledger::block_hash(g);
  tree_.emplace(tip_, TreeNode{g, 0});
  best_path_ = {tip_};
  best_set_ = {tip_};
}

void Node::pin_peer(const std::string& id, const crypto::PublicKey& key) {
  if (id == identity_.id) return;
  trust_.pin(id, key);
  if (std::find(peers_.begin(), peers_.end(), id) == peers_.end()) {
    peers_.push_back(id);
    std::sort(peers_.begin(), peers_.end());
  }
}

void Node::set_neighbors(std::vector<std::string> neighbors) {
  std::sort(neighbors.begin(), neighbors.end());
  neighbors_ = std::move(neighbors);
}

const std::vector<std::string>& Node::gossip_targets() const {
  return neighbors_ ? *neighbors_ : peers_;
}

void Node::put_datum(const DatumId& id, Bytes datum) {
  if (id == ledger::kFakeDatum) throw Error(Errc::kInvalidArgument, "reserved datum id");
  datums_[id] = std::move(datum);
}

std::optional<Bytes> Node::datum(const DatumId& id) const {
  if (id == ledger::kFakeDatum) return std::nullopt;
  auto it = datums_.find(id);
  if (it == datums_.end()) return std::nullopt;
  return it->second;
}

void Node::start() {
  if (started_) return;
  started_ = true;
  schedule_next_fake();
}

std::int64_t Node::draw_publish_delay(std::int64_t delta_max, Rng& rng) {
  if (delta_max <= 0) return 0;
  return static_cast<std::int64_t>(rng.uniform(0, static_cast<std::uint64_t>(delta_max)));
}

ledger::Chain Node::chain() const {
  std::vector<ledger::Block> blocks;
  blocks.reserve(best_path_.size());
  for (const auto& h : best_path_) blocks.push_back(tree_.at(h).block);
  return ledger::Chain::from_blocks(std::move(blocks), config_.difficulty);
}

std::size_t Node::height() const { return best_path_.size() - 1; }

void Node::send(const std::string& to, MsgType type, const SessionId& sid, Bytes body) {
  auto env = protocol::seal_envelope(identity_.id, type, sid, std::move(body),
                                     identity_.keys.private_key, rng_);
  net_.send(identity_.id, to, env.encode());
}

void Node::after(std::int64_t delay, std::function<void()> fn) {
  const auto epoch = epoch_;
  net_.schedule(identity_.id, delay, [this, epoch, fn = std::move(fn)] {
    if (crashed_ || epoch != epoch_) return;
    fn();
  });
}

// ---------------------------------------------------------------------------
// Dispatch

void Node::deliver(const std::string& from, ByteView wire) {
  if (crashed_) return;
  try {
    auto env = Envelope::decode(wire);
    auto key = trust_.key_for(env.sender);
    if (env.sender != from || !key || !protocol::verify_envelope(env, *key)) {
      ++rejected_;
      return;
    }
    switch (env.type) {
      case MsgType::kRequest: on_request(from, env); break;
      case MsgType::kAccept: on_accept(from, env); break;
      case MsgType::kShare: on_share(from, env); break;
      case MsgType::kAck: on_ack(from, env); break;
      case MsgType::kEnd: on_end(from, env); break;
      case MsgType::kBlock: on_block(from, env); break;
      case MsgType::kEraseRequest: on_erase_request(from, env); break;
      case MsgType::kEraseAck: on_erase_ack(from, env); break;
    }
  } catch (const Error&) {
    ++rejected_;
  }
}

// ---------------------------------------------------------------------------
// Owner side

void Node::on_request(const std::string& from, const Envelope& e) {
  auto req = protocol::Request::decode(e.body);
  if (req.session_id != e.session_id || req.consumer_id != from ||
      owner_sessions_.contains(req.session_id)) {
    ++rejected_;
    return;
  }
  // Check everything that does not need the one-time key before deriving it.
  auto consumer_key = trust_.key_for(from);
  if (req.owner_id != identity_.id || !protocol::verify_message(req, *consumer_key)) {
    ++rejected_;
    return;
  }
  const bool fake = req.datum_id == ledger::kFakeDatum;
  if (!fake && !datums_.contains(req.datum_id)) {
    ++rejected_;
    return;
  }
  protocol::OneTimeKey ot;
  if (fake) {
    ot = protocol::OneTimeKey::decoy(config_.key_bits, rng_);
  } else {
    std::uint64_t index = 0;
    auto kp = store_.next_subkey(&index);
    ot = protocol::OneTimeKey::real(std::move(kp), index);
  }
  auto lookup = [this](const DatumId& id) { return datum(id); };
  auto [accept, session] = protocol::owner_accept(identity_, trust_, lookup, req,
                                                  config_.owner_policy(), std::move(ot), rng_);
  ServedSession rec;
  rec.session_id = req.session_id;
  rec.consumer = from;
  rec.datum_id = req.datum_id;
  rec.fake = fake;
  rec.n = session.meta.n;
  rec.started = net_.now();
  rec.consumer_pseudonym = session.consumer_pseudonym();
  rec.owner_pseudonym = session.owner_pseudonym();
  served_.push_back(rec);

  auto& st = owner_sessions_[req.session_id];
  st.session = std::move(session);
  st.served = served_.size() - 1;
  send(from, MsgType::kAccept, req.session_id, accept.encode());
  auto out = protocol::owner_step(st.session, nullptr, *consumer_key, identity_, rng_);
  send(from, MsgType::kShare, req.session_id, std::get<protocol::ShareMessage>(out).encode());
  arm_owner_timer(req.session_id, 1);
}

void Node::arm_owner_timer(const SessionId& sid, std::uint32_t x) {
  after(protocol::kStepTimeout, [this, sid, x] {
    auto it = owner_sessions_.find(sid);
    if (it == owner_sessions_.end() || it->second.session.x != x) return;
    protocol::owner_timeout(it->second.session);
    served_[it->second.served].finished = net_.now();
    owner_sessions_.erase(it);
  });
}

void Node::on_ack(const std::string& from, const Envelope& e) {
  auto it = owner_sessions_.find(e.session_id);
  if (it == owner_sessions_.end() || it->second.session.meta.consumer_id != from) {
    ++rejected_;
    return;
  }
  auto& st = it->second;
  auto ack = protocol::AckMessage::decode(e.body);
  auto consumer_key = trust_.key_for(from);
  try {
    auto out = protocol::owner_step(st.session, &ack, *consumer_key, identity_, rng_);
    if (auto* done = std::get_if<protocol::Completed>(&out)) {
      send(from, MsgType::kEnd, e.session_id, done->end.encode());
      owner_complete(st, done->end);
      owner_sessions_.erase(e.session_id);
      return;
    }
    const auto& share = std::get<protocol::ShareMessage>(out);
    send(from, MsgType::kShare, e.session_id, share.encode());
    arm_owner_timer(e.session_id, share.x);
  } catch (const Error&) {
    served_[st.served].finished = net_.now();
    owner_sessions_.erase(it);
    ++rejected_;
  }
}

void Node::owner_complete(OwnerState& st, const protocol::EndMessage&) {
  auto& rec = served_[st.served];
  rec.completed = true;
  rec.finished = net_.now();
  const auto& s = st.session;
  if (s.fake) return;

  keystore::KeyStoreEntry entry;
  entry.pseudonym = s.owner_pseudonym();
  entry.key_pair = s.owner_onetime.key_pair;
  entry.derivation_index = s.owner_onetime.derivation_index;
  entry.role = keystore::Role::kOwner;
  entry.counterparty_identity = s.meta.consumer_id;
  entry.evidence = protocol::owner_evidence(s).encode();
  store_.record_entry(std::move(entry));

  OwnBlock ob;
  ob.session_id = s.meta.session_id;
  ob.payload = protocol::build_payload(s, protocol::make_usage_record(s, net_.now()), rng_);
  ob.completed_at = net_.now();
  own_blocks_.push_back(std::move(ob));
  schedule_publication(own_blocks_.size() - 1);
}

// ---------------------------------------------------------------------------
// Consumer side

SessionId Node::request_datum(const std::string& owner_id, const DatumId& datum_id,
                              std::string purpose) {
  if (datum_id != ledger::kFakeDatum) last_purpose_ = purpose;
  return start_session(owner_id, datum_id, std::move(purpose));
}

SessionId Node::request_fake(const std::string& owner_id) {
  // Reuse the last real purpose so request sizes match real traffic.
  return start_session(owner_id, ledger::kFakeDatum, last_purpose_);
}

SessionId Node::start_session(const std::string& owner_id, const DatumId& datum_id,
                              std::string purpose) {
  if (!trust_.key_for(owner_id)) throw Error(Errc::kUnknownIdentity, owner_id);
  if (crashed_) throw Error(Errc::kProtocolFailure, "node is down");
  const bool fake = datum_id == ledger::kFakeDatum;
  protocol::OneTimeKey ot;
  if (fake) {
    ot = protocol::OneTimeKey::decoy(config_.key_bits, rng_);
  } else {
    std::uint64_t index = 0;
    auto kp = store_.next_subkey(&index);
    ot = protocol::OneTimeKey::real(std::move(kp), index);
  }
  auto [req, session] =
      protocol::consumer_start(identity_, owner_id, datum_id, std::move(purpose), std::move(ot), rng_);

  RequestOutcome out;
  out.session_id = req.session_id;
  out.owner = owner_id;
  out.datum_id = datum_id;
  out.fake = fake;
  out.pseudonym = session.consumer_pseudonym();
  out.started = net_.now();
  outcomes_.push_back(out);

  auto& st = consumer_sessions_[req.session_id];
  st.session = std::move(session);
  st.outcome = outcomes_.size() - 1;
  send(owner_id, MsgType::kRequest, req.session_id, req.encode());
  arm_consumer_timer(req.session_id);
  return req.session_id;
}

void Node::arm_consumer_timer(const SessionId& sid) {
  auto& st = consumer_sessions_.at(sid);
  const auto step = ++st.step;
  // The owner's own deadline plus a round trip of slack.
  after(2 * protocol::kStepTimeout, [this, sid, step] {
    auto it = consumer_sessions_.find(sid);
    if (it == consumer_sessions_.end() || it->second.step != step) return;
    consumer_fail(sid, Errc::kTimeout);
  });
}

void Node::consumer_fail(const SessionId& sid, Errc code) {
  auto it = consumer_sessions_.find(sid);
  if (it == consumer_sessions_.end()) return;
  auto& out = outcomes_[it->second.outcome];
  out.success = false;
  out.error = Errc::kProtocolFailure;
  out.detail = std::string(errc_name(code));
  out.finished = net_.now();
  consumer_sessions_.erase(it);
}

void Node::on_accept(const std::string& from, const Envelope& e) {
  auto it = consumer_sessions_.find(e.session_id);
  if (it == consumer_sessions_.end() || it->second.session.meta.owner_id != from) {
    ++rejected_;
    return;
  }
  try {
    protocol::consumer_accept(it->second.session, protocol::Accept::decode(e.body),
                              *trust_.key_for(from));
    arm_consumer_timer(e.session_id);
  } catch (const Error& err) {
    consumer_fail(e.session_id, err.code());
  }
}

void Node::on_share(const std::string& from, const Envelope& e) {
  auto it = consumer_sessions_.find(e.session_id);
  if (it == consumer_sessions_.end() || it->second.session.meta.owner_id != from) {
    ++rejected_;
    return;
  }
  try {
    auto ack = protocol::consumer_step(it->second.session,
                                       protocol::ShareMessage::decode(e.body),
                                       *trust_.key_for(from), identity_, rng_);
    send(from, MsgType::kAck, e.session_id, ack.encode());
    arm_consumer_timer(e.session_id);
  } catch (const Error& err) {
    consumer_fail(e.session_id, err.code());
  }
}

void Node::on_end(const std::string& from, const Envelope& e) {
  auto it = consumer_sessions_.find(e.session_id);
  if (it == consumer_sessions_.end() || it->second.session.meta.owner_id != from) {
    ++rejected_;
    return;
  }
  auto& st = it->second;
  protocol::ConsumerResult result;
  try {
    result = protocol::consumer_finalize(st.session, protocol::EndMessage::decode(e.body),
                                         *trust_.key_for(from));
  } catch (const Error& err) {
    consumer_fail(e.session_id, err.code());
    return;
  }
  auto& out = outcomes_[st.outcome];
  out.success = true;
  out.finished = net_.now();
  if (!st.session.fake) {
    out.datum = result.datum;
    keystore::KeyStoreEntry entry;
    entry.pseudonym = st.session.consumer_pseudonym();
    entry.key_pair = st.session.consumer_onetime.key_pair;
    entry.derivation_index = st.session.consumer_onetime.derivation_index;
    entry.role = keystore::Role::kConsumer;
    entry.counterparty_identity = from;
    entry.evidence = result.evidence.encode();
    store_.record_entry(std::move(entry));
    refresh_block_refs();
  }
  consumer_sessions_.erase(it);
}

// ---------------------------------------------------------------------------
// Publication

void Node::schedule_publication(std::size_t i) {
  if (config_.wait_for_k > 0) {
    waiting_publication_.push_back(i);
    after(config_.wait_timeout, [this, i] { publish(i); });
    return;
  }
  const auto delay = draw_publish_delay(config_.delta_max, rng_);
  if (delay == 0) {
    publish(i);
  } else {
    after(delay, [this, i] { publish(i); });
  }
}

void Node::publish(std::size_t i) {
  if (own_blocks_[i].announced_at) return;
  std::erase(waiting_publication_, i);
  enqueue_mining(i);
}

// Own blocks never extend each other: a payload waits in the queue until
// the tip is someone else's block, so chain neighbours say nothing about a
// shared owner. After wait_timeout ticks it is mined regardless, which
// keeps a lone active owner from stalling.
void Node::enqueue_mining(std::size_t i) {
  if (std::find(mining_queue_.begin(), mining_queue_.end(), i) != mining_queue_.end()) return;
  mining_queue_.push_back(i);
  after(config_.wait_timeout, [this, i] {
    auto it = std::find(mining_queue_.begin(), mining_queue_.end(), i);
    if (it == mining_queue_.end()) return;
    mining_queue_.erase(it);
    if (!in_best_chain(i)) mine_and_announce(i);
  });
  drain_mining_queue();
}

void Node::drain_mining_queue() {
  while (!mining_queue_.empty() && !own_hashes_.contains(tip_)) {
    const auto i = mining_queue_.front();
    mining_queue_.pop_front();
    // A reorg may have brought an earlier copy back.
    if (in_best_chain(i)) continue;
    mine_and_announce(i);
    return;
  }
}

bool Node::in_best_chain(std::size_t i) const {
  const auto& hashes = own_blocks_[i].hashes;
  return std::any_of(hashes.begin(), hashes.end(),
                     [&](const Digest& h) { return best_set_.contains(h); });
}

void Node::mine_and_announce(std::size_t i) {
  auto& ob = own_blocks_[i];
  if (!ob.announced_at) ob.announced_at = net_.now();
  auto block = ledger::mine_block(tip_, ob.payload, config_.difficulty, rng_);
  const auto h = ledger::block_hash(block);
  ob.hashes.push_back(h);
  own_hashes_.insert(h);
  add_block(block, identity_.id);
  announce(block, identity_.id);
}

void Node::schedule_next_fake() {
  if (config_.fake_rate <= 0.0 || peers_.empty()) return;
  const auto wait = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::llround(rng_.exponential(config_.fake_rate))));
  after(wait, [this] {
    if (!started_) return;
    const auto& peer = peers_[static_cast<std::size_t>(rng_.uniform(0, peers_.size() - 1))];
    request_fake(peer);
    schedule_next_fake();
  });
}

// ---------------------------------------------------------------------------
// Chain

void Node::announce(const ledger::Block& b, const std::string& except) {
  ByteWriter w;
  w.u8(kBlockAnnounce);
  w.raw(b.serialize());
  auto body = std::move(w).take();
  for (const auto& peer : gossip_targets()) {
    if (peer == except) continue;
    send(peer, MsgType::kBlock, SessionId{}, body);
  }
}

void Node::request_block(const std::string& peer, const Digest& h) {
  ByteWriter w;
  w.u8(kBlockGet);
  w.raw(h);
  send(peer, MsgType::kBlock, SessionId{}, std::move(w).take());
}

void Node::on_block(const std::string& from, const Envelope& e) {
  ByteReader r(e.body);
  const auto kind = r.u8();
  if (kind == kBlockAnnounce) {
    add_block(ledger::Block::parse(r.raw(r.remaining())), from);
  } else if (kind == kBlockGet) {
    auto h = r.array<32>();
    r.expect_done();
    auto it = tree_.find(h);
    if (it == tree_.end() || it->second.height == 0) return;
    ByteWriter w;
    w.u8(kBlockAnnounce);
    w.raw(it->second.block.serialize());
    send(from, MsgType::kBlock, SessionId{}, std::move(w).take());
  } else if (kind == kBlockTip) {
    r.expect_done();
    if (best_path_.size() < 2) return;
    ByteWriter w;
    w.u8(kBlockAnnounce);
    w.raw(tree_.at(tip_).block.serialize());
    send(from, MsgType::kBlock, SessionId{}, std::move(w).take());
  } else {
    throw DecodeError("unknown block message kind");
  }
}

bool Node::add_block(const ledger::Block& b, const std::string& from) {
  const auto h = ledger::block_hash(b);
  if (tree_.contains(h)) return false;
  if (!ledger::meets_difficulty(h, config_.difficulty)) {
    ++rejected_;
    return false;
  }
  if (!tree_.contains(b.prev_hash)) {
    auto range = orphans_.equal_range(b.prev_hash);
    bool known = false;
    for (auto it = range.first; it != range.second; ++it) {
      known = known || ledger::block_hash(it->second) == h;
    }
    if (!known && orphans_.size() < kMaxOrphans) orphans_.emplace(b.prev_hash, b);
    if (from != identity_.id) request_block(from, b.prev_hash);
    return false;
  }

  std::vector<std::pair<ledger::Block, std::string>> work{{b, from}};
  std::uint32_t foreign = 0;
  while (!work.empty()) {
    auto [blk, src] = std::move(work.back());
    work.pop_back();
    const auto bh = ledger::block_hash(blk);
    if (tree_.contains(bh)) continue;
    const auto height = tree_.at(blk.prev_hash).height + 1;
    tree_.emplace(bh, TreeNode{blk, height});
    if (src != identity_.id) {
      ++foreign;
      // Explicit topologies need relaying; in a full mesh the creator
      // already reached everyone.
      if (neighbors_) announce(blk, src);
    }
    auto range = orphans_.equal_range(bh);
    for (auto it = range.first; it != range.second; ++it) work.emplace_back(it->second, src);
    orphans_.erase(bh);

    const auto tip_height = tree_.at(tip_).height;
    if (height > tip_height || (height == tip_height && bh < tip_)) {
      tip_ = bh;
      on_tip_changed();
    }
  }
  if (foreign > 0) {
    for (auto i : std::vector<std::size_t>(waiting_publication_)) {
      own_blocks_[i].foreign_seen += foreign;
      if (own_blocks_[i].foreign_seen >= config_.wait_for_k) publish(i);
    }
  }
  return true;
}

void Node::on_tip_changed() {
  best_path_.clear();
  for (auto h = tip_;;) {
    best_path_.push_back(h);
    const auto& node = tree_.at(h);
    if (node.height == 0) break;
    h = node.block.prev_hash;
  }
  std::reverse(best_path_.begin(), best_path_.end());
  best_set_ = std::set<Digest>(best_path_.begin(), best_path_.end());
  refresh_block_refs();

  // Own published payloads that fell off the best chain get mined again.
  for (std::size_t i = 0; i < own_blocks_.size(); ++i) {
    if (own_blocks_[i].announced_at && !in_best_chain(i)) enqueue_mining(i);
  }
  drain_mining_queue();
}

void Node::refresh_block_refs() {
  for (std::size_t i = 1; i < best_path_.size(); ++i) {
    const auto& h = best_path_[i];
    const auto& p = tree_.at(h).block.payload;
    for (const auto* pseudonym : {&p.consumer_pseudonym, &p.owner_pseudonym}) {
      const auto* e = store_.find(*pseudonym);
      if (e && !e->erased && e->block_ref != h) store_.set_block_ref(*pseudonym, h);
    }
  }
}

// ---------------------------------------------------------------------------
// Erasure and claims

std::optional<Pseudonym> Node::counterpart_of(const keystore::KeyStoreEntry& e) const {
  if (e.evidence) {
    try {
      if (e.role == keystore::Role::kOwner) {
        auto ev = protocol::EvidenceOwner::decode(*e.evidence);
        return crypto::derive_pseudonym(ev.request.consumer_onetime_key);
      }
      auto ev = protocol::EvidenceConsumer::decode(*e.evidence);
      return crypto::derive_pseudonym(ev.accept.owner_onetime_key);
    } catch (const Error&) {
    }
  }
  if (e.block_ref) {
    auto it = tree_.find(*e.block_ref);
    if (it != tree_.end()) {
      const auto& p = it->second.block.payload;
      if (p.consumer_pseudonym == e.pseudonym) return p.owner_pseudonym;
      if (p.owner_pseudonym == e.pseudonym) return p.consumer_pseudonym;
    }
  }
  return std::nullopt;
}

const keystore::KeyStoreEntry* Node::entry_for_counterpart(const Pseudonym& counterpart) const {
  for (const auto& e : store_.entries()) {
    if (e.erased) continue;
    if (counterpart_of(e) == counterpart) return &e;
  }
  return nullptr;
}

void Node::request_erasure(const Pseudonym& own) {
  const auto* e = store_.find(own);
  if (!e || e->erased) throw Error(Errc::kUnknownPseudonym, own.hex());
  if (!e->counterparty_identity || !e->key_pair) throw Error(Errc::kNoEvidence, own.hex());
  ErasureRecord rec;
  rec.requester = identity_.id;
  rec.counterparty = *e->counterparty_identity;
  rec.pseudonym = own;
  erasures_.push_back(rec);
  erase_pending_[own] = erasures_.size() - 1;

  ByteWriter w;
  w.u8(kEraseHello);
  w.raw(own.digest);
  w.raw(e->block_ref.value_or(Digest{}));
  send(rec.counterparty, MsgType::kEraseRequest, rng_.array<16>(), std::move(w).take());
}

void Node::on_erase_request(const std::string& from, const Envelope& e) {
  ByteReader r(e.body);
  const auto kind = r.u8();
  Pseudonym target{r.array<32>()};
  const auto block_ref = r.array<32>();
  (void)block_ref;
  if (kind == kEraseHello) {
    r.expect_done();
    auto nonce = rng_.bytes(32);
    erase_challenges_[target] = {nonce, from};
    ByteWriter w;
    w.u8(kEraseChallenge);
    w.raw(target.digest);
    w.raw(nonce);
    send(from, MsgType::kEraseAck, e.session_id, std::move(w).take());
    return;
  }
  if (kind != kEraseProof) throw DecodeError("unknown erase request kind");
  const auto scope = r.u8();
  auto proof = crypto::OwnershipProof::decode(r.var32());
  r.expect_done();

  ErasureRecord rec;
  rec.requester = from;
  rec.counterparty = identity_.id;
  rec.pseudonym = target;
  auto refuse = [&](const std::string& why) {
    rec.status = ErasureStatus::kRefused;
    rec.detail = why;
    erasures_.push_back(rec);
    ByteWriter w;
    w.u8(kEraseRefused);
    w.raw(target.digest);
    w.var16(why);
    send(from, MsgType::kEraseAck, e.session_id, std::move(w).take());
  };

  auto ch = erase_challenges_.find(target);
  if (ch == erase_challenges_.end() || ch->second.requester != from) {
    refuse("no outstanding challenge");
    return;
  }
  const auto nonce = ch->second.nonce;
  erase_challenges_.erase(ch);
  if (!crypto::verify_ownership(target, proof, nonce)) {
    refuse("ownership proof does not verify");
    return;
  }
  if (scope != kScopeLinkAndEvidence) {
    refuse("unsupported scope");
    return;
  }
  const auto* entry = entry_for_counterpart(target);
  if (entry && entry->counterparty_identity == from && !config_.adversarial) {
    store_.erase_link(entry->pseudonym, config_.erase_keep_keys);
    rec.erased_locally = true;
  }
  rec.status = ErasureStatus::kAcknowledged;
  rec.detail = entry ? "link found" : "no link on record";
  erasures_.push_back(rec);
  ByteWriter w;
  w.u8(kEraseDone);
  w.raw(target.digest);
  send(from, MsgType::kEraseAck, e.session_id, std::move(w).take());
}

void Node::on_erase_ack(const std::string& from, const Envelope& e) {
  ByteReader r(e.body);
  const auto kind = r.u8();
  Pseudonym target{r.array<32>()};
  auto pending = erase_pending_.find(target);
  if (pending == erase_pending_.end() || erasures_[pending->second].counterparty != from) {
    ++rejected_;
    return;
  }
  auto& rec = erasures_[pending->second];
  if (kind == kEraseChallenge) {
    auto nonce = r.raw_copy(32);
    r.expect_done();
    const auto* entry = store_.find(target);
    if (!entry || !entry->key_pair) {
      rec.status = ErasureStatus::kRefused;
      rec.detail = "key no longer held";
      erase_pending_.erase(pending);
      return;
    }
    auto proof = crypto::prove_ownership(*entry->key_pair, nonce, rng_);
    ByteWriter w;
    w.u8(kEraseProof);
    w.raw(target.digest);
    w.raw(entry->block_ref.value_or(Digest{}));
    w.u8(kScopeLinkAndEvidence);
    w.var32(proof.encode());
    send(from, MsgType::kEraseRequest, e.session_id, std::move(w).take());
    return;
  }
  if (kind == kEraseDone) {
    r.expect_done();
    rec.status = ErasureStatus::kAcknowledged;
    // Drop this side of the link as well.
    const auto* entry = store_.find(target);
    if (entry && !entry->erased) {
      store_.erase_link(target, config_.erase_keep_keys);
      rec.erased_locally = true;
    }
  } else if (kind == kEraseRefused) {
    rec.status = ErasureStatus::kRefused;
    rec.detail = r.str16();
    r.expect_done();
  } else {
    throw DecodeError("unknown erase ack kind");
  }
  erase_pending_.erase(pending);
}

IdentityClaim Node::claim_identity_link(const Pseudonym& counterparty_pseudonym) const {
  const auto* e = entry_for_counterpart(counterparty_pseudonym);
  if (!e || e->role != keystore::Role::kOwner || !e->evidence || !e->counterparty_identity) {
    throw Error(Errc::kNoEvidence, counterparty_pseudonym.hex());
  }
  IdentityClaim c;
  c.claimant = identity_.id;
  c.subject = *e->counterparty_identity;
  c.pseudonym = counterparty_pseudonym;
  c.evidence = protocol::EvidenceOwner::decode(*e->evidence);
  return c;
}

// ---------------------------------------------------------------------------
// Crash and restore

void Node::crash() {
  if (crashed_) return;
  crashed_ = true;
  ++epoch_;
  // In-flight sessions live in memory only.
  for (auto& [sid, st] : consumer_sessions_) {
    auto& out = outcomes_[st.outcome];
    out.error = Errc::kProtocolFailure;
    out.detail = "crashed";
    out.finished = net_.now();
  }
  consumer_sessions_.clear();
  for (auto& [sid, st] : owner_sessions_) served_[st.served].finished = net_.now();
  owner_sessions_.clear();
  erase_challenges_.clear();
}

void Node::restore() {
  if (!crashed_) return;
  crashed_ = false;
  ++epoch_;
  waiting_publication_.clear();
  mining_queue_.clear();
  for (std::size_t i = 0; i < own_blocks_.size(); ++i) {
    if (!own_blocks_[i].announced_at) schedule_publication(i);
  }
  ByteWriter w;
  w.u8(kBlockTip);
  auto body = std::move(w).take();
  for (const auto& peer : gossip_targets()) send(peer, MsgType::kBlock, SessionId{}, body);
  if (started_) schedule_next_fake();
}

}  // namespace p3::node
