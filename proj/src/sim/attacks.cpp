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

#include "p3/sim/attacks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "p3/error.hpp"
#include "p3/node/claim.hpp"

namespace p3::sim {

double AttackReport::sigma() const {
  if (trials == 0) return 0.0;
  return std::sqrt(baseline * (1.0 - baseline) / static_cast<double>(trials));
}

bool AttackReport::within_3_sigma() const {
  return std::abs(success_rate - baseline) <= 3.0 * sigma() + 1e-12;
}

std::string AttackReport::to_line() const {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << attack << ' ' << heuristic << ' ' << trials << ' ' << successes << ' ' << success_rate
      << ' ' << baseline << ' ' << sigma();
  return out.str();
}

namespace {

AttackReport make_report(std::string attack, std::string heuristic, std::size_t trials,
                         std::size_t successes, double baseline) {
  AttackReport r;
  r.attack = std::move(attack);
  r.heuristic = std::move(heuristic);
  r.trials = trials;
  r.successes = successes;
  r.success_rate = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  r.baseline = baseline;
  return r;
}

// Seeded split into fit / validation / test index sets (30 / 20 / 50).
struct Split {
  std::vector<std::size_t> fit;
  std::vector<std::size_t> validate;
  std::vector<std::size_t> test;
};

Split split_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng.uniform(0, i - 1))]);
  }
  Split s;
  const auto a = n * 3 / 10;
  const auto b = n / 2;
  s.fit.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(a));
  s.validate.assign(idx.begin() + static_cast<std::ptrdiff_t>(a),
                    idx.begin() + static_cast<std::ptrdiff_t>(b));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(b), idx.end());
  return s;
}

std::string majority(const std::map<std::string, std::size_t>& counts) {
  std::string best;
  std::size_t best_n = 0;
  for (const auto& [label, n] : counts) {
    if (n > best_n) {
      best = label;
      best_n = n;
    }
  }
  return best;
}

const ledger::Block& block_at(const ledger::Chain& chain, const BlockTruth& t) {
  return chain.blocks().at(t.index);
}

const crypto::Pseudonym& side(const ledger::Block& b, LinkMode m) {
  return m == LinkMode::kConsumer ? b.payload.consumer_pseudonym : b.payload.owner_pseudonym;
}

const std::string& actor(const BlockTruth& t, LinkMode m) {
  return m == LinkMode::kConsumer ? t.consumer : t.owner;
}

int hamming(const Digest& a, const Digest& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::popcount(static_cast<unsigned>(a[i] ^ b[i]));
  return d;
}

std::optional<std::string> store_holder(const StoreMap& stores, const crypto::Pseudonym& p) {
  for (const auto& [name, store] : stores) {
    if (store && store->find(p)) return name;
  }
  return std::nullopt;
}

}  // namespace

std::vector<BlockTruth> block_truth(const Simulator& sim, const ledger::Chain& chain) {
  std::map<Digest, std::pair<std::string, protocol::SessionId>> made_by;
  std::map<protocol::SessionId, std::string> consumer_of;
  for (const auto& name : sim.names()) {
    const auto& n = sim.node(name);
    for (const auto& ob : n.own_blocks()) {
      for (const auto& h : ob.hashes) made_by[h] = {name, ob.session_id};
    }
    for (const auto& s : n.served()) consumer_of[s.session_id] = s.consumer;
  }
  std::vector<BlockTruth> out;
  const auto hashes = chain.hashes();
  for (std::size_t i = 1; i < hashes.size(); ++i) {
    auto it = made_by.find(hashes[i]);
    if (it == made_by.end()) continue;
    BlockTruth t;
    t.index = i;
    t.hash = hashes[i];
    t.owner = it->second.first;
    t.consumer = consumer_of[it->second.second];
    out.push_back(t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// (a)

AttackReport attack_identity_inversion(const ledger::Chain& chain,
                                       const std::vector<BlockTruth>& truth,
                                       std::size_t participants, std::uint64_t seed) {
  // One sample per (block, side).
  struct Sample {
    const BlockTruth* t;
    bool owner_side;
  };
  std::vector<Sample> samples;
  for (const auto& t : truth) {
    samples.push_back({&t, true});
    samples.push_back({&t, false});
  }
  using Feature = std::function<std::uint64_t(const Sample&)>;
  auto own = [&](const Sample& s) -> const Digest& {
    const auto& b = block_at(chain, *s.t);
    return (s.owner_side ? b.payload.owner_pseudonym : b.payload.consumer_pseudonym).digest;
  };
  auto other = [&](const Sample& s) -> const Digest& {
    const auto& b = block_at(chain, *s.t);
    return (s.owner_side ? b.payload.consumer_pseudonym : b.payload.owner_pseudonym).digest;
  };
  const std::vector<std::pair<std::string, Feature>> features = {
      {"majority", [](const Sample& s) -> std::uint64_t { return s.owner_side ? 1 : 0; }},
      {"own-pseudonym-nibble",
       [&](const Sample& s) -> std::uint64_t { return (own(s)[0] >> 4) * 2 + s.owner_side; }},
      {"other-pseudonym-nibble",
       [&](const Sample& s) -> std::uint64_t { return (other(s)[0] >> 4) * 2 + s.owner_side; }},
      {"position-mod-8",
       [&](const Sample& s) -> std::uint64_t { return (s.t->index % 8) * 2 + s.owner_side; }},
      {"nonce-nibble",
       [&](const Sample& s) -> std::uint64_t {
         return (block_at(chain, *s.t).nonce & 0xF) * 2 + s.owner_side;
       }},
      {"ciphertext-size",
       [&](const Sample& s) -> std::uint64_t {
         const auto& p = block_at(chain, *s.t).payload;
         return (s.owner_side ? p.enc_owner.size() : p.enc_consumer.size()) * 2 + s.owner_side;
       }},
  };
  auto label = [](const Sample& s) { return s.owner_side ? s.t->owner : s.t->consumer; };

  auto split = split_indices(samples.size(), seed);
  std::size_t best = 0;
  double best_val = -1.0;
  std::vector<std::map<std::uint64_t, std::string>> models;
  std::vector<std::string> fallbacks;
  for (std::size_t f = 0; f < features.size(); ++f) {
    std::map<std::uint64_t, std::map<std::string, std::size_t>> counts;
    std::map<std::string, std::size_t> global;
    for (auto i : split.fit) {
      counts[features[f].second(samples[i])][label(samples[i])]++;
      global[label(samples[i])]++;
    }
    std::map<std::uint64_t, std::string> model;
    for (const auto& [bucket, c] : counts) model[bucket] = majority(c);
    models.push_back(std::move(model));
    fallbacks.push_back(majority(global));
    std::size_t hits = 0;
    for (auto i : split.validate) {
      auto it = models[f].find(features[f].second(samples[i]));
      hits += (it != models[f].end() ? it->second : fallbacks[f]) == label(samples[i]);
    }
    const double acc = split.validate.empty() ? 0.0 : double(hits) / double(split.validate.size());
    if (acc > best_val) {
      best_val = acc;
      best = f;
    }
  }
  std::size_t hits = 0;
  for (auto i : split.test) {
    auto it = models[best].find(features[best].second(samples[i]));
    hits += (it != models[best].end() ? it->second : fallbacks[best]) == label(samples[i]);
  }
  return make_report("a", features[best].first, split.test.size(), hits,
                     participants ? 1.0 / double(participants) : 0.0);
}

AttackReport attack_identity_inversion_oracle(const ledger::Chain& chain,
                                              const std::vector<BlockTruth>& truth,
                                              const StoreMap& stores,
                                              std::size_t participants) {
  std::size_t trials = 0;
  std::size_t hits = 0;
  for (const auto& t : truth) {
    const auto& p = block_at(chain, t).payload;
    for (auto [pseudonym, who] : {std::pair{&p.owner_pseudonym, &t.owner},
                                  std::pair{&p.consumer_pseudonym, &t.consumer}}) {
      // Only sides whose store the adversary holds are in scope.
      if (!stores.contains(*who)) continue;
      ++trials;
      hits += store_holder(stores, *pseudonym) == *who;
    }
  }
  return make_report("a", "keystore-oracle", trials, hits,
                     participants ? 1.0 / double(participants) : 0.0);
}

// ---------------------------------------------------------------------------
// (b), (c)

namespace {

using PartnerRule = std::function<std::size_t(std::size_t, const std::vector<std::size_t>&)>;

struct LinkScore {
  std::size_t trials = 0;
  std::size_t hits = 0;
  double baseline_sum = 0.0;
};

LinkScore score_links(const std::vector<BlockTruth>& truth, const std::vector<std::size_t>& set,
                      LinkMode mode, const PartnerRule& rule) {
  LinkScore s;
  if (set.size() < 2) return s;
  std::map<std::string, std::size_t> per_actor;
  for (auto i : set) per_actor[actor(truth[i], mode)]++;
  for (auto i : set) {
    const auto mates = per_actor[actor(truth[i], mode)] - 1;
    if (mates == 0) continue;
    ++s.trials;
    s.baseline_sum += double(mates) / double(set.size() - 1);
    const auto j = rule(i, set);
    s.hits += j != i && actor(truth[j], mode) == actor(truth[i], mode);
  }
  return s;
}

}  // namespace

AttackReport attack_linkage(const ledger::Chain& chain, const std::vector<BlockTruth>& truth,
                            LinkMode mode, std::uint64_t seed) {
  const std::string name = mode == LinkMode::kConsumer ? "b" : "c";
  Rng rng(seed ^ 0x5151);
  auto nearest = [&](std::size_t i, const std::vector<std::size_t>& set,
                     const std::function<std::uint64_t(std::size_t, std::size_t)>& dist) {
    std::size_t best = i;
    auto best_d = std::numeric_limits<std::uint64_t>::max();
    for (auto j : set) {
      if (j == i) continue;
      auto d = dist(i, j);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    return best;
  };
  const std::vector<std::pair<std::string, PartnerRule>> rules = {
      {"random-partner",
       [&](std::size_t i, const std::vector<std::size_t>& set) {
         std::size_t j = i;
         while (j == i) j = set[static_cast<std::size_t>(rng.uniform(0, set.size() - 1))];
         return j;
       }},
      {"nearest-pseudonym-hamming",
       [&](std::size_t i, const std::vector<std::size_t>& set) {
         return nearest(i, set, [&](std::size_t a, std::size_t b) {
           return static_cast<std::uint64_t>(hamming(side(block_at(chain, truth[a]), mode).digest,
                                                     side(block_at(chain, truth[b]), mode).digest));
         });
       }},
      {"nearest-pseudonym-prefix",
       [&](std::size_t i, const std::vector<std::size_t>& set) {
         return nearest(i, set, [&](std::size_t a, std::size_t b) {
           const auto& x = side(block_at(chain, truth[a]), mode).digest;
           const auto& y = side(block_at(chain, truth[b]), mode).digest;
           std::uint64_t u = 0, v = 0;
           for (int k = 0; k < 8; ++k) {
             u = (u << 8) | x[static_cast<std::size_t>(k)];
             v = (v << 8) | y[static_cast<std::size_t>(k)];
           }
           return u > v ? u - v : v - u;
         });
       }},
      {"adjacent-block",
       [&](std::size_t i, const std::vector<std::size_t>& set) {
         return nearest(i, set, [&](std::size_t a, std::size_t b) {
           const auto x = truth[a].index, y = truth[b].index;
           return static_cast<std::uint64_t>(x > y ? x - y : y - x);
         });
       }},
      {"nearest-nonce",
       [&](std::size_t i, const std::vector<std::size_t>& set) {
         return nearest(i, set, [&](std::size_t a, std::size_t b) {
           const auto x = block_at(chain, truth[a]).nonce, y = block_at(chain, truth[b]).nonce;
           return x > y ? x - y : y - x;
         });
       }},
  };

  auto split = split_indices(truth.size(), seed);
  std::vector<std::size_t> training = split.fit;
  training.insert(training.end(), split.validate.begin(), split.validate.end());
  std::size_t best = 0;
  double best_acc = -1.0;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    auto s = score_links(truth, training, mode, rules[r].second);
    const double acc = s.trials ? double(s.hits) / double(s.trials) : 0.0;
    if (acc > best_acc) {
      best_acc = acc;
      best = r;
    }
  }
  auto s = score_links(truth, split.test, mode, rules[best].second);
  return make_report(name, rules[best].first, s.trials, s.hits,
                     s.trials ? s.baseline_sum / double(s.trials) : 0.0);
}

AttackReport attack_linkage_oracle(const ledger::Chain& chain,
                                   const std::vector<BlockTruth>& truth, LinkMode mode,
                                   const StoreMap& stores) {
  std::vector<std::size_t> all(truth.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::optional<std::string>> holder;
  for (const auto& t : truth) holder.push_back(store_holder(stores, side(block_at(chain, t), mode)));
  auto s = score_links(truth, all, mode, [&](std::size_t i, const std::vector<std::size_t>& set) {
    for (auto j : set) {
      if (j != i && holder[j] && holder[j] == holder[i]) return j;
    }
    return i;
  });
  return make_report(mode == LinkMode::kConsumer ? "b" : "c", "keystore-oracle", s.trials, s.hits,
                     s.trials ? s.baseline_sum / double(s.trials) : 0.0);
}

// ---------------------------------------------------------------------------
// (d)

AttackReport attack_post_erasure_leak(const Simulator& sim) {
  protocol::PinnedKeys verifier;
  for (const auto& name : sim.names()) {
    verifier.pin(name, sim.node(name).identity().keys.public_key);
  }
  std::size_t trials = 0;
  std::size_t ok = 0;
  for (const auto& name : sim.names()) {
    const auto& n = sim.node(name);
    for (const auto& rec : n.erasures()) {
      if (rec.counterparty != name || rec.status != node::ErasureStatus::kAcknowledged) continue;
      if (!rec.erased_locally) {
        node::IdentityClaim bare{name, rec.requester, rec.pseudonym, std::nullopt};
        ++trials;
        ok += !node::verify_identity_claim(bare, verifier);
        try {
          auto claim = n.claim_identity_link(rec.pseudonym);
          ++trials;
          ok += node::verify_identity_claim(claim, verifier) &&
                node::claimant_identity(claim, verifier) == name;
        } catch (const Error& e) {
          if (e.code() != Errc::kNoEvidence) throw;
        }
      } else {
        ++trials;
        try {
          n.claim_identity_link(rec.pseudonym);
        } catch (const Error& e) {
          ok += e.code() == Errc::kNoEvidence;
        }
      }
    }
  }
  return make_report("d", "bare-and-evidence-claims", trials, ok, 1.0);
}

// ---------------------------------------------------------------------------
// Traffic analysis

namespace {

struct FlowFeatures {
  bool fake = false;
  std::vector<double> x;
};

const std::vector<std::string> kFlowFeatureNames = {"message-count", "total-bytes",
                                                    "request-size",  "share-size",
                                                    "duration",      "mean-gap"};

std::vector<FlowFeatures> flow_features(const ObserverTrace& trace,
                                        const std::map<std::uint64_t, FlowTruth>& flows) {
  struct Acc {
    std::size_t count = 0, bytes = 0, req = 0, share = 0;
    std::int64_t first = 0, last = 0;
    bool has_req = false, has_end = false;
  };
  std::map<std::uint64_t, Acc> acc;
  for (const auto& r : trace.envelopes) {
    auto& a = acc[r.flow];
    if (a.count == 0) a.first = r.time;
    a.last = r.time;
    ++a.count;
    a.bytes += r.size;
    if (r.type == protocol::MsgType::kRequest) {
      a.has_req = true;
      a.req = r.size;
    }
    if (r.type == protocol::MsgType::kShare && a.share == 0) a.share = r.size;
    if (r.type == protocol::MsgType::kEnd) a.has_end = true;
  }
  std::vector<FlowFeatures> out;
  for (const auto& [flow, a] : acc) {
    auto t = flows.find(flow);
    if (t == flows.end() || t->second.erasure || !a.has_req || !a.has_end) continue;
    const double duration = double(a.last - a.first);
    out.push_back({t->second.fake,
                   {double(a.count), double(a.bytes), double(a.req), double(a.share), duration,
                    a.count > 1 ? duration / double(a.count - 1) : 0.0}});
  }
  return out;
}

struct Stump {
  double threshold = 0.0;
  bool fake_below = false;  // predict fake when x <= threshold
  bool constant = false;
  bool constant_fake = false;

  bool predict(double x) const {
    if (constant) return constant_fake;
    return (x <= threshold) == fake_below;
  }
};

Stump fit_stump(const std::vector<FlowFeatures>& data, const std::vector<std::size_t>& set,
                std::size_t f) {
  Stump best;
  best.constant = true;
  std::size_t fakes = 0;
  for (auto i : set) fakes += data[i].fake;
  best.constant_fake = fakes * 2 > set.size();
  std::size_t best_hits = std::max(fakes, set.size() - fakes);

  std::vector<double> values;
  for (auto i : set) values.push_back(data[i].x[f]);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    const double thr = (values[k] + values[k + 1]) / 2;
    std::size_t below_fake = 0;
    for (auto i : set) below_fake += (data[i].x[f] <= thr) == data[i].fake;
    for (bool fake_below : {true, false}) {
      const std::size_t hits = fake_below ? below_fake : set.size() - below_fake;
      if (hits > best_hits) {
        best_hits = hits;
        best = Stump{thr, fake_below, false, false};
      }
    }
  }
  return best;
}

}  // namespace

AttackReport classify_fake_vs_real(const ObserverTrace& trace,
                                   const std::map<std::uint64_t, FlowTruth>& flows,
                                   std::uint64_t seed) {
  auto data = flow_features(trace, flows);
  auto split = split_indices(data.size(), seed);
  std::size_t best = 0;
  double best_val = -1.0;
  std::vector<Stump> stumps;
  for (std::size_t f = 0; f < kFlowFeatureNames.size(); ++f) {
    stumps.push_back(fit_stump(data, split.fit, f));
    std::size_t hits = 0;
    for (auto i : split.validate) hits += stumps[f].predict(data[i].x[f]) == data[i].fake;
    const double acc = split.validate.empty() ? 0.0 : double(hits) / double(split.validate.size());
    if (acc > best_val) {
      best_val = acc;
      best = f;
    }
  }
  std::size_t hits = 0;
  std::size_t fakes = 0;
  for (auto i : split.test) {
    hits += stumps[best].predict(data[i].x[best]) == data[i].fake;
    fakes += data[i].fake;
  }
  const auto n = split.test.size();
  const double baseline = n ? double(std::max(fakes, n - fakes)) / double(n) : 0.0;
  std::string heuristic = "stump:" + kFlowFeatureNames[best];
  if (fakes == 0 || fakes == n) heuristic = "degenerate:single-class";
  return make_report("fake-vs-real", heuristic, n, hits, baseline);
}

AttackReport attribute_blocks(const ObserverTrace& trace,
                              const std::map<std::uint64_t, FlowTruth>& flows,
                              const std::vector<BlockTruth>& truth, std::size_t participants) {
  std::vector<std::pair<std::int64_t, std::string>> ends;  // (time, owner)
  for (const auto& r : trace.envelopes) {
    if (r.type != protocol::MsgType::kEnd) continue;
    auto t = flows.find(r.flow);
    if (t == flows.end()) continue;
    ends.emplace_back(r.time, r.src);
  }
  std::map<Digest, std::int64_t> first_seen;
  for (const auto& b : trace.blocks) first_seen.emplace(b.hash, b.time);

  std::size_t trials = 0;
  std::size_t hits = 0;
  for (const auto& t : truth) {
    auto seen = first_seen.find(t.hash);
    if (seen == first_seen.end()) continue;
    ++trials;
    // Latest completed session at or before the sighting.
    auto it = std::upper_bound(ends.begin(), ends.end(), seen->second,
                               [](std::int64_t v, const auto& e) { return v < e.first; });
    if (it == ends.begin()) continue;
    hits += std::prev(it)->second == t.owner;
  }
  return make_report("block-attribution", "latest-completed-session", trials, hits,
                     participants ? 1.0 / double(participants) : 0.0);
}

}  // namespace p3::sim
