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

#include "p3/protocol/driver.hpp"

#include "p3/error.hpp"

namespace p3::protocol {

RunResult run_session(const Parties& p, const DatumId& datum_id, const std::string& purpose,
                      OneTimeKey consumer_onetime, OneTimeKey owner_onetime, Rng& rng,
                      const RunOptions& options) {
  RunResult r;
  auto [request, cs] =
      consumer_start(*p.consumer, p.owner->id, datum_id, purpose, std::move(consumer_onetime), rng);
  auto [accept, os] = owner_accept(*p.owner, *p.owner_trust, p.datums, request, p.policy,
                                   std::move(owner_onetime), rng);
  r.consumer = std::move(cs);
  r.owner = std::move(os);
  const auto& consumer_pub = p.consumer->keys.public_key;
  const auto& owner_pub = p.owner->keys.public_key;
  consumer_accept(r.consumer, accept, owner_pub);

  std::optional<AckMessage> ack;
  while (true) {
    auto out = owner_step(r.owner, ack ? &*ack : nullptr, consumer_pub, *p.owner, rng);
    if (auto* done = std::get_if<Completed>(&out)) {
      r.end_sent = true;
      auto result = consumer_finalize(r.consumer, done->end, owner_pub);
      r.datum = std::move(result.datum);
      r.consumer_evidence = std::move(result.evidence);
      r.owner_evidence = owner_evidence(r.owner);
      return r;
    }
    auto& share = std::get<ShareMessage>(out);
    ++r.share_messages;
    ack = consumer_step(r.consumer, share, owner_pub, *p.consumer, rng);
    if (options.stop_after && share.x == *options.stop_after) {
      // The ack is never delivered.
      owner_timeout(r.owner);
      try {
        r.datum = compose_datum(r.consumer.meta, r.consumer.shares);
      } catch (const Error& e) {
        if (e.code() != Errc::kChecksumMismatch) throw;
      }
      return r;
    }
    ++r.ack_messages;
  }
}

CheatOutcome cheat_strategy_stop_at(std::uint32_t k, const Parties& p, const DatumId& datum_id,
                                    OneTimeKey consumer_onetime, OneTimeKey owner_onetime,
                                    Rng& rng) {
  RunOptions opts;
  opts.stop_after = k;
  auto r = run_session(p, datum_id, "", std::move(consumer_onetime), std::move(owner_onetime),
                       rng, opts);
  CheatOutcome out;
  out.n = r.owner.meta.n;
  out.k = k;
  out.obtained_datum = r.datum.has_value();
  out.owner_has_ack_n = r.owner_has_ack_n();
  return out;
}

}  // namespace p3::protocol
