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

// p3: command-line front end.
//
// Exit codes: 0 success or "true" verdict, 1 "false" verdict, 2 parse or
// usage error, 3 runtime failure (including an invalid chain in `query`),
// 4 undecryptable store.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "p3/crypto/pseudonym.hpp"
#include "p3/error.hpp"
#include "p3/io.hpp"
#include "p3/protocol/evidence_file.hpp"
#include "p3/sim/attacks.hpp"
#include "p3/sim/scenario.hpp"

namespace fs = std::filesystem;
using namespace p3;

namespace {

constexpr int kExitFalse = 1;
constexpr int kExitParse = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitStore = 4;

// Carries an exit code out of a command.
struct Exit {
  int code;
};

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string config;
  bool porcelain = false;
};

std::string text_of(const fs::path& p) {
  auto b = read_file(p);
  return {b.begin(), b.end()};
}

node::NodeConfig base_config(const Globals& g) {
  if (g.config.empty()) return {};
  try {
    return node::NodeConfig::parse(text_of(g.config));
  } catch (const Error& e) {
    std::cerr << "p3: " << g.config << ": " << e.what() << "\n";
    throw Exit{e.code() == Errc::kIo ? kExitRuntime : kExitParse};
  }
}

sim::Scenario load_scenario(const std::string& path, const Globals& g) {
  std::string text;
  try {
    text = text_of(path);
  } catch (const Error& e) {
    std::cerr << "p3: " << e.what() << "\n";
    throw Exit{kExitParse};
  }
  try {
    auto sc = sim::Scenario::parse(text, base_config(g));
    if (g.seed) sc.config.seed = *g.seed;
    return sc;
  } catch (const Error& e) {
    std::cerr << "p3: " << path << ": " << e.what() << "\n";
    throw Exit{kExitParse};
  }
}

std::string short_hex(const crypto::Pseudonym& p) { return p.hex().substr(0, 16); }

std::vector<sim::AttackReport> attack_reports(const sim::Simulator& s) {
  const auto names = s.names();
  const auto chain = s.node(names.front()).chain();
  const auto truth = sim::block_truth(s, chain);
  sim::StoreMap stores;
  for (const auto& n : names) stores[n] = &s.node(n).keystore();
  const auto seed = s.config().seed;
  const auto k = names.size();
  return {
      sim::attack_identity_inversion(chain, truth, k, seed),
      sim::attack_identity_inversion_oracle(chain, truth, stores, k),
      sim::attack_linkage(chain, truth, sim::LinkMode::kConsumer, seed),
      sim::attack_linkage_oracle(chain, truth, sim::LinkMode::kConsumer, stores),
      sim::attack_linkage(chain, truth, sim::LinkMode::kOwner, seed),
      sim::attack_linkage_oracle(chain, truth, sim::LinkMode::kOwner, stores),
      sim::attack_post_erasure_leak(s),
      sim::classify_fake_vs_real(s.trace(), s.flows(), seed),
      sim::attribute_blocks(s.trace(), s.flows(), truth, k),
  };
}

void write_outputs(const sim::Simulator& s, const fs::path& dir) {
  fs::create_directories(dir / "chains");
  fs::create_directories(dir / "stores");
  fs::create_directories(dir / "evidence");
  std::string outcomes;
  for (const auto& name : s.names()) {
    const auto& n = s.node(name);
    n.chain().save(dir / "chains" / (name + ".p3lg"));
    n.keystore().save(dir / "stores" / (name + ".p3ks"));
    for (const auto& e : n.keystore().entries()) {
      if (!e.evidence || !e.counterparty_identity) continue;
      auto key = n.trust().key_for(*e.counterparty_identity);
      if (!key) continue;
      protocol::EvidenceFile f;
      f.kind = e.role == keystore::Role::kOwner ? protocol::EvidenceFile::Kind::kOwner
                                                : protocol::EvidenceFile::Kind::kConsumer;
      f.signer_id = *e.counterparty_identity;
      f.signer_key = *key;
      f.evidence = *e.evidence;
      write_file_atomic(dir / "evidence" / (name + "-" + short_hex(e.pseudonym) + ".p3ev"),
                        f.encode());
    }
    for (const auto& o : n.outcomes()) {
      outcomes += name + " " + o.owner + " " + (o.fake ? "fake" : "real") + " " +
                  (o.success ? "ok" : "failed") + " " + std::to_string(o.started) + " " +
                  std::to_string(o.finished) + "\n";
    }
  }
  write_file_atomic(dir / "trace.txt", as_bytes(s.trace().export_text()));
  write_file_atomic(dir / "outcomes.txt", as_bytes(outcomes));
  std::string reports;
  for (const auto& r : attack_reports(s)) reports += r.to_line() + "\n";
  write_file_atomic(dir / "reports.txt", as_bytes(reports));
}

void print_summary(const sim::Simulator& s, const Globals& g) {
  std::size_t ok = 0;
  std::size_t failed = 0;
  for (const auto& name : s.names()) {
    for (const auto& o : s.node(name).outcomes()) (o.success ? ok : failed)++;
  }
  const auto& first = s.node(s.names().front());
  if (g.porcelain) {
    std::cout << "nodes\t" << s.names().size() << "\n"
              << "height\t" << first.height() << "\n"
              << "tip\t" << to_hex(first.tip()) << "\n"
              << "converged\t" << (s.converged() ? 1 : 0) << "\n"
              << "sessions_ok\t" << ok << "\n"
              << "sessions_failed\t" << failed << "\n";
    return;
  }
  std::cout << s.names().size() << " nodes, chain height " << first.height() << ", "
            << (s.converged() ? "converged" : "NOT converged") << "\n"
            << ok << " sessions completed, " << failed << " failed\n";
}

int cmd_simulate(const std::string& scenario, const std::string& out, const Globals& g) {
  auto sc = load_scenario(scenario, g);
  std::unique_ptr<sim::Simulator> s;
  try {
    s = sim::run_scenario(sc);
    print_summary(*s, g);
    if (!out.empty()) write_outputs(*s, out);
  } catch (const Error& e) {
    std::cerr << "p3: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}

int cmd_query(const std::string& chain_path, const std::string& store_path, const Globals& g) {
  ledger::Chain chain;
  try {
    chain = ledger::Chain::load(chain_path);
  } catch (const Error& e) {
    std::cerr << "p3: " << chain_path << ": " << e.what() << "\n";
    return kExitRuntime;
  }
  if (auto err = ledger::validate_chain(chain)) {
    std::cerr << "p3: " << chain_path << ": invalid chain at block " << err->index << " ("
              << ledger::validation_kind_name(err->kind) << ")\n";
    return kExitRuntime;
  }
  std::optional<keystore::KeyStore> store;
  try {
    store.emplace(keystore::KeyStore::load(store_path));
  } catch (const Error& e) {
    std::cerr << "p3: " << store_path << ": cannot open store: " << e.what() << "\n";
    return kExitStore;
  }
  bool undecryptable = false;
  for (const auto& e : ledger::read_own_entries(chain, *store)) {
    const auto& entry = store->lookup(e.pseudonym);
    const auto role = keystore::role_name(e.role);
    std::string status = entry.erased ? "anonymized" : "ok";
    if (e.status == ledger::OwnEntry::Status::kAuthenticationFailure ||
        e.status == ledger::OwnEntry::Status::kMalformed) {
      status = std::string(ledger::own_entry_status_name(e.status));
      undecryptable = true;
    }
    std::string ts = "-";
    std::string datum = "-";
    std::string purpose = "-";
    if (e.record) {
      ts = std::to_string(e.record->timestamp);
      datum = to_hex(e.record->datum_id);
      purpose = e.record->purpose;
    }
    if (g.porcelain) {
      std::cout << e.block_index << '\t' << ts << '\t' << datum << '\t' << purpose << '\t' << role
                << '\t' << status << '\n';
    } else {
      std::cout << "block " << e.block_index << "  time " << ts << "  datum " << datum
                << "  purpose \"" << purpose << "\"  (" << role
                << (status == "ok" ? "" : ", " + status) << ")\n";
    }
  }
  return undecryptable ? kExitStore : 0;
}

int cmd_erase(const std::string& scenario, const std::string& node_name,
              const std::string& pseudonym, const std::string& out, const Globals& g) {
  auto sc = load_scenario(scenario, g);
  try {
    auto s = sim::run_scenario(sc);
    auto& n = s->node(node_name);
    std::optional<crypto::Pseudonym> target;
    if (pseudonym == "last") {
      const auto& entries = n.keystore().entries();
      for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
        if (!it->erased && it->counterparty_identity) {
          target = it->pseudonym;
          break;
        }
      }
      if (!target) throw Error(Errc::kUnknownPseudonym, node_name + " has nothing to erase");
    } else {
      target = crypto::Pseudonym::from_hex(pseudonym);
    }
    n.request_erasure(*target);
    s->run_until(s->now() + 20 * protocol::kStepTimeout);
    const auto& rec = n.erasures().back();
    const bool ok = rec.status == node::ErasureStatus::kAcknowledged;
    if (g.porcelain) {
      std::cout << (ok ? "ERASED" : "REFUSED") << '\t' << target->hex() << '\t' << rec.counterparty
                << '\t' << rec.detail << '\n';
    } else if (ok) {
      std::cout << "ERASED " << target->hex() << ": " << rec.counterparty
                << " acknowledged; local link dropped\n";
    } else {
      std::cout << "REFUSED " << target->hex() << ": "
                << (rec.detail.empty() ? "no answer" : rec.detail) << "\n";
    }
    if (!out.empty()) write_outputs(*s, out);
    return ok ? 0 : kExitFalse;
  } catch (const Error& e) {
    std::cerr << "p3: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_verify_evidence(const std::string& path, const Globals& g) {
  Bytes data;
  try {
    data = read_file(path);
  } catch (const Error& e) {
    std::cerr << "p3: " << e.what() << "\n";
    return kExitRuntime;
  }
  const bool ok = protocol::verify_evidence_file(data);
  (void)g;
  std::cout << (ok ? "VALID" : "INVALID") << "\n";
  return ok ? 0 : kExitFalse;
}

Rng make_rng(const Globals& g) { return g.seed ? Rng(*g.seed) : Rng::from_os(); }

int cmd_keygen(const std::string& out, int bits, const Globals& g) {
  try {
    auto rng = make_rng(g);
    auto identity = crypto::generate_keypair(bits, rng);
    keystore::KeyStore store(keystore::generate_master(rng, 0), bits);
    fs::create_directories(out);
    write_file_atomic(fs::path(out) / "identity.key", identity.encode());
    write_file_atomic(fs::path(out) / "identity.pub", identity.public_key.canonical());
    store.save(fs::path(out) / "store.p3ks");
    const auto fp = crypto::derive_pseudonym(identity.public_key).hex();
    if (g.porcelain) {
      std::cout << "identity\t" << fp << "\n";
    } else {
      std::cout << "identity key fingerprint " << fp << "\n"
                << "wrote identity.key, identity.pub and store.p3ks to " << out << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "p3: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_shard_export(const std::string& store_path, int k, int m, const std::string& out,
                     const Globals& g) {
  std::optional<keystore::KeyStore> store;
  try {
    store.emplace(keystore::KeyStore::load(store_path));
  } catch (const Error& e) {
    std::cerr << "p3: " << store_path << ": cannot open store: " << e.what() << "\n";
    return kExitStore;
  }
  try {
    auto rng = make_rng(g);
    auto shards = store->export_shards(k, m, rng);
    fs::create_directories(out);
    for (const auto& s : shards.shards) {
      const auto p = fs::path(out) / ("shard-" + std::to_string(s.index) + ".p3sh");
      write_file_atomic(p, s.encode());
      std::cout << (g.porcelain ? "" : "wrote ") << p.string() << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "p3: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_shard_restore(const std::vector<std::string>& shard_paths, const std::string& out,
                      const std::string& check, int bits, const Globals& g) {
  try {
    std::vector<crypto::KeyShard> shards;
    for (const auto& p : shard_paths) shards.push_back(crypto::KeyShard::decode(read_file(p)));
    auto master = keystore::KeyStore::restore_from_shards(shards);
    if (!check.empty()) {
      const auto existing = keystore::KeyStore::load(check);
      const bool same = existing.master() == master;
      std::cout << (same ? "MATCH" : "MISMATCH") << "\n";
      if (!same) return kExitFalse;
    }
    if (!out.empty()) {
      keystore::KeyStore(master, bits).save(out);
      if (!g.porcelain) std::cout << "restored master key written to " << out << "\n";
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "p3: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_validate_chain(const std::string& path, const std::string& anchor, const Globals& g) {
  try {
    auto chain = ledger::Chain::load(path);
    std::optional<crypto::Digest> a;
    if (!anchor.empty()) a = array_from_hex<crypto::kDigestSize>(anchor);
    const auto err = ledger::validate_chain(chain, a);
    const auto height = chain.blocks().size() - 1;
    if (!err) {
      const auto tip = to_hex(chain.hashes().back());
      if (g.porcelain) {
        std::cout << "VALID\t" << height << '\t' << tip << "\n";
      } else {
        std::cout << "VALID: height " << height << ", tip " << tip << "\n";
      }
      return 0;
    }
    const auto kind = ledger::validation_kind_name(err->kind);
    if (g.porcelain) {
      std::cout << "INVALID\t" << err->index << '\t' << kind << "\n";
    } else {
      std::cout << "INVALID: block " << err->index << ": " << kind << "\n";
    }
    return kExitFalse;
  } catch (const Error& e) {
    std::cerr << "p3: " << path << ": " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p3: private pseudonyms for blockchain usage logs"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for randomness (overrides a scenario's seed)");
  app.add_option("--config", g.config, "Node config file (key = value lines)");
  app.add_flag("--porcelain", g.porcelain, "Machine-readable output, one record per line");

  std::string scenario;
  std::string out;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario script");
  simulate->add_option("scenario", scenario, "Scenario file")->required();
  simulate->add_option("--out", out, "Directory for chains, stores, evidence, trace and reports");

  std::string chain_path;
  std::string store_path;
  auto* query = app.add_subcommand("query", "List own entries of a store found on a chain");
  query->add_option("chain", chain_path, "Chain file")->required();
  query->add_option("store", store_path, "Key store file")->required();

  std::string node_name;
  std::string pseudonym = "last";
  auto* erase = app.add_subcommand("erase", "Run a scenario, then send one erasure request");
  erase->add_option("scenario", scenario, "Scenario file")->required();
  erase->add_option("--node", node_name, "Requesting node")->required();
  erase->add_option("--pseudonym", pseudonym, "Own pseudonym (hex) or 'last'");
  erase->add_option("--out", out, "Write the resulting files here");

  std::string evidence_path;
  auto* verify = app.add_subcommand("verify-evidence", "Check an evidence file");
  verify->add_option("file", evidence_path, "Evidence file")->required();

  int bits = crypto::kDefaultKeyBits;
  auto* keygen = app.add_subcommand("keygen", "Create an identity key and an empty key store");
  keygen->add_option("--out", out, "Output directory")->required();
  keygen->add_option("--bits", bits, "RSA modulus size (2048, 3072 or 4096)");

  int k = 2;
  int m = 3;
  auto* shard_export = app.add_subcommand("shard-export", "Split a store's master key");
  shard_export->add_option("store", store_path, "Key store file")->required();
  shard_export->add_option("-k", k, "Shards needed to restore");
  shard_export->add_option("-m", m, "Shards produced");
  shard_export->add_option("--out", out, "Output directory")->required();

  std::vector<std::string> shard_paths;
  std::string check;
  auto* shard_restore = app.add_subcommand("shard-restore", "Recover a master key from shards");
  shard_restore->add_option("shards", shard_paths, "Shard files")->required();
  shard_restore->add_option("--out", out, "Write a fresh store holding the master key");
  shard_restore->add_option("--check", check, "Compare against this store's master key");
  shard_restore->add_option("--bits", bits, "Sub-key size for the written store");

  std::string anchor;
  auto* validate = app.add_subcommand("validate-chain", "Check links and work of a chain file");
  validate->add_option("chain", chain_path, "Chain file")->required();
  validate->add_option("--anchor", anchor, "Expected tip hash (hex)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  try {
    if (*simulate) return cmd_simulate(scenario, out, g);
    if (*query) return cmd_query(chain_path, store_path, g);
    if (*erase) return cmd_erase(scenario, node_name, pseudonym, out, g);
    if (*verify) return cmd_verify_evidence(evidence_path, g);
    if (*keygen) return cmd_keygen(out, bits, g);
    if (*shard_export) return cmd_shard_export(store_path, k, m, out, g);
    if (*shard_restore) return cmd_shard_restore(shard_paths, out, check, bits, g);
    if (*validate) return cmd_validate_chain(chain_path, anchor, g);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "p3: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitParse;
}
