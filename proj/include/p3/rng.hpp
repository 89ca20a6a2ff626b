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
#include <memory>
#include <span>
#include <string_view>

#include "p3/bytes.hpp"

namespace p3 {

using Seed = ByteArray<32>;

// ChaCha20 keystream generator. Every randomized operation in the library
// takes one of these, so a seeded instance makes whole simulations
// reproducible. Not thread-safe; give each thread its own instance.
class Rng {
 public:
  explicit Rng(const Seed& seed);
  explicit Rng(std::uint64_t seed);
  // Seeded from the operating system entropy pool.
  static Rng from_os();

  Rng(Rng&&) noexcept;
  Rng& operator=(Rng&&) noexcept;
  ~Rng();

  void fill(std::span<std::uint8_t> out);
  Bytes bytes(std::size_t n);
  template <std::size_t N>
  ByteArray<N> array() {
    ByteArray<N> out{};
    fill(out);
    return out;
  }

  std::uint64_t next_u64();
  // Uniform integer in [lo, hi], both inclusive.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi);
  // Uniform double in [0, 1).
  double unit();
  // Exponentially distributed value with the given rate (> 0).
  double exponential(double rate);
  bool bernoulli(double p) { return unit() < p; }

  // Independent child stream; the label separates sibling streams.
  Rng fork(std::string_view label);

 private:
  void refill();

  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace p3
