// Copyright 2026 The mgw Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace mgw {

/// Context tags mixed into derived streams.
enum class RngTag : std::uint64_t {
  kTreeVertex = 1,
  kExcursion = 2,
  kPermutation = 3,
  kDecorationChild = 4,
  kField = 5,
  kSubsample = 6,
  kConditionedAttempt = 7,
  kReplica = 8,
};

/// Counter-based random source. Draw k under context c is a pure function of
/// (master_seed, c, k): a 128-bit hash of the context is computed once, and
/// each draw mixes the draw index into it.
class RngSpec {
 public:
  explicit RngSpec(std::uint64_t master_seed = 0);

  std::uint64_t master_seed() const { return seed_; }

  /// Extends the context with more words.
  RngSpec derive(std::initializer_list<std::uint64_t> words) const;
  RngSpec derive(RngTag tag, std::uint64_t a) const { return derive({static_cast<std::uint64_t>(tag), a}); }
  RngSpec derive(RngTag tag, std::uint64_t a, std::uint64_t b) const {
    return derive({static_cast<std::uint64_t>(tag), a, b});
  }
  RngSpec replica(std::uint64_t r) const { return derive(RngTag::kReplica, r); }

  std::uint64_t bits(std::uint64_t index) const;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 2> state_;
};

/// Sequential draws from one RngSpec context.
class RngStream {
 public:
  explicit RngStream(RngSpec spec) : spec_(spec) {}

  std::uint64_t next_bits() { return spec_.bits(counter_++); }
  double next_uniform() { return spec_.uniform(counter_++); }
  /// Uniform on {0, ..., n-1}, n >= 1, without modulo bias.
  std::uint64_t next_below(std::uint64_t n);
  std::uint64_t draws() const { return counter_; }

 private:
  RngSpec spec_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> uniform_permutation(std::size_t n, RngStream& stream);

}  // namespace mgw
