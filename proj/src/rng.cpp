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

#include "mgw/rng.hpp"

#include <numeric>

#include "mgw/common.hpp"

namespace mgw {

namespace {

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kLaneA = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kLaneB = 0xd1b54a32d192ed03ULL;

}  // namespace

RngSpec::RngSpec(std::uint64_t master_seed) : seed_(master_seed) {
  state_[0] = mix64(master_seed ^ kLaneA);
  state_[1] = mix64(master_seed + kLaneB);
}

RngSpec RngSpec::derive(std::initializer_list<std::uint64_t> words) const {
  RngSpec out = *this;
  for (std::uint64_t w : words) {
    std::uint64_t a = mix64(out.state_[0] ^ mix64(w + kLaneA));
    std::uint64_t b = mix64(out.state_[1] + mix64(w ^ kLaneB) + a);
    out.state_ = {a, b};
  }
  return out;
}

std::uint64_t RngSpec::bits(std::uint64_t index) const {
  std::uint64_t a = mix64(state_[0] ^ (index * kLaneA + kLaneB));
  return mix64(a ^ state_[1] ^ (index + 1) * kLaneB);
}

double RngSpec::uniform(std::uint64_t index) const {
  return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  if (n == 0) throw InvalidInput("next_below needs n >= 1");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    std::uint64_t r = next_bits();
    if (r < limit) return r % n;
  }
}

std::vector<std::size_t> uniform_permutation(std::size_t n, RngStream& stream) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t k = n; k > 1; --k) {
    std::size_t j = static_cast<std::size_t>(stream.next_below(k));
    std::swap(p[k - 1], p[j]);
  }
  return p;
}

}  // namespace mgw
