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

#include "mgw/ulam.hpp"

#include <algorithm>
#include <sstream>

#include "mgw/common.hpp"

namespace mgw {

UlamLabel::UlamLabel(std::initializer_list<std::int64_t> entries)
    : UlamLabel(std::vector<std::int64_t>(entries)) {}

UlamLabel::UlamLabel(std::vector<std::int64_t> entries) : entries_(std::move(entries)) {
  for (auto e : entries_) {
    if (e < 1) throw InvalidInput("Ulam label entries must be >= 1");
  }
}

UlamLabel UlamLabel::child(std::int64_t letter) const {
  if (letter < 1) throw InvalidInput("Ulam label entries must be >= 1");
  UlamLabel out = *this;
  out.entries_.push_back(letter);
  return out;
}

UlamLabel UlamLabel::concat(const UlamLabel& suffix) const {
  UlamLabel out = *this;
  out.entries_.insert(out.entries_.end(), suffix.entries_.begin(), suffix.entries_.end());
  return out;
}

UlamLabel UlamLabel::parent() const {
  if (entries_.empty()) throw InvalidInput("root label has no parent");
  UlamLabel out = *this;
  out.entries_.pop_back();
  return out;
}

std::int64_t UlamLabel::last() const {
  if (entries_.empty()) throw InvalidInput("root label has no last letter");
  return entries_.back();
}

UlamLabel UlamLabel::prefix(std::size_t n) const {
  UlamLabel out;
  out.entries_.assign(entries_.begin(),
                      entries_.begin() + static_cast<std::ptrdiff_t>(std::min(n, entries_.size())));
  return out;
}

bool UlamLabel::is_prefix_of(const UlamLabel& other) const {
  return entries_.size() <= other.entries_.size() &&
         std::equal(entries_.begin(), entries_.end(), other.entries_.begin());
}

std::string UlamLabel::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (k) os << ',';
    os << entries_[k];
  }
  os << ')';
  return os.str();
}

UlamLabel common_ancestor(const UlamLabel& a, const UlamLabel& b) {
  const auto& x = a.entries();
  const auto& y = b.entries();
  std::size_t n = 0;
  while (n < x.size() && n < y.size() && x[n] == y[n]) ++n;
  return a.prefix(n);
}

}  // namespace mgw
