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

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace mgw {

/// A vertex of the Ulam-Harris tree: a finite word over the positive
/// integers. The empty word is the root.
class UlamLabel {
 public:
  UlamLabel() = default;
  UlamLabel(std::initializer_list<std::int64_t> entries);
  explicit UlamLabel(std::vector<std::int64_t> entries);

  static UlamLabel root() { return {}; }

  const std::vector<std::int64_t>& entries() const { return entries_; }
  std::size_t generation() const { return entries_.size(); }
  bool is_root() const { return entries_.empty(); }

  /// The word with `letter` appended.
  UlamLabel child(std::int64_t letter) const;
  /// Concatenation p·q.
  UlamLabel concat(const UlamLabel& suffix) const;
  /// Drops the last letter. Requires a non-root label.
  UlamLabel parent() const;
  std::int64_t last() const;
  /// The length-`n` prefix.
  UlamLabel prefix(std::size_t n) const;
  bool is_prefix_of(const UlamLabel& other) const;

  /// Lexicographic on words, shorter prefix first.
  friend auto operator<=>(const UlamLabel&, const UlamLabel&) = default;
  friend bool operator==(const UlamLabel&, const UlamLabel&) = default;

  /// "()" for the root, otherwise "(2,5,1)".
  std::string to_string() const;

 private:
  std::vector<std::int64_t> entries_;
};

/// Longest common prefix.
UlamLabel common_ancestor(const UlamLabel& a, const UlamLabel& b);

/// Letter used for the m-th (1-based) child of type j among d types.
inline std::int64_t label_letter(int type, std::int64_t rank, int type_count) {
  return type + (rank - 1) * type_count;
}

/// Type encoded by a letter: ((letter - 1) mod d) + 1.
inline int letter_type(std::int64_t letter, int type_count) {
  return static_cast<int>((letter - 1) % type_count) + 1;
}

/// Rank m of a letter within its residue class.
inline std::int64_t letter_rank(std::int64_t letter, int type_count) {
  return (letter - 1) / type_count + 1;
}

}  // namespace mgw
