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

#include <cstddef>
#include <vector>

namespace mgw {

/// Dinic's algorithm on real capacities. Sized for small dense networks.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes);

  void add_edge(std::size_t from, std::size_t to, double capacity);
  double run(std::size_t source, std::size_t sink);

 private:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    double cap;
  };

  bool levels(std::size_t s, std::size_t t);
  double push(std::size_t u, std::size_t t, double limit);

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

}  // namespace mgw
