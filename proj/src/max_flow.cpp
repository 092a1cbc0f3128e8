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

#include "mgw/max_flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace mgw {

namespace {
constexpr double kFlowEps = 1e-15;
}

MaxFlow::MaxFlow(std::size_t nodes) : graph_(nodes), level_(nodes), next_(nodes) {}

void MaxFlow::add_edge(std::size_t from, std::size_t to, double capacity) {
  graph_[from].push_back({to, graph_[to].size(), capacity});
  graph_[to].push_back({from, graph_[from].size() - 1, 0.0});
}

bool MaxFlow::levels(std::size_t s, std::size_t t) {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<std::size_t> q;
  level_[s] = 0;
  q.push(s);
  while (!q.empty()) {
    std::size_t u = q.front();
    q.pop();
    for (const auto& e : graph_[u]) {
      if (e.cap > kFlowEps && level_[e.to] < 0) {
        level_[e.to] = level_[u] + 1;
        q.push(e.to);
      }
    }
  }
  return level_[t] >= 0;
}

double MaxFlow::push(std::size_t u, std::size_t t, double limit) {
  if (u == t) return limit;
  for (; next_[u] < graph_[u].size(); ++next_[u]) {
    Edge& e = graph_[u][next_[u]];
    if (e.cap <= kFlowEps || level_[e.to] != level_[u] + 1) continue;
    double got = push(e.to, t, std::min(limit, e.cap));
    if (got > kFlowEps) {
      e.cap -= got;
      graph_[e.to][e.rev].cap += got;
      return got;
    }
  }
  return 0.0;
}

double MaxFlow::run(std::size_t source, std::size_t sink) {
  double total = 0.0;
  while (levels(source, sink)) {
    std::fill(next_.begin(), next_.end(), 0);
    for (;;) {
      double got = push(source, sink, std::numeric_limits<double>::infinity());
      if (got <= kFlowEps) break;
      total += got;
    }
  }
  return total;
}

}  // namespace mgw
