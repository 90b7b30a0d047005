#include "confdim/vertex_cut.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace confdim {

namespace {

// Dinic's algorithm on an explicit residual graph.
class FlowNetwork {
 public:
  explicit FlowNetwork(int n) : head_(static_cast<std::size_t>(n), -1), level_(static_cast<std::size_t>(n)), it_(static_cast<std::size_t>(n)) {}

  void add_edge(int u, int v, long long cap) {
    edges_.push_back({v, head_[static_cast<std::size_t>(u)], cap});
    head_[static_cast<std::size_t>(u)] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({u, head_[static_cast<std::size_t>(v)], 0});
    head_[static_cast<std::size_t>(v)] = static_cast<int>(edges_.size()) - 1;
  }

  long long max_flow(int s, int t, long long limit) {
    long long flow = 0;
    while (flow < limit && bfs(s, t)) {
      std::copy(head_.begin(), head_.end(), it_.begin());
      while (flow < limit) {
        const long long pushed = dfs(s, t, limit - flow);
        if (pushed == 0) break;
        flow += pushed;
      }
    }
    return flow;
  }

  /// Vertices reachable from s in the residual graph.
  std::vector<char> reachable(int s) const {
    std::vector<char> seen(head_.size(), 0);
    std::vector<int> stack{s};
    seen[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int e = head_[static_cast<std::size_t>(u)]; e >= 0; e = edges_[static_cast<std::size_t>(e)].next) {
        const auto& ed = edges_[static_cast<std::size_t>(e)];
        if (ed.cap > 0 && !seen[static_cast<std::size_t>(ed.to)]) {
          seen[static_cast<std::size_t>(ed.to)] = 1;
          stack.push_back(ed.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Edge {
    int to;
    int next;
    long long cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int e = head_[static_cast<std::size_t>(u)]; e >= 0; e = edges_[static_cast<std::size_t>(e)].next) {
        const auto& ed = edges_[static_cast<std::size_t>(e)];
        if (ed.cap > 0 && level_[static_cast<std::size_t>(ed.to)] < 0) {
          level_[static_cast<std::size_t>(ed.to)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push(ed.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(t)] >= 0;
  }

  long long dfs(int u, int t, long long f) {
    if (u == t) return f;
    for (int& e = it_[static_cast<std::size_t>(u)]; e >= 0; e = edges_[static_cast<std::size_t>(e)].next) {
      auto& ed = edges_[static_cast<std::size_t>(e)];
      if (ed.cap <= 0 || level_[static_cast<std::size_t>(ed.to)] != level_[static_cast<std::size_t>(u)] + 1) continue;
      const long long got = dfs(ed.to, t, std::min(f, ed.cap));
      if (got > 0) {
        ed.cap -= got;
        edges_[static_cast<std::size_t>(e ^ 1)].cap += got;
        return got;
      }
    }
    return 0;
  }

  std::vector<Edge> edges_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> it_;
};

}  // namespace

VertexCutResult min_vertex_cut(const NerveGraph& graph, std::span<const VertexId> sources,
                               std::span<const VertexId> sinks, const std::vector<char>& cuttable,
                               const std::vector<char>* active) {
  const int n = static_cast<int>(graph.vertex_count());
  auto is_active = [&](VertexId v) { return active == nullptr || (*active)[static_cast<std::size_t>(v)] != 0; };

  // Local numbering: vertex v -> in = 2*idx, out = 2*idx + 1.
  std::vector<int> local(static_cast<std::size_t>(n), -1);
  int count = 0;
  long long finite_total = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (!is_active(v)) continue;
    local[static_cast<std::size_t>(v)] = count++;
    if (cuttable[static_cast<std::size_t>(v)]) ++finite_total;
  }
  const long long inf = finite_total + 1;
  const int s = 2 * count;
  const int t = s + 1;
  FlowNetwork net(2 * count + 2);
  for (VertexId v = 0; v < n; ++v) {
    const int lv = local[static_cast<std::size_t>(v)];
    if (lv < 0) continue;
    net.add_edge(2 * lv, 2 * lv + 1, cuttable[static_cast<std::size_t>(v)] ? 1 : inf);
    for (VertexId u : graph.neighbors(v)) {
      const int lu = local[static_cast<std::size_t>(u)];
      if (lu >= 0) net.add_edge(2 * lv + 1, 2 * lu, inf);
    }
  }
  bool any_source = false;
  bool any_sink = false;
  for (VertexId v : sources) {
    const int lv = local[static_cast<std::size_t>(v)];
    if (lv >= 0) {
      net.add_edge(s, 2 * lv, inf);
      any_source = true;
    }
  }
  for (VertexId v : sinks) {
    const int lv = local[static_cast<std::size_t>(v)];
    if (lv >= 0) {
      net.add_edge(2 * lv + 1, t, inf);
      any_sink = true;
    }
  }
  VertexCutResult out;
  if (!any_source || !any_sink) return out;
  const long long flow = net.max_flow(s, t, inf);
  if (flow >= inf) {
    out.infinite = true;
    return out;
  }
  out.size = static_cast<int>(flow);
  const auto seen = net.reachable(s);
  for (VertexId v = 0; v < n; ++v) {
    const int lv = local[static_cast<std::size_t>(v)];
    if (lv >= 0 && seen[static_cast<std::size_t>(2 * lv)] && !seen[static_cast<std::size_t>(2 * lv + 1)]) {
      out.cut.push_back(v);
    }
  }
  return out;
}

bool separates(const NerveGraph& graph, std::span<const VertexId> sources,
               std::span<const VertexId> sinks, const std::vector<char>& removed) {
  std::vector<char> is_sink(graph.vertex_count(), 0);
  for (VertexId v : sinks) is_sink[static_cast<std::size_t>(v)] = 1;
  std::vector<char> seen(graph.vertex_count(), 0);
  std::vector<VertexId> frontier;
  for (VertexId v : sources) {
    if (removed[static_cast<std::size_t>(v)] || seen[static_cast<std::size_t>(v)]) continue;
    seen[static_cast<std::size_t>(v)] = 1;
    frontier.push_back(v);
  }
  while (!frontier.empty()) {
    const VertexId v = frontier.back();
    frontier.pop_back();
    if (is_sink[static_cast<std::size_t>(v)]) return false;
    for (VertexId u : graph.neighbors(v)) {
      const auto ui = static_cast<std::size_t>(u);
      if (removed[ui] || seen[ui]) continue;
      seen[ui] = 1;
      frontier.push_back(u);
    }
  }
  return true;
}

}  // namespace confdim
