#include "confdim/nerve.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>
#include <tuple>

namespace confdim {

NerveGraph::NerveGraph(Covering covering) : covering_(std::move(covering)) {
  const std::size_t nv = covering_.balls.size();
  adjacency_.resize(nv);
  std::size_t npoints = 0;
  for (const auto& ball : covering_.balls)
    for (PointId y : ball) npoints = std::max(npoints, y + 1);
  point_to_balls_.resize(npoints);
  for (std::size_t v = 0; v < nv; ++v)
    for (PointId y : covering_.balls[v]) point_to_balls_[y].push_back(static_cast<VertexId>(v));
  for (const auto& owners : point_to_balls_) {
    for (std::size_t i = 0; i < owners.size(); ++i)
      for (std::size_t j = i + 1; j < owners.size(); ++j) {
        adjacency_[static_cast<std::size_t>(owners[i])].push_back(owners[j]);
        adjacency_[static_cast<std::size_t>(owners[j])].push_back(owners[i]);
      }
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
}

bool NerveGraph::adjacent(VertexId u, VertexId v) const {
  const auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::size_t NerveGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& nbrs : adjacency_) total += nbrs.size();
  return total / 2;
}

std::vector<std::pair<VertexId, VertexId>> NerveGraph::edges() const {
  std::vector<std::pair<VertexId, VertexId>> out;
  for (VertexId u = 0; u < static_cast<VertexId>(adjacency_.size()); ++u)
    for (VertexId v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

void NerveGraph::write_edge_list(std::ostream& out) const {
  out << "# nerve level " << level() << " radius " << radius() << " vertices " << vertex_count()
      << " edges " << edge_count() << "\n";
  for (const auto& [u, v] : edges()) out << u << " " << v << "\n";
}

NerveGraph build_nerve(const FiniteMetricSpace& space, Covering covering) {
  for (std::size_t v = 0; v < covering.balls.size(); ++v) {
    const auto& ball = covering.balls[v];
    if (!std::binary_search(ball.begin(), ball.end(), covering.centers[v])) {
      throw SpaceError("ball " + std::to_string(v) + " does not contain its center");
    }
  }
  std::vector<char> seen(space.size(), 0);
  for (const auto& ball : covering.balls)
    for (PointId y : ball) seen[y] = 1;
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw SpaceError("covering does not cover the space");
  }
  return NerveGraph(std::move(covering));
}

void WeightFunction::validate() const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0) || !std::isfinite(values[i])) {
      throw std::invalid_argument("weight at vertex " + std::to_string(i) + " is " +
                                  std::to_string(values[i]) + "; weights must be finite and >= 0");
    }
  }
}

namespace {

struct DistanceField {
  std::vector<double> dist;
  std::vector<int> hops;
};

// Vertex-weighted Dijkstra from a seed set. dist[v] is the least total weight
// of a path from a seed to v, both endpoints included; ties on weight are
// broken by hop count.
DistanceField vertex_dijkstra(const NerveGraph& g, std::span<const VertexId> seeds,
                              const WeightFunction& rho) {
  const std::size_t n = g.vertex_count();
  DistanceField f{std::vector<double>(n, std::numeric_limits<double>::infinity()),
                  std::vector<int>(n, std::numeric_limits<int>::max())};
  using Key = std::tuple<double, int, VertexId>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
  for (VertexId s : seeds) {
    const auto i = static_cast<std::size_t>(s);
    if (rho[s] < f.dist[i] || (rho[s] == f.dist[i] && 1 < f.hops[i])) {
      f.dist[i] = rho[s];
      f.hops[i] = 1;
      heap.emplace(rho[s], 1, s);
    }
  }
  while (!heap.empty()) {
    const auto [d, h, v] = heap.top();
    heap.pop();
    const auto vi = static_cast<std::size_t>(v);
    if (d != f.dist[vi] || h != f.hops[vi]) continue;
    for (VertexId u : g.neighbors(v)) {
      const auto ui = static_cast<std::size_t>(u);
      const double nd = d + rho[u];
      if (nd < f.dist[ui] || (nd == f.dist[ui] && h + 1 < f.hops[ui])) {
        f.dist[ui] = nd;
        f.hops[ui] = h + 1;
        heap.emplace(nd, h + 1, u);
      }
    }
  }
  return f;
}

// Walks from `start` down the distance field to a seed, always taking the
// smallest admissible neighbor id.
Path descend(const NerveGraph& g, const DistanceField& f, const WeightFunction& rho, VertexId start) {
  Path path{start};
  VertexId cur = start;
  while (f.hops[static_cast<std::size_t>(cur)] > 1) {
    const auto ci = static_cast<std::size_t>(cur);
    VertexId next = -1;
    for (VertexId u : g.neighbors(cur)) {
      const auto ui = static_cast<std::size_t>(u);
      if (f.hops[ui] == f.hops[ci] - 1 && f.dist[ui] + rho[cur] == f.dist[ci]) {
        next = u;
        break;
      }
    }
    if (next < 0) throw std::logic_error("inconsistent distance field");
    path.push_back(next);
    cur = next;
  }
  return path;
}

}  // namespace

bool CurveFamily::empty() const {
  if (!graph || sources.empty() || sinks.empty()) return true;
  const auto zero = WeightFunction::constant(graph->vertex_count(), 0.0);
  return std::isinf(shortest_curve_length(*this, zero).length);
}

CurveLength shortest_curve_length(const CurveFamily& family, const WeightFunction& rho) {
  rho.validate();
  CurveLength best;
  if (!family.graph || family.sources.empty() || family.sinks.empty()) return best;
  const NerveGraph& g = *family.graph;
  if (rho.values.size() != g.vertex_count()) {
    throw std::invalid_argument("weight function size does not match the nerve");
  }
  const DistanceField to_sink = vertex_dijkstra(g, family.sinks, rho);

  if (family.mandatory.empty()) {
    VertexId start = -1;
    for (VertexId s : family.sources) {
      const auto si = static_cast<std::size_t>(s);
      if (std::isinf(to_sink.dist[si])) continue;
      if (start < 0) {
        start = s;
        continue;
      }
      const auto bi = static_cast<std::size_t>(start);
      if (std::tie(to_sink.dist[si], to_sink.hops[si], s) <
          std::tie(to_sink.dist[bi], to_sink.hops[bi], start)) {
        start = s;
      }
    }
    if (start < 0) return best;
    best.length = to_sink.dist[static_cast<std::size_t>(start)];
    best.path = descend(g, to_sink, rho, start);
    return best;
  }

  // Concatenate source -> v and v -> sink through each mandatory v.
  const DistanceField from_source = vertex_dijkstra(g, family.sources, rho);
  VertexId via = -1;
  double via_len = std::numeric_limits<double>::infinity();
  int via_hops = std::numeric_limits<int>::max();
  for (VertexId v : family.mandatory) {
    const auto vi = static_cast<std::size_t>(v);
    if (std::isinf(from_source.dist[vi]) || std::isinf(to_sink.dist[vi])) continue;
    const double len = from_source.dist[vi] + to_sink.dist[vi] - rho[v];
    const int hops = from_source.hops[vi] + to_sink.hops[vi] - 1;
    if (std::tie(len, hops, v) < std::tie(via_len, via_hops, via)) {
      via = v;
      via_len = len;
      via_hops = hops;
    }
  }
  if (via < 0) return best;
  Path head = descend(g, from_source, rho, via);
  std::reverse(head.begin(), head.end());
  Path tail = descend(g, to_sink, rho, via);
  head.insert(head.end(), tail.begin() + 1, tail.end());
  best.length = via_len;
  best.path = std::move(head);
  return best;
}

CurveFamily annulus_family(const FiniteMetricSpace& space, const NetHierarchy& hierarchy,
                           std::shared_ptr<const NerveGraph> nerve, PointId center, int k) {
  if (!nerve) throw std::invalid_argument("annulus_family needs a nerve");
  if (k < 0 || k > nerve->level()) {
    throw std::invalid_argument("annulus level " + std::to_string(k) + " is finer than the nerve");
  }
  const auto& centers = hierarchy.levels.at(static_cast<std::size_t>(k));
  if (!std::binary_search(centers.begin(), centers.end(), center)) {
    throw std::invalid_argument("point " + std::to_string(center) + " is not a level-" +
                                std::to_string(k) + " center");
  }
  const double r = hierarchy.radius(k);
  CurveFamily fam;
  fam.graph = nerve;
  // 2B is the open ball of radius 2r, so its complement is d >= 2r.
  fam.sinks = nerve->vertices_meeting([&](PointId y) { return space.distance(center, y) >= 2.0 * r - kBallTol; });
  if (fam.sinks.empty()) return fam;
  fam.sources = nerve->vertices_meeting([&](PointId y) { return within(space.distance(center, y), r); });
  return fam;
}

CurveFamily point_family(const FiniteMetricSpace& space, std::shared_ptr<const NerveGraph> nerve,
                         PointId z, double s) {
  if (!nerve) throw std::invalid_argument("point_family needs a nerve");
  if (!(s > 0.0)) throw std::invalid_argument("point_family radius must be positive");
  CurveFamily fam;
  fam.graph = nerve;
  const auto owners = nerve->balls_containing(z);
  fam.mandatory.assign(owners.begin(), owners.end());
  fam.sources = fam.mandatory;
  fam.sinks = nerve->vertices_meeting([&](PointId y) { return space.distance(z, y) >= s - kBallTol; });
  return fam;
}

std::vector<std::vector<VertexId>> components(const NerveGraph& nerve, const std::vector<char>& removed) {
  const std::size_t n = nerve.vertex_count();
  std::vector<int> label(n, -1);
  std::vector<std::vector<VertexId>> out;
  for (VertexId s = 0; s < static_cast<VertexId>(n); ++s) {
    if (removed[static_cast<std::size_t>(s)] || label[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<VertexId> comp{s};
    label[static_cast<std::size_t>(s)] = static_cast<int>(out.size());
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (VertexId u : nerve.neighbors(comp[head])) {
        const auto ui = static_cast<std::size_t>(u);
        if (removed[ui] || label[ui] >= 0) continue;
        label[ui] = static_cast<int>(out.size());
        comp.push_back(u);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::vector<PointId> covered_points(const NerveGraph& nerve, std::span<const VertexId> vertices) {
  std::vector<PointId> pts;
  for (VertexId v : vertices) {
    const auto m = nerve.members(v);
    pts.insert(pts.end(), m.begin(), m.end());
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

LinearConnectivity estimate_linear_connectivity(const FiniteMetricSpace& space,
                                                const NerveGraph& finest, std::size_t max_pairs,
                                                std::uint64_t seed) {
  LinearConnectivity out;
  const std::size_t n = space.size();
  std::vector<std::pair<PointId, PointId>> pairs;
  if (n * (n - 1) / 2 <= max_pairs) {
    for (PointId x = 0; x < n; ++x)
      for (PointId y = x + 1; y < n; ++y) pairs.emplace_back(x, y);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<PointId> pick(0, n - 1);
    while (pairs.size() < max_pairs) {
      const PointId x = pick(rng);
      const PointId y = pick(rng);
      if (x != y) pairs.emplace_back(std::min(x, y), std::max(x, y));
    }
  }

  const std::size_t nv = finest.vertex_count();
  for (const auto& [x, y] : pairs) {
    // reach[v]: farthest any ball on the chain strays from x.
    std::vector<double> reach(nv);
    for (VertexId v = 0; v < static_cast<VertexId>(nv); ++v) {
      double far = 0.0;
      for (PointId p : finest.members(v)) far = std::max(far, space.distance(x, p));
      reach[static_cast<std::size_t>(v)] = far;
    }
    std::vector<double> best(nv, std::numeric_limits<double>::infinity());
    std::vector<VertexId> pred(nv, -1);
    using Key = std::pair<double, VertexId>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> heap;
    for (VertexId s : finest.balls_containing(x)) {
      best[static_cast<std::size_t>(s)] = reach[static_cast<std::size_t>(s)];
      heap.emplace(best[static_cast<std::size_t>(s)], s);
    }
    while (!heap.empty()) {
      const auto [d, v] = heap.top();
      heap.pop();
      if (d != best[static_cast<std::size_t>(v)]) continue;
      for (VertexId u : finest.neighbors(v)) {
        const double nd = std::max(d, reach[static_cast<std::size_t>(u)]);
        if (nd < best[static_cast<std::size_t>(u)]) {
          best[static_cast<std::size_t>(u)] = nd;
          pred[static_cast<std::size_t>(u)] = v;
          heap.emplace(nd, u);
        }
      }
    }
    VertexId end = -1;
    for (VertexId t : finest.balls_containing(y))
      if (end < 0 || best[static_cast<std::size_t>(t)] < best[static_cast<std::size_t>(end)]) end = t;
    ++out.pairs_checked;
    if (end < 0 || std::isinf(best[static_cast<std::size_t>(end)])) {
      out.connected = false;
      out.worst_pair = {x, y};
      out.max_ratio = std::numeric_limits<double>::infinity();
      return out;
    }
    Path chain;
    for (VertexId v = end; v >= 0; v = pred[static_cast<std::size_t>(v)]) chain.push_back(v);
    const auto pts = covered_points(finest, chain);
    const double ratio = space.diameter(pts) / space.distance(x, y);
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.worst_pair = {x, y};
    }
  }
  return out;
}

}  // namespace confdim
