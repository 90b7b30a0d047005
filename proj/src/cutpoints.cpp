#include "confdim/cutpoints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "confdim/parallel.hpp"
#include "confdim/vertex_cut.hpp"

namespace confdim {

namespace {

std::vector<char> mask_of(std::size_t n, const std::vector<VertexId>& vs) {
  std::vector<char> m(n, 0);
  for (VertexId v : vs) m[static_cast<std::size_t>(v)] = 1;
  return m;
}

std::vector<PointId> centers_of(const NerveGraph& g, const std::vector<VertexId>& vs) {
  std::vector<PointId> out;
  out.reserve(vs.size());
  for (VertexId v : vs) out.push_back(g.center(v));
  std::sort(out.begin(), out.end());
  return out;
}

// Balls containing at least one point of `points`.
std::vector<char> balls_hit(const NerveGraph& g, const std::vector<PointId>& points) {
  std::vector<char> m(g.vertex_count(), 0);
  for (PointId p : points)
    for (VertexId v : g.balls_containing(p)) m[static_cast<std::size_t>(v)] = 1;
  return m;
}

// The finest-level ball centered at p; every cut point is a finest center.
VertexId ball_centered_at(const NerveGraph& g, PointId p) {
  const auto& cs = g.covering().centers;
  const auto it = std::lower_bound(cs.begin(), cs.end(), p);
  if (it == cs.end() || *it != p) return -1;
  return static_cast<VertexId>(it - cs.begin());
}

NerveGraph finest_nerve(const FiniteMetricSpace& space, const NetHierarchy& h) {
  return build_nerve(space, build_covering(space, h, h.depth()));
}

double floor_ratio(int n, double a) { return std::floor((n * std::log(a) - std::log(3.0)) / std::log(2.0)); }

}  // namespace

int UwsReport::max_cut_at_level(int level) const {
  int best = -1;
  for (const auto& p : probes)
    if (p.level == level && !p.degenerate) best = std::max(best, p.min_cut_size);
  return best;
}

UwsProbe uws_probe(const FiniteMetricSpace& space, const NerveGraph& finest, PointId x, double r) {
  UwsProbe probe;
  probe.center = x;
  probe.radius = r;
  const std::size_t nv = finest.vertex_count();
  const auto sources = finest.vertices_meeting([&](PointId y) { return within(space.distance(x, y), 0.5 * r); });
  const auto sinks = finest.vertices_meeting([&](PointId y) { return space.distance(x, y) > r + kBallTol; });
  std::vector<char> removed(nv, 0);
  if (!sinks.empty()) {
    std::vector<char> cuttable(nv, 0);
    std::vector<char> active(nv, 0);
    for (VertexId v = 0; v < static_cast<VertexId>(nv); ++v) {
      cuttable[static_cast<std::size_t>(v)] = within(space.distance(x, finest.center(v)), r);
      for (PointId y : finest.members(v)) {
        if (within(space.distance(x, y), r)) {
          active[static_cast<std::size_t>(v)] = 1;
          break;
        }
      }
    }
    const auto cut = min_vertex_cut(finest, sources, sinks, cuttable, &active);
    if (cut.infinite) {
      probe.degenerate = true;
      return probe;
    }
    probe.min_cut_size = cut.size;
    probe.cut_set = centers_of(finest, cut.cut);
    removed = mask_of(nv, cut.cut);
  }
  probe.verified = separates(finest, sources, sinks, removed);
  for (PointId p : probe.cut_set) probe.verified = probe.verified && within(space.distance(x, p), r);

  std::vector<char> seen = removed;
  for (VertexId s : sources) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    std::vector<VertexId> comp{s};
    seen[static_cast<std::size_t>(s)] = 1;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (VertexId u : finest.neighbors(comp[head])) {
        if (seen[static_cast<std::size_t>(u)]) continue;
        seen[static_cast<std::size_t>(u)] = 1;
        comp.push_back(u);
      }
    }
    const auto pts = covered_points(finest, comp);
    probe.component_diameters.push_back(space.diameter(pts));
  }
  return probe;
}

UwsReport check_uws(const FiniteMetricSpace& space, const NetHierarchy& hierarchy, int c_max,
                    const ProbeSpec& spec, int workers) {
  UwsReport rep;
  rep.c_max = c_max;
  rep.finest_level = hierarchy.depth();
  const int hi = spec.max_level < 0 ? hierarchy.depth() - 1 : std::min(spec.max_level, hierarchy.depth() - 1);
  if (hi < spec.min_level) return rep;
  const NerveGraph finest = finest_nerve(space, hierarchy);
  for (int level = std::max(0, spec.min_level); level <= hi; ++level) {
    const auto& centers = hierarchy.levels[static_cast<std::size_t>(level)];
    std::size_t take = centers.size();
    if (spec.max_per_level > 0) take = std::min(take, static_cast<std::size_t>(spec.max_per_level));
    for (std::size_t i = 0; i < take; ++i) {
      UwsProbe p;
      p.center = centers[i];
      p.level = level;
      p.radius = hierarchy.radius(level);
      rep.probes.push_back(std::move(p));
    }
  }
  parallel_for(rep.probes.size(), workers, [&](std::size_t i) {
    const int level = rep.probes[i].level;
    rep.probes[i] = uws_probe(space, finest, rep.probes[i].center, rep.probes[i].radius);
    rep.probes[i].level = level;
  });
  for (const auto& p : rep.probes) {
    if (p.degenerate) {
      ++rep.degenerate_count;
      continue;
    }
    rep.c_observed = std::max(rep.c_observed, p.min_cut_size);
    rep.all_verified = rep.all_verified && p.verified;
  }
  return rep;
}

double ws_delta(const FiniteMetricSpace& space, const NerveGraph& finest, const std::vector<PointId>& points) {
  double delta = 0.0;
  for (const auto& comp : components(finest, balls_hit(finest, points))) {
    delta = std::max(delta, space.diameter(covered_points(finest, comp)));
  }
  return delta;
}

WsReport check_ws(const FiniteMetricSpace& space, const NetHierarchy& hierarchy, const std::vector<int>& budgets,
                  int workers) {
  for (std::size_t i = 1; i < budgets.size(); ++i) {
    if (budgets[i] <= budgets[i - 1]) throw std::invalid_argument("WS budgets must be strictly increasing");
  }
  if (!budgets.empty() && budgets.front() < 0) throw std::invalid_argument("WS budgets must be nonnegative");
  WsReport rep;
  const NerveGraph finest = finest_nerve(space, hierarchy);
  const std::size_t nv = finest.vertex_count();

  std::vector<PointId> pool;
  if (hierarchy.depth() >= 2) {
    const UwsReport uws = check_uws(space, hierarchy, std::numeric_limits<int>::max(), {}, workers);
    for (const auto& p : uws.probes) pool.insert(pool.end(), p.cut_set.begin(), p.cut_set.end());
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  rep.pool_size = pool.size();

  // Component diameter cache keyed by (smallest vertex, size): components only
  // shrink or split, so an unchanged key means an unchanged component.
  std::map<std::pair<VertexId, std::size_t>, double> diam_cache;
  auto diam = [&](const std::vector<VertexId>& comp) {
    const auto key = std::make_pair(comp.front(), comp.size());
    const auto it = diam_cache.find(key);
    if (it != diam_cache.end()) return it->second;
    const double d = space.diameter(covered_points(finest, comp));
    diam_cache.emplace(key, d);
    return d;
  };

  std::vector<PointId> chosen;
  std::vector<char> removed(nv, 0);
  std::vector<char> used(space.size(), 0);
  const int target = budgets.empty() ? 0 : budgets.back();
  std::size_t next_budget = 0;
  bool exhausted = false;
  while (next_budget < budgets.size()) {
    const auto comps = components(finest, removed);
    std::vector<double> diams;
    diams.reserve(comps.size());
    for (const auto& c : comps) diams.push_back(diam(c));
    const int have = static_cast<int>(chosen.size());
    while (next_budget < budgets.size() && (budgets[next_budget] <= have || exhausted)) {
      double delta = 0.0;
      for (double d : diams) delta = std::max(delta, d);
      rep.steps.push_back({budgets[next_budget], chosen, delta});
      ++next_budget;
    }
    if (next_budget >= budgets.size() || have >= target) break;

    std::vector<int> label(nv, -1);
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (VertexId v : comps[c]) label[static_cast<std::size_t>(v)] = static_cast<int>(c);
    std::vector<std::size_t> order(comps.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (diams[a] != diams[b]) return diams[a] > diams[b];
      if (comps[a].size() != comps[b].size()) return comps[a].size() > comps[b].size();
      return comps[a].front() < comps[b].front();
    });
    PointId pick = 0;
    bool found = false;
    for (std::size_t c : order) {
      double best = -1.0;
      for (PointId p : pool) {
        if (used[p]) continue;
        bool inside = false;
        for (VertexId v : finest.balls_containing(p)) {
          if (label[static_cast<std::size_t>(v)] == static_cast<int>(c)) {
            inside = true;
            break;
          }
        }
        if (!inside) continue;
        double score = std::numeric_limits<double>::infinity();
        for (PointId q : chosen) score = std::min(score, space.distance(p, q));
        if (chosen.empty()) score = 0.0;
        if (score > best) {
          best = score;
          pick = p;
          found = true;
        }
      }
      if (found) break;
    }
    if (!found) {
      exhausted = true;
      continue;
    }
    used[pick] = 1;
    chosen.push_back(pick);
    for (VertexId v : finest.balls_containing(pick)) removed[static_cast<std::size_t>(v)] = 1;
  }

  rep.decreasing = true;
  for (std::size_t i = 1; i < rep.steps.size(); ++i) {
    if (rep.steps[i].delta > rep.steps[i - 1].delta + 1e-12) rep.decreasing = false;
  }
  if (rep.steps.size() >= 2 && rep.steps.front().delta > 0.0 &&
      !(rep.steps.back().delta < rep.steps.front().delta)) {
    rep.decreasing = false;
  }
  return rep;
}

int max_annulus_count(int n, double a) {
  if (!(a > 1.0)) throw std::invalid_argument("base must exceed 1");
  return static_cast<int>(floor_ratio(n, a));
}

double eta_n(int n, double a) {
  const int m = max_annulus_count(n, a);
  if (m <= 0) {
    throw std::invalid_argument("eta_n undefined: floor((n log a - log 3) / log 2) = " + std::to_string(m) +
                                " for n = " + std::to_string(n) + ", a = " + std::to_string(a));
  }
  return 1.0 / m;
}

double BoundCheck::vol_p(double p) const {
  return static_cast<double>(u.size()) / std::pow(static_cast<double>(m), p);
}

CurveFamily BoundCheck::family(const FiniteMetricSpace& space) const { return point_family(space, nerve, z, s); }

BoundCheck build_theorem_weight(const FiniteMetricSpace& space, const NetHierarchy& hierarchy, PointId z, int k,
                                int n, int m) {
  if (z >= space.size()) throw std::invalid_argument("point " + std::to_string(z) + " out of range");
  if (m < 1) throw std::invalid_argument("annulus count m must be >= 1");
  if (n < 1) throw std::invalid_argument("scale gap n must be >= 1");
  if (k < 0 || k + n > hierarchy.depth()) {
    throw std::invalid_argument("levels k = " + std::to_string(k) + ", k + n = " + std::to_string(k + n) +
                                " outside the hierarchy (depth " + std::to_string(hierarchy.depth()) + ")");
  }
  BoundCheck bc;
  bc.z = z;
  bc.k = k;
  bc.n = n;
  bc.m = m;
  bc.s = hierarchy.radius(k) / 3.0;
  const double fine = hierarchy.radius(k + n);
  if (fine > std::ldexp(bc.s, -m) * (1.0 + 1e-12)) {
    const int max_m = static_cast<int>(std::floor(std::log2(bc.s / fine) + 1e-12));
    throw InfeasibleScale("scale too coarse for m = " + std::to_string(m) + ": a^-(k+n) > 2^-m s; max feasible m = " +
                              std::to_string(max_m),
                          max_m);
  }
  bc.nerve = std::make_shared<const NerveGraph>(build_nerve(space, build_covering(space, hierarchy, k + n)));
  const NerveGraph& g = *bc.nerve;
  const std::size_t nv = g.vertex_count();

  std::vector<char> in_earlier_cut(nv, 0);
  for (int i = 0; i < m; ++i) {
    Annulus an;
    an.outer = std::ldexp(bc.s, -i);
    an.inner = std::ldexp(bc.s, -(i + 1));
    std::vector<char> in_annulus(space.size(), 0);
    for (PointId y = 0; y < space.size(); ++y) {
      const double d = space.distance(z, y);
      if (d >= an.inner - kBallTol && within(d, an.outer)) {
        an.points.push_back(y);
        in_annulus[y] = 1;
      }
    }
    const auto sources = g.vertices_meeting([&](PointId y) { return space.distance(z, y) < an.inner - kBallTol; });
    const auto sinks = g.vertices_meeting([&](PointId y) { return space.distance(z, y) >= an.outer - kBallTol; });
    // Cuts of distinct annuli are kept disjoint, so every curve meets m
    // distinct balls of U.
    std::vector<char> cuttable(nv, 0);
    for (VertexId v = 0; v < static_cast<VertexId>(nv); ++v) {
      if (in_earlier_cut[static_cast<std::size_t>(v)]) continue;
      for (PointId y : g.members(v)) {
        if (in_annulus[y]) {
          cuttable[static_cast<std::size_t>(v)] = 1;
          break;
        }
      }
    }
    const auto cut = min_vertex_cut(g, sources, sinks, cuttable);
    if (cut.infinite) {
      throw std::runtime_error("annulus " + std::to_string(i) + " around point " + std::to_string(z) +
                               " admits no finite cut at level " + std::to_string(k + n));
    }
    an.cut = cut.cut;
    for (VertexId v : cut.cut) {
      in_earlier_cut[static_cast<std::size_t>(v)] = 1;
      for (PointId y : g.members(v)) {
        if (in_annulus[y]) {
          an.representatives.push_back(y);
          break;
        }
      }
    }
    std::sort(an.representatives.begin(), an.representatives.end());
    bc.k_cut = std::max(bc.k_cut, static_cast<int>(an.representatives.size()));
    bc.representatives.insert(bc.representatives.end(), an.representatives.begin(), an.representatives.end());
    bc.annuli.push_back(std::move(an));
  }
  std::sort(bc.representatives.begin(), bc.representatives.end());
  bc.representatives.erase(std::unique(bc.representatives.begin(), bc.representatives.end()),
                           bc.representatives.end());
  const auto hit = balls_hit(g, bc.representatives);
  for (VertexId v = 0; v < static_cast<VertexId>(nv); ++v)
    if (hit[static_cast<std::size_t>(v)]) bc.u.push_back(v);
  bc.rho = WeightFunction::constant(nv, 0.0);
  for (VertexId v : bc.u) bc.rho.values[static_cast<std::size_t>(v)] = 1.0 / m;
  const auto adm = is_admissible(bc.family(space), bc.rho);
  bc.admissible = adm.admissible;
  bc.shortest_length = adm.shortest_length;
  bc.k_prime = static_cast<double>(bc.u.size()) / m;
  return bc;
}

ScaleGradedCut scale_graded_uws(const FiniteMetricSpace& space, const NetHierarchy& hierarchy, PointId x, double s,
                                double r) {
  if (!(s > 0.0 && s < r && r <= 1.0)) throw std::invalid_argument("scale_graded_uws needs 0 < s < r <= 1");
  if (x >= space.size()) throw std::invalid_argument("point " + std::to_string(x) + " out of range");
  ScaleGradedCut out;
  out.x = x;
  out.s = s;
  out.r = r;
  out.chain_n = static_cast<int>(std::floor(2.0 / (r - s))) + 1;
  out.epsilon = 1.0 / (4.0 * out.chain_n);
  const double lo = s + 1.0 / out.chain_n;
  const double hi = r - 1.0 / out.chain_n;
  const NerveGraph finest = finest_nerve(space, hierarchy);
  if (out.epsilon <= finest.radius()) {
    throw std::invalid_argument("degenerate shell: epsilon = " + std::to_string(out.epsilon) +
                                " is not above the finest ball radius " + std::to_string(finest.radius()));
  }
  for (PointId y = 0; y < space.size(); ++y) {
    const double d = space.distance(x, y);
    if (d < lo - kBallTol || !within(d, hi)) continue;
    bool covered = false;
    for (PointId c : out.cover) {
      if (within(space.distance(c, y), out.epsilon)) {
        covered = true;
        break;
      }
    }
    if (!covered) out.cover.push_back(y);
  }
  std::vector<PointId> chain;
  for (PointId y : out.cover) {
    const UwsProbe p = uws_probe(space, finest, y, 2.0 * out.epsilon);
    if (p.degenerate) {
      throw std::invalid_argument("degenerate shell: probe at point " + std::to_string(y) +
                                  " has no finite cut at radius " + std::to_string(2.0 * out.epsilon));
    }
    out.max_probe_cut = std::max(out.max_probe_cut, p.min_cut_size);
    chain.insert(chain.end(), p.cut_set.begin(), p.cut_set.end());
  }
  std::sort(chain.begin(), chain.end());
  chain.erase(std::unique(chain.begin(), chain.end()), chain.end());
  out.chain_size = chain.size();

  const std::size_t nv = finest.vertex_count();
  const auto sources = finest.vertices_meeting([&](PointId y) { return within(space.distance(x, y), s); });
  const auto sinks = finest.vertices_meeting([&](PointId y) { return space.distance(x, y) > r + kBallTol; });
  std::vector<char> cuttable(nv, 0);
  std::vector<VertexId> chain_balls;
  for (PointId p : chain) {
    const VertexId v = ball_centered_at(finest, p);
    if (v >= 0) {
      cuttable[static_cast<std::size_t>(v)] = 1;
      chain_balls.push_back(v);
    }
  }
  std::vector<VertexId> removed_balls = chain_balls;
  out.cut_set = chain;
  if (!sinks.empty()) {
    const auto cut = min_vertex_cut(finest, sources, sinks, cuttable);
    if (!cut.infinite) {
      removed_balls = cut.cut;
      out.cut_set = centers_of(finest, cut.cut);
    }
  } else {
    removed_balls.clear();
    out.cut_set.clear();
  }
  out.verified = separates(finest, sources, sinks, mask_of(nv, removed_balls));
  for (PointId p : out.cut_set) out.verified = out.verified && within(space.distance(x, p), r);
  return out;
}

nlohmann::json to_json(const UwsReport& report) {
  nlohmann::json probes = nlohmann::json::array();
  for (const auto& p : report.probes) {
    probes.push_back({{"center", p.center},
                      {"level", p.level},
                      {"radius", p.radius},
                      {"degenerate", p.degenerate},
                      {"min_cut_size", p.min_cut_size},
                      {"cut_set", p.cut_set},
                      {"verified", p.verified},
                      {"component_diameters", p.component_diameters}});
  }
  return {{"finest_level", report.finest_level},
          {"C_max", report.c_max},
          {"C_observed", report.c_observed},
          {"degenerate_probes", report.degenerate_count},
          {"all_verified", report.all_verified},
          {"passes", report.passes()},
          {"probes", probes}};
}

nlohmann::json to_json(const WsReport& report) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : report.steps) steps.push_back({{"budget", s.budget}, {"points", s.points}, {"delta", s.delta}});
  return {{"pool_size", report.pool_size}, {"decreasing", report.decreasing}, {"steps", steps}};
}

nlohmann::json to_json(const BoundCheck& check, const std::vector<double>& ps) {
  nlohmann::json annuli = nlohmann::json::array();
  for (const auto& a : check.annuli) {
    annuli.push_back({{"inner", a.inner},
                      {"outer", a.outer},
                      {"point_count", a.points.size()},
                      {"representatives", a.representatives}});
  }
  nlohmann::json per_p = nlohmann::json::array();
  for (double p : ps) per_p.push_back({{"p", p}, {"vol_p", check.vol_p(p)}, {"bound_ratio", check.bound_ratio(p)}});
  return {{"z", check.z},
          {"k", check.k},
          {"n", check.n},
          {"m", check.m},
          {"s", check.s},
          {"annuli", annuli},
          {"U_size", check.u.size()},
          {"U", check.u},
          {"K", check.k_cut},
          {"K_prime", check.k_prime},
          {"admissible", check.admissible},
          {"shortest_length", check.shortest_length},
          {"per_p", per_p}};
}

nlohmann::json to_json(const ScaleGradedCut& cut) {
  return {{"x", cut.x},
          {"s", cut.s},
          {"r", cut.r},
          {"chain_n", cut.chain_n},
          {"epsilon", cut.epsilon},
          {"cover_count", cut.cover.size()},
          {"chain_size", cut.chain_size},
          {"max_probe_cut", cut.max_probe_cut},
          {"size", cut.size()},
          {"cut_set", cut.cut_set},
          {"verified", cut.verified}};
}

}  // namespace confdim
