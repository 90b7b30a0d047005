#include <doctest.h>

#include <random>
#include <sstream>

#include "confdim/generators.hpp"
#include "confdim/nerve.hpp"
#include "oracles.hpp"

using namespace confdim;

namespace {

FiniteMetricSpace circle(int n) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kCircle;
  spec.resolution = n;
  return generate(spec);
}

std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  for (auto& x : w) x = u(rng) < 0.15 ? 0.0 : u(rng);
  return w;
}

}  // namespace

TEST_CASE("adjacency means a shared point") {
  auto g = oracle::graph_from_edges(4, {{0, 1}, {1, 2}});
  CHECK(g->adjacent(0, 1));
  CHECK(g->adjacent(2, 1));
  CHECK_FALSE(g->adjacent(0, 2));
  CHECK_FALSE(g->adjacent(3, 0));
  CHECK(g->edge_count() == 2);
  CHECK(g->balls_containing(4).size() == 2);
}

TEST_CASE("nerve edges match a direct intersection test") {
  const auto space = circle(64);
  const auto h = build_net_hierarchy(space, 2.0, 5);
  for (int level = 1; level <= h.depth(); ++level) {
    const auto cov = build_covering(space, h, level);
    const NerveGraph g = build_nerve(space, cov);
    std::size_t edges = 0;
    for (std::size_t u = 0; u < cov.balls.size(); ++u) {
      for (std::size_t v = u + 1; v < cov.balls.size(); ++v) {
        std::vector<PointId> common;
        std::set_intersection(cov.balls[u].begin(), cov.balls[u].end(), cov.balls[v].begin(), cov.balls[v].end(),
                              std::back_inserter(common));
        const bool meet = !common.empty();
        edges += meet;
        CHECK(g.adjacent(static_cast<VertexId>(u), static_cast<VertexId>(v)) == meet);
      }
    }
    CHECK(g.edge_count() == edges);
  }
}

TEST_CASE("fine circle nerve is a single component") {
  const auto space = circle(128);
  const auto h = build_net_hierarchy(space, 2.0, 5);
  const NerveGraph g = build_nerve(space, build_covering(space, h, 5));
  CHECK(components(g, std::vector<char>(g.vertex_count(), 0)).size() == 1);
}

TEST_CASE("shortest curve length agrees with path enumeration") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = oracle::random_instance(rng);
    const WeightFunction rho{random_weights(inst.graph->vertex_count(), rng)};
    const auto fam = oracle::family_of(inst);
    const CurveLength got = shortest_curve_length(fam, rho);
    const double ref = oracle::brute_shortest(*inst.graph, inst.sources, inst.sinks, {}, rho.values);
    CHECK(got.length == doctest::Approx(ref).epsilon(1e-12));
    double along = 0.0;
    for (VertexId v : got.path) along += rho[v];
    CHECK(along == doctest::Approx(got.length).epsilon(1e-12));
    CHECK(std::count(inst.sources.begin(), inst.sources.end(), got.path.front()) == 1);
    CHECK(std::count(inst.sinks.begin(), inst.sinks.end(), got.path.back()) == 1);
    for (std::size_t i = 1; i < got.path.size(); ++i) CHECK(inst.graph->adjacent(got.path[i - 1], got.path[i]));
  }
}

TEST_CASE("mandatory vertices inside the sources") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = oracle::random_instance(rng);
    const WeightFunction rho{random_weights(inst.graph->vertex_count(), rng)};
    auto fam = oracle::family_of(inst);
    fam.mandatory = {inst.sources.front()};
    const CurveLength got = shortest_curve_length(fam, rho);
    const double ref = oracle::brute_shortest(*inst.graph, inst.sources, inst.sinks, fam.mandatory, rho.values);
    CHECK(got.length == doctest::Approx(ref).epsilon(1e-12));
    if (!got.path.empty()) CHECK(got.path.front() == inst.sources.front());
  }
}

TEST_CASE("length is monotone in the weights") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_instance(rng);
    auto w = random_weights(inst.graph->vertex_count(), rng);
    const auto fam = oracle::family_of(inst);
    const double before = shortest_curve_length(fam, {w}).length;
    for (auto& x : w) x += 0.1;
    CHECK(shortest_curve_length(fam, {w}).length >= before);
  }
}

TEST_CASE("tie break prefers fewer vertices") {
  // 0-1-2-3 and 0-4-3 with zero weights: the shorter hop path wins.
  auto g = oracle::graph_from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {0, 4}, {4, 3}});
  CurveFamily fam{g, {0}, {3}, {}};
  const auto got = shortest_curve_length(fam, WeightFunction::constant(5, 0.0));
  CHECK(got.length == 0.0);
  CHECK(got.path == Path{0, 4, 3});
}

TEST_CASE("empty family") {
  auto g = oracle::graph_from_edges(4, {{0, 1}, {2, 3}});
  CurveFamily fam{g, {0}, {3}, {}};
  CHECK(fam.empty());
  const auto got = shortest_curve_length(fam, WeightFunction::constant(4, 1.0));
  CHECK(std::isinf(got.length));
  CHECK(got.path.empty());
}

TEST_CASE("weights are validated") {
  CHECK_THROWS_AS((WeightFunction{{1.0, -0.5}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((WeightFunction{{std::nan("")}}.validate()), std::invalid_argument);
  auto g = oracle::graph_from_edges(2, {{0, 1}});
  CurveFamily fam{g, {0}, {1}, {}};
  CHECK_THROWS_AS(shortest_curve_length(fam, WeightFunction::constant(3, 1.0)), std::invalid_argument);
}

TEST_CASE("annulus and point families on the circle") {
  const auto space = circle(64);
  const auto h = build_net_hierarchy(space, 2.0, 5);
  auto nerve = std::make_shared<const NerveGraph>(build_nerve(space, build_covering(space, h, h.depth())));
  const PointId c = h.levels[2][0];
  const auto fam = annulus_family(space, h, nerve, c, 2);
  CHECK_FALSE(fam.empty());
  const double r = h.radius(2);
  for (VertexId s : fam.sources) {
    bool meets = false;
    for (PointId y : nerve->members(s)) meets = meets || within(space.distance(c, y), r);
    CHECK(meets);
  }
  CHECK_THROWS_AS(annulus_family(space, h, nerve, 1, 2), std::invalid_argument);

  const auto pf = point_family(space, nerve, 0, 0.25);
  CHECK(pf.sources == pf.mandatory);
  for (VertexId v : pf.mandatory) {
    const auto m = nerve->members(v);
    CHECK(std::find(m.begin(), m.end(), PointId{0}) != m.end());
  }
}

TEST_CASE("edge list dump") {
  auto g = oracle::graph_from_edges(3, {{0, 1}, {1, 2}});
  std::ostringstream out;
  g->write_edge_list(out);
  CHECK(out.str().find("0 1") != std::string::npos);
  CHECK(out.str().find("1 2") != std::string::npos);
}

TEST_CASE("linear connectivity of the circle is bounded") {
  const auto space = circle(128);
  const auto h = build_net_hierarchy(space, 2.0, 6);
  const NerveGraph g = build_nerve(space, build_covering(space, h, h.depth()));
  const auto lc = estimate_linear_connectivity(space, g, 200, 1);
  CHECK(lc.connected);
  CHECK(lc.pairs_checked > 0);
  CHECK(lc.max_ratio < 10.0);
}
