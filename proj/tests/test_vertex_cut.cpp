#include <doctest.h>

#include <random>

#include "confdim/vertex_cut.hpp"
#include "oracles.hpp"

using namespace confdim;

TEST_CASE("min vertex cut matches subset enumeration") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = oracle::random_instance(rng);
    const std::vector<char> all(inst.graph->vertex_count(), 1);
    const auto r = min_vertex_cut(*inst.graph, inst.sources, inst.sinks, all);
    CHECK_FALSE(r.infinite);
    CHECK(r.size == oracle::brute_min_cut(*inst.graph, inst.sources, inst.sinks));
    CHECK(static_cast<int>(r.cut.size()) == r.size);
    CHECK(std::is_sorted(r.cut.begin(), r.cut.end()));
    std::vector<char> removed(inst.graph->vertex_count(), 0);
    for (VertexId v : r.cut) removed[static_cast<std::size_t>(v)] = 1;
    CHECK(separates(*inst.graph, inst.sources, inst.sinks, removed));
  }
}

TEST_CASE("uncuttable vertices") {
  // Path 0-1-2-3: with 1 and 2 protected the terminals must go.
  auto g = oracle::graph_from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  const std::vector<VertexId> s{0}, t{3};
  auto r = min_vertex_cut(*g, s, t, {1, 0, 0, 1});
  CHECK(r.size == 1);
  CHECK(r.cut == std::vector<VertexId>{0});
  r = min_vertex_cut(*g, s, t, {0, 0, 0, 0});
  CHECK(r.infinite);
}

TEST_CASE("cut closest to the sources") {
  // 0-1-2-3-4: every interior vertex is a cut of size one.
  auto g = oracle::graph_from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}});
  const std::vector<VertexId> s{0}, t{4};
  const auto r = min_vertex_cut(*g, s, t, {0, 1, 1, 1, 0});
  CHECK(r.cut == std::vector<VertexId>{1});
}

TEST_CASE("inactive vertices are ignored") {
  // Two routes 0-1-3 and 0-2-3; deactivating 2 leaves a cut of one.
  auto g = oracle::graph_from_edges(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
  const std::vector<VertexId> s{0}, t{3};
  const std::vector<char> cuttable{0, 1, 1, 0};
  CHECK(min_vertex_cut(*g, s, t, cuttable).size == 2);
  const std::vector<char> active{1, 1, 0, 1};
  CHECK(min_vertex_cut(*g, s, t, cuttable, &active).size == 1);
}

TEST_CASE("disconnected terminals need no cut") {
  auto g = oracle::graph_from_edges(4, {{0, 1}, {2, 3}});
  const std::vector<VertexId> s{0}, t{3};
  const auto r = min_vertex_cut(*g, s, t, std::vector<char>(4, 1));
  CHECK(r.size == 0);
  CHECK(separates(*g, s, t, std::vector<char>(4, 0)));
}

TEST_CASE("separates sees a surviving path") {
  auto g = oracle::graph_from_edges(3, {{0, 1}, {1, 2}});
  const std::vector<VertexId> s{0}, t{2};
  CHECK_FALSE(separates(*g, s, t, {0, 0, 0}));
  CHECK(separates(*g, s, t, {0, 1, 0}));
}
