#include <doctest.h>

#include <cmath>
#include <random>

#include "confdim/generators.hpp"
#include "confdim/modulus.hpp"
#include "oracles.hpp"

using namespace confdim;

namespace {

std::shared_ptr<const NerveGraph> cycle(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return oracle::graph_from_edges(n, edges);
}

}  // namespace

TEST_CASE("vol_p sums powers") {
  WeightFunction w{{0.5, 0.0, 2.0}};
  CHECK(vol_p(w, 1.0) == doctest::Approx(2.5));
  CHECK(vol_p(w, 2.0) == doctest::Approx(4.25));
}

TEST_CASE("single path of k vertices has modulus k^(1-p)") {
  auto g = oracle::graph_from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  CurveFamily fam{g, {0}, {3}, {}};
  for (double p : {1.0, 1.5, 2.0, 3.0}) {
    ModulusOptions o;
    o.tol = 1e-8;
    const auto r = compute_modulus(fam, p, o);
    CHECK(r.value == doctest::Approx(std::pow(4.0, 1.0 - p)).epsilon(1e-7));
    CHECK(is_admissible(fam, r.weights).admissible);
  }
}

TEST_CASE("parallel paths add up") {
  // Two vertex-disjoint paths of 2 interior vertices between a shared pair of
  // terminal sets: Mod_p = 2 * 2^(1-p) once terminals are excluded.
  auto g = oracle::graph_from_edges(6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}});
  CurveFamily fam{g, {0, 3}, {2, 5}, {}};
  for (double p : {1.0, 2.0}) {
    ModulusOptions o;
    o.tol = 1e-9;
    CHECK(compute_modulus(fam, p, o).value == doctest::Approx(2.0 * std::pow(3.0, 1.0 - p)).epsilon(1e-7));
  }
}

TEST_CASE("empty family has modulus zero and p < 1 is rejected") {
  auto g = oracle::graph_from_edges(4, {{0, 1}, {2, 3}});
  CurveFamily fam{g, {0}, {3}, {}};
  CHECK(fam.empty());
  CHECK(compute_modulus(fam, 2.0).value == 0.0);
  CHECK_THROWS_AS(compute_modulus(fam, 0.5), std::invalid_argument);
}

TEST_CASE("solver agrees with the barrier oracle on random instances") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    const auto inst = oracle::random_instance(rng);
    const auto fam = oracle::family_of(inst);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      ModulusOptions o;
      o.tol = 1e-8;
      const auto r = compute_modulus(fam, p, o);
      const double ref = oracle::barrier_modulus(inst.paths, p);
      CAPTURE(trial);
      CAPTURE(p);
      CHECK(std::abs(r.value - ref) <= 1e-6 * ref);
      CHECK(r.lower_bound <= r.value);
      CHECK(is_admissible(fam, r.weights).admissible);
    }
  }
}

TEST_CASE("p = 1 equals the minimum vertex cut") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = oracle::random_instance(rng);
    const auto fam = oracle::family_of(inst);
    const auto mc = modulus_p1_mincut(fam);
    CHECK_FALSE(mc.infinite);
    CHECK(mc.value == oracle::brute_min_cut(*inst.graph, inst.sources, inst.sinks));
    CHECK(compute_modulus(fam, 1.0).value == doctest::Approx(mc.value));
  }
}

TEST_CASE("shared source and sink vertex is cut like any other") {
  auto g = oracle::graph_from_edges(3, {{0, 1}, {1, 2}});
  CurveFamily fam{g, {1}, {1, 2}, {}};
  const auto mc = modulus_p1_mincut(fam);
  CHECK_FALSE(mc.infinite);
  CHECK(mc.value == 1);
  CHECK(compute_modulus(fam, 1.0).value == doctest::Approx(1.0));
  CHECK(compute_modulus(fam, 2.0).value == doctest::Approx(1.0));
}

TEST_CASE("min-cut modulus refuses mandatory sets") {
  auto g = cycle(5);
  CurveFamily fam{g, {0}, {2}, {0}};
  CHECK_THROWS_AS(modulus_p1_mincut(fam), std::invalid_argument);
}

TEST_CASE("modulus is monotone in the family") {
  // Adding sinks enlarges the family, so the modulus cannot drop.
  auto g = cycle(8);
  CurveFamily small{g, {0}, {4}, {}};
  CurveFamily large{g, {0}, {3, 4, 5}, {}};
  for (double p : {1.0, 1.5, 2.0}) {
    CHECK(compute_modulus(small, p).value <= compute_modulus(large, p).value * (1.0 + 1e-4));
  }
}

TEST_CASE("circle annulus modulus at p = 1 is two") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kCircle;
  spec.resolution = 128;
  const auto space = generate(spec);
  const auto h = build_net_hierarchy(space, 2.0, 5);
  // Level 5 balls reach the neighbouring centers' balls through a shared
  // point; coarser levels can leave the wrap-around gap uncovered.
  auto nerve = std::make_shared<const NerveGraph>(build_nerve(space, build_covering(space, h, 5)));
  for (PointId c : h.levels[2]) {
    const auto fam = annulus_family(space, h, nerve, c, 2);
    CHECK(compute_modulus(fam, 1.0).value == doctest::Approx(2.0));
    CHECK(modulus_p1_mincut(fam).value == 2);
  }
}

TEST_CASE("non-convergence carries an admissible best iterate") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kSquareGrid;
  spec.resolution = 12;
  const auto space = generate(spec);
  const auto h = build_net_hierarchy(space, 2.0, 4);
  auto nerve = std::make_shared<const NerveGraph>(build_nerve(space, build_covering(space, h, 3)));
  const auto fam = annulus_family(space, h, nerve, h.levels[1][0], 1);
  ModulusOptions o;
  o.tol = 1e-12;
  o.max_iterations = 3;
  try {
    compute_modulus(fam, 1.5, o);
    FAIL("expected non-convergence");
  } catch (const ModulusNonConvergence& e) {
    CHECK(is_admissible(fam, e.best().weights).admissible);
    CHECK(e.best().value >= e.best().lower_bound);
  }
}

TEST_CASE("result json") {
  auto g = cycle(4);
  CurveFamily fam{g, {0}, {2}, {}};
  const auto r = compute_modulus(fam, 2.0);
  const auto j = to_json(r, true);
  CHECK(j["weights"].size() == 4);
  CHECK(j["p"] == 2.0);
  CHECK_FALSE(to_json(r, false).contains("weights"));
}
