#include <doctest.h>

#include <cmath>
#include <functional>

#include "confdim/critical_exponent.hpp"
#include "confdim/generators.hpp"
#include "confdim/modulus.hpp"

using namespace confdim;

namespace {

// Scan whose M_{p,n} is given by `f`, for n = 1..4.
ScanResult synthetic(const std::vector<double>& ps, const std::function<double(double, int)>& f) {
  ScanResult sc;
  sc.p_grid = ps;
  sc.ns = {1, 2, 3, 4};
  for (double p : ps)
    for (int n : sc.ns) sc.entries.push_back({p, n, 1, f(p, n), 1});
  return sc;
}

FiniteMetricSpace circle(int n) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kCircle;
  spec.resolution = n;
  return generate(spec);
}

}  // namespace

TEST_CASE("least squares line") {
  const auto [slope, intercept] = fit_line({1, 2, 3, 4}, {1.5, 3.5, 5.5, 7.5});
  CHECK(slope == doctest::Approx(2.0));
  CHECK(intercept == doctest::Approx(-0.5));
  CHECK_THROWS(fit_line({1}, {2}));
}

TEST_CASE("p_c lies between the last flat and first decaying exponent") {
  const auto sc = synthetic({1.0, 1.1, 1.2, 1.3, 1.4, 1.5},
                            [](double p, int n) { return p <= 1.25 ? 2.0 : 2.0 * std::exp(-0.5 * n); });
  const auto est = estimate_pc(sc, default_decay_threshold(2.0));
  CHECK_FALSE(est.lower_bound_only);
  CHECK(est.bracket_low == doctest::Approx(1.2));
  CHECK(est.bracket_high == doctest::Approx(1.3));
  CHECK(est.value == doctest::Approx(1.25));
  CHECK(est.slopes.size() == 6);
  CHECK(est.slopes[0].slope == doctest::Approx(0.0));
  CHECK(est.slopes[5].slope == doctest::Approx(-0.5));
  CHECK(default_decay_threshold(2.0) == doctest::Approx(0.05 * std::log(2.0)));
}

TEST_CASE("no decay gives a lower bound") {
  const auto est = estimate_pc(synthetic({1.0, 1.5, 2.0}, [](double, int n) { return 5.0 + n; }), 0.03);
  CHECK(est.lower_bound_only);
  CHECK(est.value == 2.0);
}

TEST_CASE("degenerate scans") {
  const auto zero = estimate_pc(synthetic({1.0, 2.0}, [](double, int) { return 0.0; }), 0.03);
  CHECK(zero.value == 1.0);
  CHECK_FALSE(zero.lower_bound_only);
  const auto decays = estimate_pc(synthetic({1.0, 2.0}, [](double, int n) { return std::exp(-n); }), 0.03);
  CHECK(decays.value == 1.0);
  // A vanishing M counts as infinitely fast decay.
  const auto vanishing = estimate_pc(synthetic({1.0, 2.0}, [](double p, int n) { return p > 1.5 && n > 2 ? 0.0 : 1.0; }), 0.03);
  CHECK(std::isinf(vanishing.slopes[1].slope));
  CHECK(vanishing.value == doctest::Approx(1.5));
  ScanResult short_scan = synthetic({1.0}, [](double, int) { return 1.0; });
  short_scan.ns = {1, 2};
  CHECK_THROWS_AS(estimate_pc(short_scan, 0.03), std::invalid_argument);
}

TEST_CASE("sub-multiplicativity constants") {
  const auto sc = synthetic({2.0}, [](double, int n) { return std::pow(0.5, n); });
  const auto rep = submultiplicativity(sc, 0);
  // Pairs with n <= m and n + m in {1..4}: (1,1), (1,2), (1,3), (2,2).
  CHECK(rep.pairs.size() == 4);
  CHECK(rep.finite);
  CHECK(rep.min_constant == doctest::Approx(1.0));
  CHECK(rep.spread() == doctest::Approx(1.0));
  const auto zero = submultiplicativity(synthetic({2.0}, [](double, int n) { return n == 1 ? 0.0 : 1.0; }), 0);
  CHECK_FALSE(zero.finite);
}

TEST_CASE("annulus counts") {
  const auto sc = synthetic({2.0}, [](double, int n) { return 1.0 / n; });
  const auto fit = decay_against_annulus_count(sc, 0);
  // m(n) = floor((n log 2 - log 3) / log 2) is positive from n = 3.
  CHECK(fit.ns == std::vector<int>{3, 4});
  CHECK(fit.annulus_counts == std::vector<int>{1, 2});
  CHECK(fit.slope == doctest::Approx(std::log(3.0 / 4.0) / std::log(2.0)));
}

TEST_CASE("circle scan at p = 1 is two on every scale") {
  const auto space = circle(256);
  const auto h = build_net_hierarchy(space, 2.0, 6);
  ScanOptions o;
  o.p_grid = {1.0, 2.0};
  o.n_max = 3;
  o.keep_per_ball = true;
  const auto sc = scan(space, h, o);
  CHECK(sc.complete);
  CHECK(sc.ns == std::vector<int>{1, 2, 3});
  for (int n : sc.ns) CHECK(sc.value(0, n) == doctest::Approx(2.0));
  for (int n : sc.ns) CHECK(sc.value(1, n) < sc.value(0, n));
  CHECK_FALSE(sc.per_ball.empty());
  for (const auto& b : sc.per_ball) CHECK(b.value <= sc.value(b.p == 1.0 ? 0 : 1, b.n) + 1e-12);
}

TEST_CASE("scan matches direct modulus calls") {
  const auto space = circle(128);
  const auto h = build_net_hierarchy(space, 2.0, 5);
  ScanOptions o;
  o.p_grid = {1.5};
  o.n_max = 2;
  o.balls_per_scale = 2;
  const auto sc = scan(space, h, o);
  CHECK_FALSE(sc.complete);
  for (int n : sc.ns) {
    double best = 0.0;
    for (int k = 1; k + n <= h.depth(); ++k) {
      auto nerve = std::make_shared<const NerveGraph>(build_nerve(space, build_covering(space, h, k + n)));
      for (std::size_t b = 0; b < std::min<std::size_t>(2, h.levels[static_cast<std::size_t>(k)].size()); ++b) {
        const auto fam = annulus_family(space, h, nerve, h.levels[static_cast<std::size_t>(k)][b], k);
        best = std::max(best, compute_modulus(fam, 1.5).value);
      }
    }
    CHECK(sc.value(0, n) == doctest::Approx(best));
  }
}

TEST_CASE("scan output does not depend on the worker count") {
  const auto space = circle(256);
  const auto h = build_net_hierarchy(space, 2.0, 6);
  ScanOptions o;
  o.p_grid = {1.0, 1.5, 2.0};
  o.n_max = 3;
  const std::string one = to_csv(scan(space, h, o));
  o.workers = 3;
  CHECK(to_csv(scan(space, h, o)) == one);
  CHECK(one.rfind("p,n,k,M_pn,balls_sampled\n", 0) == 0);
}

TEST_CASE("scan input checks") {
  const auto space = circle(64);
  const auto h = build_net_hierarchy(space, 2.0, 4);
  ScanOptions o;
  o.p_grid = {0.5};
  CHECK_THROWS_AS(scan(space, h, o), std::invalid_argument);
  o.p_grid = {};
  CHECK_THROWS_AS(scan(space, h, o), std::invalid_argument);
  o.p_grid = {2.0};
  o.n_max = 0;
  CHECK_THROWS_AS(scan(space, h, o), std::invalid_argument);
}

TEST_CASE("estimate json") {
  const auto est = estimate_pc(synthetic({1.0, 2.0}, [](double p, int n) { return p > 1.5 ? std::exp(-n) : 1.0; }), 0.03);
  const auto j = to_json(est);
  CHECK(j["value"] == doctest::Approx(1.5));
  CHECK(j["slopes"].size() == 2);
  CHECK(j.contains("rule"));
}
