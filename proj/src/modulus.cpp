#include "confdim/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "confdim/vertex_cut.hpp"

namespace confdim {

double vol_p(const WeightFunction& rho, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("vol_p needs p > 0");
  double total = 0.0;
  for (double v : rho.values) total += v == 0.0 ? 0.0 : std::pow(v, p);
  return total;
}

Admissibility is_admissible(const CurveFamily& family, const WeightFunction& rho, double tol) {
  Admissibility out;
  const CurveLength sc = shortest_curve_length(family, rho);
  out.shortest_length = sc.length;
  out.admissible = sc.length >= 1.0 - tol;
  if (!out.admissible) out.witness = sc.path;
  return out;
}

namespace {

Path as_vertex_set(Path path) {
  std::sort(path.begin(), path.end());
  path.erase(std::unique(path.begin(), path.end()), path.end());
  return path;
}

double set_length(const Path& set, const WeightFunction& rho) {
  double s = 0.0;
  for (VertexId v : set) s += rho[v];
  return s;
}

std::vector<Path> active_curves(const std::vector<Path>& curves, const WeightFunction& rho, double tol) {
  std::vector<Path> out;
  for (const auto& c : curves)
    if (std::abs(set_length(c, rho) - 1.0) <= std::max(tol, 1e-9)) out.push_back(c);
  return out;
}

// Lagrangian dual of min sum rho^p s.t. rho(γ) >= 1 over a finite curve set:
//   g(λ) = sum λ_γ - (p-1)/p * sum_v η_v ρ_v,  η_v = sum_{γ∋v} λ_γ,
//   ρ_v = (η_v / p)^(1/(p-1)).
// Maximized by exact coordinate ascent; ∂g/∂λ_γ = 1 - ρ(γ).
class DualAscent {
 public:
  DualAscent(std::size_t n, double p) : p_(p), expo_(1.0 / (p - 1.0)), eta_(n, 0.0) {}

  void add_curve(Path curve) {
    curves_.push_back(std::move(curve));
    lambda_.push_back(0.0);
  }

  std::size_t curve_count() const { return curves_.size(); }
  const std::vector<Path>& curves() const { return curves_; }

  double rho_of(double eta) const { return eta <= 0.0 ? 0.0 : std::pow(eta / p_, expo_); }

  WeightFunction weights() const {
    WeightFunction w;
    w.values.reserve(eta_.size());
    for (double e : eta_) w.values.push_back(rho_of(e));
    return w;
  }

  double dual_value() const {
    double total = 0.0;
    for (double l : lambda_) total += l;
    double penalty = 0.0;
    for (double e : eta_) penalty += e * rho_of(e);
    return total - (p_ - 1.0) / p_ * penalty;
  }

  /// One Gauss-Seidel pass; returns the largest KKT residual seen.
  double sweep() {
    recompute_eta();
    double residual = 0.0;
    for (std::size_t i = 0; i < curves_.size(); ++i) {
      const Path& c = curves_[i];
      for (VertexId v : c) eta_[static_cast<std::size_t>(v)] -= lambda_[i];
      for (VertexId v : c) eta_[static_cast<std::size_t>(v)] = std::max(0.0, eta_[static_cast<std::size_t>(v)]);
      const double len_before = length_with(c, lambda_[i]);
      residual = std::max(residual, lambda_[i] > 0.0 ? std::abs(1.0 - len_before) : std::max(0.0, 1.0 - len_before));
      const double t = solve_coordinate(c, lambda_[i]);
      lambda_[i] = t;
      for (VertexId v : c) eta_[static_cast<std::size_t>(v)] += t;
    }
    return residual;
  }

 private:
  void recompute_eta() {
    std::fill(eta_.begin(), eta_.end(), 0.0);
    for (std::size_t i = 0; i < curves_.size(); ++i)
      for (VertexId v : curves_[i]) eta_[static_cast<std::size_t>(v)] += lambda_[i];
  }

  double length_with(const Path& c, double t) const {
    double s = 0.0;
    for (VertexId v : c) s += rho_of(eta_[static_cast<std::size_t>(v)] + t);
    return s;
  }

  // Length and its derivative in t, sharing one pow per vertex.
  std::pair<double, double> length_and_slope(const Path& c, double t) const {
    double len = 0.0;
    double slope = 0.0;
    for (VertexId v : c) {
      const double x = (eta_[static_cast<std::size_t>(v)] + t) / p_;
      if (x <= 0.0) return {len, std::numeric_limits<double>::infinity()};
      const double y = std::pow(x, expo_ - 1.0);
      len += y * x;
      slope += y;
    }
    return {len, slope * expo_ / p_};
  }

  // Smallest t >= 0 with length_with(c, t) >= 1; the length is increasing in t.
  double solve_coordinate(const Path& c, double guess) const {
    if (length_with(c, 0.0) >= 1.0) return 0.0;
    double lo = 0.0;
    double hi = p_ * std::pow(static_cast<double>(c.size()), 1.0 - p_);
    while (length_with(c, hi) < 1.0) hi *= 2.0;
    double t = std::clamp(guess, lo, hi);
    for (int it = 0; it < 200; ++it) {
      const auto [len, d] = length_and_slope(c, t);
      const double f = len - 1.0;
      if (f == 0.0 && std::isfinite(d)) return t;
      if (std::isfinite(d)) {
        if (f < 0.0) lo = t; else hi = t;
      } else {
        lo = t;
      }
      if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
      double next = std::isfinite(d) && d > 0.0 ? t - f / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      t = next;
    }
    return hi;
  }

  double p_;
  double expo_;
  std::vector<double> eta_;
  std::vector<Path> curves_;
  std::vector<double> lambda_;
};

// Dense primal simplex for max sum λ s.t. sum_{γ∋v} λ_γ <= 1, λ >= 0. Columns (curves) and rows (vertices) are appended as
// constraint generation discovers them; the basis is kept across solves.
class CurveLp {
 public:
  explicit CurveLp(std::size_t n) : row_of_vertex_(n, -1) {}

  /// Adds a curve column (and rows for any vertex not seen before).
  void add_curve(const Path& curve) {
    for (VertexId v : curve) {
      if (row_of_vertex_[static_cast<std::size_t>(v)] >= 0) continue;
      const int r = static_cast<int>(rows_.size());
      row_of_vertex_[static_cast<std::size_t>(v)] = r;
      vertex_of_row_.push_back(v);
      // New slack column, basic in the new row.
      for (auto& row : rows_) row.push_back(0.0);
      objective_.push_back(0.0);
      column_kind_.push_back({true, r});
      std::vector<double> row(column_kind_.size(), 0.0);
      row.back() = 1.0;
      rows_.push_back(std::move(row));
      rhs_.push_back(1.0);
      basis_.push_back(static_cast<int>(column_kind_.size()) - 1);
    }
    // Column of the new curve in the current tableau is B^-1 a, i.e. the sum
    // of the tableau's slack columns for the curve's rows.
    std::vector<int> slack_col_of_row(rows_.size(), -1);
    for (std::size_t j = 0; j < column_kind_.size(); ++j)
      if (column_kind_[j].slack) slack_col_of_row[static_cast<std::size_t>(column_kind_[j].index)] = static_cast<int>(j);
    double reduced = 1.0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      double entry = 0.0;
      for (VertexId v : curve) entry += rows_[i][static_cast<std::size_t>(slack_col_of_row[static_cast<std::size_t>(row_of_vertex_[static_cast<std::size_t>(v)])])];
      rows_[i].push_back(entry);
    }
    for (VertexId v : curve) reduced += objective_[static_cast<std::size_t>(slack_col_of_row[static_cast<std::size_t>(row_of_vertex_[static_cast<std::size_t>(v)])])];
    objective_.push_back(reduced);
    column_kind_.push_back({false, static_cast<int>(curve_count_++)});
  }

  /// Runs primal simplex to optimality; returns pivots performed.
  int solve() {
    constexpr double kEps = 1e-11;
    constexpr double kPivotTol = 1e-9;
    constexpr int kDegenerateRun = 50;
    int pivots = 0;
    int degenerate_run = 0;
    while (true) {
      // Largest reduced cost, switching to Bland's rule after a run of
      // degenerate pivots so the method cannot cycle.
      const bool bland = degenerate_run >= kDegenerateRun;
      int enter = -1;
      for (std::size_t j = 0; j < objective_.size(); ++j) {
        if (objective_[j] <= kEps) continue;
        if (enter < 0 || (!bland && objective_[j] > objective_[static_cast<std::size_t>(enter)])) {
          enter = static_cast<int>(j);
          if (bland) break;
        }
      }
      if (enter < 0) return pivots;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        const double a = rows_[i][static_cast<std::size_t>(enter)];
        if (a <= kPivotTol) continue;
        const double ratio = rhs_[i] / a;
        bool take = leave < 0 || ratio < best_ratio - 1e-12;
        if (!take && ratio <= best_ratio + 1e-12) {
          const auto li = static_cast<std::size_t>(leave);
          take = bland ? basis_[i] < basis_[li] : a > rows_[li][static_cast<std::size_t>(enter)];
        }
        if (take) {
          best_ratio = ratio;
          leave = static_cast<int>(i);
        }
      }
      if (leave < 0) throw std::logic_error("curve LP is unbounded");
      degenerate_run = best_ratio <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter));
      ++pivots;
    }
  }

  /// Dual prices of the vertex rows: an optimal primal weight function.
  WeightFunction weights(std::size_t n) const {
    WeightFunction w = WeightFunction::constant(n, 0.0);
    for (std::size_t j = 0; j < column_kind_.size(); ++j) {
      if (!column_kind_[j].slack) continue;
      const VertexId v = vertex_of_row_[static_cast<std::size_t>(column_kind_[j].index)];
      w.values[static_cast<std::size_t>(v)] = std::max(0.0, -objective_[j]);
    }
    return w;
  }

  double value() const { return objective_value_; }

 private:
  struct ColumnKind {
    bool slack;
    int index;
  };

  void pivot(std::size_t r, std::size_t c) {
    const double pv = rows_[r][c];
    for (double& x : rows_[r]) x /= pv;
    rhs_[r] /= pv;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == r) continue;
      const double f = rows_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < rows_[i].size(); ++j) {
        rows_[i][j] -= f * rows_[r][j];
        if (std::abs(rows_[i][j]) < 1e-13) rows_[i][j] = 0.0;
      }
      rows_[i][c] = 0.0;
      rhs_[i] -= f * rhs_[r];
      if (rhs_[i] < 0.0 && rhs_[i] > -1e-12) rhs_[i] = 0.0;
    }
    const double f = objective_[c];
    for (std::size_t j = 0; j < objective_.size(); ++j) objective_[j] -= f * rows_[r][j];
    objective_[c] = 0.0;
    objective_value_ += f * rhs_[r];
    basis_[r] = static_cast<int>(c);
  }

  std::vector<int> row_of_vertex_;
  std::vector<VertexId> vertex_of_row_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rhs_;
  std::vector<double> objective_;
  std::vector<int> basis_;
  std::vector<ColumnKind> column_kind_;
  std::size_t curve_count_ = 0;
  double objective_value_ = 0.0;
};

ModulusResult empty_result(std::size_t n, double p) {
  ModulusResult r;
  r.p = p;
  r.weights = WeightFunction::constant(n, 0.0);
  return r;
}

ModulusResult finish(WeightFunction rho, double shortest, double lower, double p, int iterations,
                     const std::vector<Path>& curves, double tol) {
  ModulusResult r;
  r.p = p;
  r.iterations = iterations;
  if (shortest > 0.0 && std::isfinite(shortest)) {
    for (double& v : rho.values) v /= shortest;
  }
  r.value = vol_p(rho, p);
  r.lower_bound = std::min(lower, r.value);
  r.tolerance_achieved = r.value > 0.0 ? (r.value - r.lower_bound) / r.value : 0.0;
  r.active_curves = active_curves(curves, rho, tol);
  r.generated_curves = curves.size();
  r.weights = std::move(rho);
  return r;
}

ModulusResult solve_p1(const CurveFamily& family, const ModulusOptions& options) {
  const std::size_t n = family.graph->vertex_count();
  constexpr int kBatch = 32;
  // Separation runs at a convex combination of the best admissible weights
  // seen so far and the LP duals. Extreme-point duals of the degenerate master
  // LP otherwise wander and the generation stalls.
  constexpr double kSmoothing = 0.5;
  constexpr double kViolated = 1.0 - 1e-9;
  CurveLp lp(n);
  std::set<Path> seen;
  std::vector<Path> curves;
  WeightFunction rho = WeightFunction::constant(n, 0.0);
  WeightFunction center;
  double center_vol = std::numeric_limits<double>::infinity();
  auto offer = [&](const WeightFunction& w, double length) {
    if (!(length > 0.0) || std::isinf(length)) return;
    const double v = vol_p(w, 1.0) / length;
    if (v < center_vol) {
      center = w;
      for (double& x : center.values) x /= length;
      center_vol = v;
    }
  };
  if (family.mandatory.empty()) {
    // Indicator of a minimum vertex cut as the first center. It still has to
    // pass the admissibility check, and the LP must match it before return.
    WeightFunction cut = WeightFunction::constant(n, 0.0);
    for (VertexId v : modulus_p1_mincut(family).cut) cut.values[static_cast<std::size_t>(v)] = 1.0;
    offer(cut, shortest_curve_length(family, cut).length);
  }
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const CurveLength sc = shortest_curve_length(family, rho);
    if (sc.length >= kViolated) return finish(rho, sc.length, lp.value(), 1.0, iter, curves, options.tol);
    offer(rho, sc.length);
    if (!center.values.empty() && center_vol - lp.value() <= 1e-12 * center_vol) {
      return finish(center, 1.0, lp.value(), 1.0, iter, curves, options.tol);
    }
    WeightFunction probe = rho;
    CurveLength next = sc;
    if (!center.values.empty()) {
      for (std::size_t v = 0; v < n; ++v)
        probe.values[v] = kSmoothing * center.values[v] + (1.0 - kSmoothing) * rho.values[v];
      next = shortest_curve_length(family, probe);
      if (next.length >= kViolated) {
        // Mispriced: the blend is admissible and strictly improves the center.
        offer(probe, next.length);
        continue;
      }
    }
    // Batch of violated curves: after each one its vertices are penalized so
    // the next search prefers a different route.
    for (int b = 0; b < kBatch && next.length < kViolated; ++b) {
      Path c = as_vertex_set(next.path);
      if (!seen.insert(c).second) {
        throw std::logic_error("p = 1 constraint generation revisited a curve");
      }
      curves.push_back(c);
      lp.add_curve(c);
      for (VertexId v : c) probe.values[static_cast<std::size_t>(v)] += 1.0;
      next = shortest_curve_length(family, probe);
    }
    lp.solve();
    rho = lp.weights(n);
  }
  const CurveLength sc = shortest_curve_length(family, rho);
  throw ModulusNonConvergence("p = 1 modulus did not converge within the iteration cap",
                              finish(rho, sc.length, lp.value(), 1.0, options.max_iterations, curves, options.tol));
}

ModulusResult solve_dual(const CurveFamily& family, double p, const ModulusOptions& options) {
  const std::size_t n = family.graph->vertex_count();
  DualAscent dual(n, p);
  std::set<Path> seen;
  // Few sweeps while new curves keep arriving; more once the oracle stalls.
  constexpr int kSweepsGrowing = 2;
  constexpr int kSweepsStalled = 50;
  int sweeps = kSweepsGrowing;
  WeightFunction best_rho;
  double best_upper = std::numeric_limits<double>::infinity();
  double best_shortest = 0.0;
  double best_lower = 0.0;
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    for (int s = 0; s < sweeps && dual.curve_count() > 0; ++s) {
      if (dual.sweep() <= 0.1 * options.tol) break;
    }
    WeightFunction rho = dual.weights();
    const CurveLength sc = shortest_curve_length(family, rho);
    const double lower = dual.dual_value();
    double upper = std::numeric_limits<double>::infinity();
    if (sc.length > 0.0) upper = vol_p(rho, p) / std::pow(sc.length, p);
    if (upper < best_upper) {
      best_upper = upper;
      best_rho = rho;
      best_shortest = sc.length;
    }
    best_lower = std::max(best_lower, lower);
    if (std::isfinite(best_upper) && best_upper - best_lower <= options.tol * best_upper) {
      return finish(best_rho, best_shortest, best_lower, p, iter, dual.curves(), options.tol);
    }
    sweeps = kSweepsStalled;
    if (sc.length < 1.0) {
      Path c = as_vertex_set(sc.path);
      if (seen.insert(c).second) {
        dual.add_curve(std::move(c));
        sweeps = kSweepsGrowing;
      }
    }
  }
  if (!std::isfinite(best_upper)) {
    throw ModulusNonConvergence("modulus did not converge and no admissible iterate was found", empty_result(n, p));
  }
  std::ostringstream msg;
  msg << "modulus did not converge within " << options.max_iterations << " iterations (gap "
      << (best_upper - best_lower) / best_upper << ")";
  throw ModulusNonConvergence(msg.str(), finish(best_rho, best_shortest, best_lower, p, options.max_iterations,
                                                dual.curves(), options.tol));
}

}  // namespace

ModulusResult compute_modulus(const CurveFamily& family, double p, const ModulusOptions& options) {
  if (!(p >= 1.0)) throw std::invalid_argument("modulus needs p >= 1");
  if (!(options.tol > 0.0)) throw std::invalid_argument("modulus tolerance must be positive");
  const std::size_t n = family.graph ? family.graph->vertex_count() : 0;
  if (family.empty()) return empty_result(n, p);
  if (p == 1.0) return solve_p1(family, options);
  return solve_dual(family, p, options);
}

MinCutModulus modulus_p1_mincut(const CurveFamily& family) {
  if (!family.mandatory.empty()) {
    throw std::invalid_argument("min-cut modulus needs a family without a mandatory set");
  }
  MinCutModulus out;
  if (!family.graph || family.sources.empty() || family.sinks.empty()) return out;
  // Every vertex is cuttable, terminals included, so a vertex shared by the
  // sources and sinks is simply part of the cut.
  const std::vector<char> cuttable(family.graph->vertex_count(), 1);
  const VertexCutResult cut = min_vertex_cut(*family.graph, family.sources, family.sinks, cuttable);
  out.infinite = cut.infinite;
  out.value = cut.size;
  out.cut = cut.cut;
  return out;
}

nlohmann::json to_json(const ModulusResult& result, bool include_weights) {
  nlohmann::json doc{{"value", result.value},
                     {"lower_bound", result.lower_bound},
                     {"p", result.p},
                     {"iterations", result.iterations},
                     {"tolerance_achieved", result.tolerance_achieved},
                     {"generated_curves", result.generated_curves},
                     {"active_curves", result.active_curves.size()}};
  if (include_weights) doc["weights"] = result.weights.values;
  return doc;
}

}  // namespace confdim
