#include "confdim/critical_exponent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "confdim/cutpoints.hpp"
#include "confdim/nerve.hpp"
#include "confdim/parallel.hpp"

namespace confdim {

const ScanEntry& ScanResult::entry(std::size_t p_index, int n) const {
  for (const auto& e : entries)
    if (e.p == p_grid.at(p_index) && e.n == n) return e;
  throw std::out_of_range("no scan entry for n = " + std::to_string(n));
}

double ScanResult::value(std::size_t p_index, int n) const { return entry(p_index, n).value; }

ScanResult scan(const FiniteMetricSpace& space, const NetHierarchy& hierarchy, const ScanOptions& options) {
  if (options.p_grid.empty()) throw std::invalid_argument("empty p grid");
  for (double p : options.p_grid)
    if (!(p >= 1.0)) throw std::invalid_argument("scan exponents must be >= 1");
  if (options.n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  const int depth = hierarchy.depth();
  if (depth < 2) {
    throw std::invalid_argument("hierarchy depth " + std::to_string(depth) +
                                " leaves no (k, n) pair with k, n >= 1");
  }

  ScanResult out;
  out.base = hierarchy.base;
  out.p_grid = options.p_grid;
  out.complete = options.balls_per_scale == 0;
  for (int n = 1; n <= std::min(options.n_max, depth - 1); ++n) out.ns.push_back(n);

  std::map<int, std::shared_ptr<const NerveGraph>> nerves;
  for (int level = 2; level <= depth; ++level) {
    if (level - 1 > options.n_max && level - 1 > depth) continue;
    nerves[level] = std::make_shared<const NerveGraph>(build_nerve(space, build_covering(space, hierarchy, level)));
  }

  struct Task {
    int k;
    int n;
    PointId center;
    CurveFamily family;
  };
  std::vector<Task> tasks;
  for (int k = 1; k < depth; ++k) {
    const auto& centers = hierarchy.levels[static_cast<std::size_t>(k)];
    std::size_t take = centers.size();
    if (options.balls_per_scale > 0) take = std::min(take, static_cast<std::size_t>(options.balls_per_scale));
    out.sampled_balls_per_level[k] = static_cast<int>(take);
    for (int n : out.ns) {
      if (k + n > depth) continue;
      for (std::size_t b = 0; b < take; ++b) {
        tasks.push_back({k, n, centers[b], annulus_family(space, hierarchy, nerves.at(k + n), centers[b], k)});
      }
    }
  }

  const std::size_t np = options.p_grid.size();
  std::vector<double> values(tasks.size() * np, 0.0);
  ModulusOptions mopt;
  mopt.tol = options.tol;
  parallel_for(values.size(), options.workers, [&](std::size_t i) {
    const Task& t = tasks[i / np];
    const double p = options.p_grid[i % np];
    if (t.family.empty()) return;
    try {
      values[i] = compute_modulus(t.family, p, mopt).value;
    } catch (const ModulusNonConvergence& e) {
      values[i] = e.best().value;
    }
  });

  for (std::size_t pi = 0; pi < np; ++pi) {
    for (int n : out.ns) {
      ScanEntry e{options.p_grid[pi], n, 0, 0.0, 0};
      for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        const Task& t = tasks[ti];
        if (t.n != n) continue;
        const double v = values[ti * np + pi];
        ++e.balls_sampled;
        if (v > e.value || e.k == 0) {
          if (v > e.value || e.k == 0) e.k = t.k;
          e.value = std::max(e.value, v);
        }
        if (options.keep_per_ball) out.per_ball.push_back({options.p_grid[pi], n, t.k, t.center, v});
      }
      out.entries.push_back(e);
    }
  }
  return out;
}

std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) throw std::invalid_argument("line fit needs at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("line fit needs distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double default_decay_threshold(double base) { return 0.05 * std::log(base); }

PcEstimate estimate_pc(const ScanResult& scan, double decay_threshold) {
  if (scan.ns.size() < 3) throw std::invalid_argument("p_c estimate needs at least 3 scales per exponent");
  PcEstimate est;
  est.threshold = decay_threshold;
  {
    std::ostringstream rule;
    rule << "p is supercritical when the slope of log M_{p,n} against n is <= -" << decay_threshold
         << "; p_c is the midpoint between the largest subcritical p and the supercritical p above it";
    est.rule = rule.str();
  }
  bool all_zero = true;
  for (std::size_t pi = 0; pi < scan.p_grid.size(); ++pi) {
    SlopeFit fit;
    fit.p = scan.p_grid[pi];
    std::vector<double> xs;
    std::vector<double> ys;
    bool hits_zero = false;
    for (int n : scan.ns) {
      const double v = scan.value(pi, n);
      if (v > 0.0) {
        all_zero = false;
        xs.push_back(n);
        ys.push_back(std::log(v));
      } else {
        hits_zero = true;
      }
    }
    if (hits_zero || xs.size() < 2) {
      fit.slope = -std::numeric_limits<double>::infinity();
      fit.intercept = 0.0;
    } else {
      std::tie(fit.slope, fit.intercept) = fit_line(xs, ys);
      for (std::size_t i = 0; i < xs.size(); ++i) fit.residuals.push_back(ys[i] - (fit.slope * xs[i] + fit.intercept));
    }
    fit.supercritical = fit.slope <= -decay_threshold;
    est.slopes.push_back(std::move(fit));
  }
  const double p_min = scan.p_grid.front();
  const double p_max = scan.p_grid.back();
  if (all_zero) {
    est.value = est.bracket_low = est.bracket_high = p_min;
    est.note = "every M_{p,n} is zero; degenerate bracket at the smallest exponent";
    return est;
  }
  // Smallest index from which every larger exponent is supercritical.
  std::size_t first = est.slopes.size();
  while (first > 0 && est.slopes[first - 1].supercritical) --first;
  if (first == est.slopes.size()) {
    est.value = est.bracket_low = est.bracket_high = p_max;
    est.lower_bound_only = true;
    est.note = "no supercritical exponent in the grid: p_c >= " + std::to_string(p_max);
    return est;
  }
  if (first == 0) {
    est.value = est.bracket_low = est.bracket_high = p_min;
    est.note = "the smallest exponent is already supercritical; degenerate bracket";
    return est;
  }
  est.bracket_low = scan.p_grid[first - 1];
  est.bracket_high = scan.p_grid[first];
  est.value = 0.5 * (est.bracket_low + est.bracket_high);
  std::ostringstream note;
  note << "bracket width " << est.bracket_high - est.bracket_low << "; finite-scale regression over n = "
       << scan.ns.front() << ".." << scan.ns.back() << ", see residuals for oscillation";
  est.note = note.str();
  return est;
}

SubmultiplicativityReport submultiplicativity(const ScanResult& scan, std::size_t p_index) {
  SubmultiplicativityReport rep;
  rep.p = scan.p_grid.at(p_index);
  rep.min_constant = std::numeric_limits<double>::infinity();
  for (int n : scan.ns) {
    for (int m : scan.ns) {
      if (m < n) continue;
      if (std::find(scan.ns.begin(), scan.ns.end(), n + m) == scan.ns.end()) continue;
      const double a = scan.value(p_index, n);
      const double b = scan.value(p_index, m);
      const double c = scan.value(p_index, n + m);
      if (a <= 0.0 || b <= 0.0) {
        if (c > 0.0) rep.finite = false;
        continue;
      }
      const double k = c / (a * b);
      rep.pairs.push_back({n, m, k});
      rep.min_constant = std::min(rep.min_constant, k);
      rep.max_constant = std::max(rep.max_constant, k);
    }
  }
  if (rep.pairs.empty()) rep.min_constant = 0.0;
  return rep;
}

AnnulusDecayFit decay_against_annulus_count(const ScanResult& scan, std::size_t p_index) {
  AnnulusDecayFit fit;
  fit.p = scan.p_grid.at(p_index);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int n : scan.ns) {
    const int m = max_annulus_count(n, scan.base);
    const double v = scan.value(p_index, n);
    if (m < 1 || v <= 0.0) continue;
    fit.ns.push_back(n);
    fit.annulus_counts.push_back(m);
    fit.values.push_back(v);
    xs.push_back(std::log(static_cast<double>(m)));
    ys.push_back(std::log(v));
  }
  fit.slope = xs.size() >= 2 ? fit_line(xs, ys).first : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

nlohmann::json to_json(const PcEstimate& estimate) {
  nlohmann::json slopes = nlohmann::json::array();
  for (const auto& s : estimate.slopes) {
    slopes.push_back({{"p", s.p},
                      {"slope", std::isfinite(s.slope) ? nlohmann::json(s.slope) : nlohmann::json("-inf")},
                      {"residuals", s.residuals},
                      {"supercritical", s.supercritical}});
  }
  return {{"value", estimate.value},
          {"lower_bound_only", estimate.lower_bound_only},
          {"bracket", {estimate.bracket_low, estimate.bracket_high}},
          {"threshold", estimate.threshold},
          {"rule", estimate.rule},
          {"note", estimate.note},
          {"slopes", slopes}};
}

std::string to_csv(const ScanResult& scan) {
  std::string out = "p,n,k,M_pn,balls_sampled\n";
  char buf[128];
  for (const auto& e : scan.entries) {
    std::snprintf(buf, sizeof buf, "%.12g,%d,%d,%.12g,%d\n", e.p, e.n, e.k, e.value, e.balls_sampled);
    out += buf;
  }
  return out;
}

}  // namespace confdim
