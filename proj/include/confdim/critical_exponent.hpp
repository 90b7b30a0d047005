#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confdim/modulus.hpp"
#include "confdim/space.hpp"

namespace confdim {

struct ScanOptions {
  std::vector<double> p_grid{1.0, 2.0};
  int n_max = 3;
  /// Balls sampled per base level, first by center id; 0 means every ball.
  int balls_per_scale = 0;
  double tol = 1e-4;
  int workers = 1;
  bool keep_per_ball = false;
};

/// M_{p,n}: the largest annulus modulus over the sampled balls of every base
/// level k >= 1 with k + n within the hierarchy.
struct ScanEntry {
  double p = 1.0;
  int n = 1;
  /// Base level attaining the maximum.
  int k = 0;
  double value = 0.0;
  int balls_sampled = 0;
};

struct BallEntry {
  double p = 1.0;
  int n = 1;
  int k = 0;
  PointId center = 0;
  double value = 0.0;
};

struct ScanResult {
  double base = 2.0;
  std::vector<double> p_grid;
  std::vector<int> ns;
  /// Ordered by p (grid order) then n.
  std::vector<ScanEntry> entries;
  std::vector<BallEntry> per_ball;
  std::map<int, int> sampled_balls_per_level;
  bool complete = false;

  double value(std::size_t p_index, int n) const;
  const ScanEntry& entry(std::size_t p_index, int n) const;
};

ScanResult scan(const FiniteMetricSpace& space, const NetHierarchy& hierarchy, const ScanOptions& options);

struct SlopeFit {
  double p = 1.0;
  /// Least-squares slope of log M_{p,n} against n; -inf when M reaches 0.
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
  bool supercritical = false;
};

struct PcEstimate {
  double value = 1.0;
  /// No supercritical exponent in the grid: value is only a lower bound.
  bool lower_bound_only = false;
  double bracket_low = 1.0;
  double bracket_high = 1.0;
  double threshold = 0.0;
  std::string rule;
  std::string note;
  std::vector<SlopeFit> slopes;
};

/// Default decay threshold: 0.05 log a.
double default_decay_threshold(double base);

PcEstimate estimate_pc(const ScanResult& scan, double decay_threshold);

struct SubmultiplicativityReport {
  double p = 1.0;
  struct Pair {
    int n;
    int m;
    double constant;
  };
  std::vector<Pair> pairs;
  bool finite = true;
  double min_constant = 0.0;
  double max_constant = 0.0;
  double spread() const { return min_constant > 0.0 ? max_constant / min_constant : 0.0; }
};

/// Fits K_{n,m} = M_{p,n+m} / (M_{p,n} M_{p,m}) over every available pair.
SubmultiplicativityReport submultiplicativity(const ScanResult& scan, std::size_t p_index);

struct AnnulusDecayFit {
  double p = 1.0;
  double slope = 0.0;
  std::vector<int> ns;
  std::vector<int> annulus_counts;
  std::vector<double> values;
};

/// Slope of log M_{p,n} against log m(n), m(n) the largest annulus count the
/// constructive weight admits at relative scale n.
AnnulusDecayFit decay_against_annulus_count(const ScanResult& scan, std::size_t p_index);

/// Ordinary least squares y = slope * x + intercept.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y);

nlohmann::json to_json(const PcEstimate& estimate);
/// CSV with columns p,n,k,M_pn,balls_sampled, 12 significant digits.
std::string to_csv(const ScanResult& scan);

}  // namespace confdim
