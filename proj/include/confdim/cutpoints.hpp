#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "confdim/modulus.hpp"
#include "confdim/nerve.hpp"
#include "confdim/space.hpp"

namespace confdim {

/// Which (x, r = a^-i) pairs check_uws probes: every level in
/// [min_level, max_level] (max_level < 0 means depth - 1), and per level the
/// first `max_per_level` centers by id (0 means all).
struct ProbeSpec {
  int min_level = 1;
  int max_level = -1;
  int max_per_level = 0;
};

struct UwsProbe {
  PointId center = 0;
  int level = 0;
  double radius = 0.0;
  bool degenerate = false;
  int min_cut_size = 0;
  /// Centers of the cut balls, sorted.
  std::vector<PointId> cut_set;
  bool verified = false;
  /// Diameters of the components meeting B(x, r/2) after the cut is removed.
  std::vector<double> component_diameters;
};

struct UwsReport {
  int finest_level = 0;
  int c_max = 0;
  int c_observed = 0;
  int degenerate_count = 0;
  bool all_verified = true;
  std::vector<UwsProbe> probes;

  bool passes() const { return all_verified && c_observed <= c_max; }
  /// Largest cut size among non-degenerate probes at `level`; -1 if none.
  int max_cut_at_level(int level) const;
};

/// One UWS probe on `finest`: minimum cut among balls centered in B(x, r)
/// separating balls meeting B(x, r/2) from balls meeting X minus the closed
/// r-ball.
UwsProbe uws_probe(const FiniteMetricSpace& space, const NerveGraph& finest, PointId x, double r);

UwsReport check_uws(const FiniteMetricSpace& space, const NetHierarchy& hierarchy, int c_max,
                    const ProbeSpec& probes = {}, int workers = 1);

struct WsStep {
  int budget = 0;
  std::vector<PointId> points;
  double delta = 0.0;
};

struct WsReport {
  std::vector<WsStep> steps;
  std::size_t pool_size = 0;
  /// delta never increases along the schedule and ends below where it started
  /// (or is identically zero).
  bool decreasing = false;
};

/// For each budget, grows P from the pool of UWS cut points (every probe at
/// every level): repeatedly pick the widest component of the finest nerve
/// minus the balls containing P and add the pool point inside it farthest
/// from P. delta is the largest component diameter.
WsReport check_ws(const FiniteMetricSpace& space, const NetHierarchy& hierarchy,
                  const std::vector<int>& budgets, int workers = 1);

/// Largest component diameter of the finest nerve after deleting every ball
/// containing a point of P. Direct recomputation, used to audit WsReport.
double ws_delta(const FiniteMetricSpace& space, const NerveGraph& finest, const std::vector<PointId>& points);

class InfeasibleScale : public std::invalid_argument {
 public:
  InfeasibleScale(const std::string& what, int max_feasible_m)
      : std::invalid_argument(what), max_feasible_m_(max_feasible_m) {}
  int max_feasible_m() const { return max_feasible_m_; }

 private:
  int max_feasible_m_;
};

struct Annulus {
  double inner = 0.0;
  double outer = 0.0;
  std::vector<PointId> points;
  /// R_{z,i}: one point of the annulus per cut ball.
  std::vector<PointId> representatives;
  std::vector<VertexId> cut;
};

struct BoundCheck {
  PointId z = 0;
  int k = 0;
  int n = 0;
  int m = 0;
  double s = 0.0;
  std::vector<Annulus> annuli;
  /// Union of the R_{z,i}, sorted.
  std::vector<PointId> representatives;
  /// Balls of S_{k+n} containing a representative.
  std::vector<VertexId> u;
  WeightFunction rho;
  std::shared_ptr<const NerveGraph> nerve;
  bool admissible = false;
  double shortest_length = 0.0;
  /// max_i #R_{z,i}.
  int k_cut = 0;
  /// #U / m.
  double k_prime = 0.0;

  double vol_p(double p) const;
  /// vol_p * m^(p-1); equals K' by construction.
  double bound_ratio(double p) const { return vol_p(p) * std::pow(static_cast<double>(m), p - 1.0); }
  CurveFamily family(const FiniteMetricSpace& space) const;
};

/// Largest m with a^-(k+n) <= 2^-m a^-k / 3, i.e. floor((n log a - log 3) / log 2).
int max_annulus_count(int n, double a);

/// eta_n = 1 / floor((n log a - log 3) / log 2). Throws when the floor is <= 0.
double eta_n(int n, double a);

/// The weight rho = (1/m) 1_U on S_{k+n} built from m dyadic annuli around z
/// at s = a^-k / 3. Throws InfeasibleScale when a^-(k+n) > 2^-m s.
BoundCheck build_theorem_weight(const FiniteMetricSpace& space, const NetHierarchy& hierarchy, PointId z,
                                int k, int n, int m);

struct ScaleGradedCut {
  PointId x = 0;
  double s = 0.0;
  double r = 0.0;
  int chain_n = 0;
  double epsilon = 0.0;
  /// Points of the epsilon-net of the shell K.
  std::vector<PointId> cover;
  /// Union of the per-ball probe cuts.
  std::size_t chain_size = 0;
  int max_probe_cut = 0;
  std::vector<PointId> cut_set;
  bool verified = false;

  std::size_t size() const { return cut_set.size(); }
};

/// Cut set separating B(x, s) from X minus the closed r-ball, assembled from
/// UWS probes at radius 2 epsilon around an epsilon-net of the shell
/// K = closed B(x, r - 1/n) minus B(x, s + 1/n), then pruned to a minimum cut
/// among the collected balls.
ScaleGradedCut scale_graded_uws(const FiniteMetricSpace& space, const NetHierarchy& hierarchy, PointId x,
                                double s, double r);

nlohmann::json to_json(const UwsReport& report);
nlohmann::json to_json(const WsReport& report);
nlohmann::json to_json(const BoundCheck& check, const std::vector<double>& ps);
nlohmann::json to_json(const ScaleGradedCut& cut);

}  // namespace confdim
