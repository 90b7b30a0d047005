#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "confdim/space.hpp"

namespace confdim {

using VertexId = int;
using Path = std::vector<VertexId>;

/// Incidence graph of a covering: balls are vertices, two balls are adjacent
/// iff they share a point of the space.
class NerveGraph {
 public:
  explicit NerveGraph(Covering covering);

  int level() const { return covering_.level; }
  double radius() const { return covering_.radius; }
  std::size_t vertex_count() const { return adjacency_.size(); }
  const Covering& covering() const { return covering_; }

  std::span<const VertexId> neighbors(VertexId v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  bool adjacent(VertexId u, VertexId v) const;
  std::size_t edge_count() const;
  std::vector<std::pair<VertexId, VertexId>> edges() const;

  PointId center(VertexId v) const { return covering_.centers[static_cast<std::size_t>(v)]; }
  std::span<const PointId> members(VertexId v) const { return covering_.balls[static_cast<std::size_t>(v)]; }
  /// Balls containing point y.
  std::span<const VertexId> balls_containing(PointId y) const { return point_to_balls_[y]; }

  /// Vertices whose ball contains a point satisfying `pred`.
  template <typename Pred>
  std::vector<VertexId> vertices_meeting(Pred&& pred) const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < static_cast<VertexId>(vertex_count()); ++v) {
      for (PointId y : members(v)) {
        if (pred(y)) {
          out.push_back(v);
          break;
        }
      }
    }
    return out;
  }

  /// Debug dump: a header line followed by one "u v" line per edge.
  void write_edge_list(std::ostream& out) const;

 private:
  Covering covering_;
  std::vector<std::vector<VertexId>> adjacency_;
  std::vector<std::vector<VertexId>> point_to_balls_;
};

NerveGraph build_nerve(const FiniteMetricSpace& space, Covering covering);

/// Nonnegative weights on nerve vertices.
struct WeightFunction {
  std::vector<double> values;

  static WeightFunction constant(std::size_t n, double v) { return {std::vector<double>(n, v)}; }
  double operator[](VertexId v) const { return values[static_cast<std::size_t>(v)]; }
  /// Throws std::invalid_argument on a negative or non-finite entry.
  void validate() const;
};

/// Simple vertex paths in a nerve from `sources` to `sinks`, optionally
/// required to visit a vertex of `mandatory`. Never materialized; queried via
/// shortest_curve_length.
struct CurveFamily {
  std::shared_ptr<const NerveGraph> graph;
  std::vector<VertexId> sources;
  std::vector<VertexId> sinks;
  std::vector<VertexId> mandatory;

  /// True when no curve exists.
  bool empty() const;
};

/// Γ(B) for B = B(center, r_k): curves joining B to the complement of 2B.
CurveFamily annulus_family(const FiniteMetricSpace& space, const NetHierarchy& hierarchy,
                           std::shared_ptr<const NerveGraph> nerve, PointId center, int k);

/// Γ_z: curves through z that leave B(z, s).
CurveFamily point_family(const FiniteMetricSpace& space, std::shared_ptr<const NerveGraph> nerve,
                         PointId z, double s);

struct CurveLength {
  double length = std::numeric_limits<double>::infinity();
  Path path;
};

/// Minimum vertex-weighted length over the family; every vertex on a path is
/// counted once, endpoints included. Among minimum-length paths the one with
/// fewest vertices and then the lexicographically smallest vertex sequence is
/// returned. Empty family gives +inf and no path.
CurveLength shortest_curve_length(const CurveFamily& family, const WeightFunction& rho);

/// Outcome of the linear connectivity probe.
struct LinearConnectivity {
  bool connected = true;
  double max_ratio = 0.0;
  std::pair<PointId, PointId> worst_pair{0, 0};
  std::size_t pairs_checked = 0;
};

/// For sampled pairs (x, y), finds a finest-nerve chain from a ball containing
/// x to one containing y that stays as close to x as possible, and reports
/// max over pairs of diam(chain) / d(x, y). Disconnection is reported with the
/// offending pair. All pairs are used when there are at most `max_pairs`.
LinearConnectivity estimate_linear_connectivity(const FiniteMetricSpace& space,
                                                const NerveGraph& finest, std::size_t max_pairs,
                                                std::uint64_t seed);

/// Connected components of the nerve with `removed` vertices deleted.
std::vector<std::vector<VertexId>> components(const NerveGraph& nerve, const std::vector<char>& removed);

/// Points covered by a set of vertices, sorted and unique.
std::vector<PointId> covered_points(const NerveGraph& nerve, std::span<const VertexId> vertices);

}  // namespace confdim
