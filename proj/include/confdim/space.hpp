#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace confdim {

using PointId = std::size_t;

/// Tolerance used for every ball-membership and separation test. Balls are
/// closed: y is in B(x, r) iff d(x, y) <= r + kBallTol.
inline constexpr double kBallTol = 1e-9;

inline bool within(double d, double r) { return d <= r + kBallTol; }

class SpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A finite metric space, normalized so that its diameter is 1.
///
/// Geometry is either a Euclidean point cloud (coordinates are rescaled in
/// place) or an explicit symmetric distance matrix. Immutable once built.
class FiniteMetricSpace {
 public:
  static FiniteMetricSpace from_points(std::string label,
                                       const std::vector<std::vector<double>>& points);
  static FiniteMetricSpace from_matrix(std::string label,
                                       const std::vector<std::vector<double>>& matrix);

  std::size_t size() const { return size_; }
  const std::string& label() const { return label_; }

  double distance(PointId i, PointId j) const {
    if (dim_ > 0) {
      const double* a = &coords_[i * dim_];
      const double* b = &coords_[j * dim_];
      double s = 0.0;
      for (std::size_t c = 0; c < dim_; ++c) {
        const double t = a[c] - b[c];
        s += t * t;
      }
      return std::sqrt(s);
    }
    return matrix_[i * size_ + j];
  }

  bool has_coordinates() const { return dim_ > 0; }
  std::size_t dimension() const { return dim_; }
  std::span<const double> coordinates(PointId i) const {
    return {coords_.data() + i * dim_, dim_};
  }

  /// Factor the raw input distances were divided by.
  double normalization() const { return normalization_; }
  double min_positive_distance() const { return min_distance_; }

  /// Points y with d(x, y) <= r (closed ball, see kBallTol).
  std::vector<PointId> ball(PointId x, double r) const;

  /// Diameter of an arbitrary subset.
  double diameter(std::span<const PointId> subset) const;

  nlohmann::json to_json() const;

 private:
  FiniteMetricSpace() = default;
  void finalize();

  std::string label_;
  std::size_t size_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> matrix_;
  double normalization_ = 1.0;
  double min_distance_ = 0.0;
};

/// Checks the metric axioms. Every triple is checked when the space has at
/// most 500 points, otherwise 10*N triples drawn from `seed`.
void validate_metric(const FiniteMetricSpace& space, std::uint64_t seed = 0);

/// Parses the space JSON format: {"label", "points"} or {"label", "matrix"}.
FiniteMetricSpace space_from_json(const nlohmann::json& doc);
FiniteMetricSpace load_space(const std::filesystem::path& path);

/// Maximal a^-i separated nets X_0, ..., X_depth built greedily in ascending
/// point-id order.
struct NetHierarchy {
  double base = 2.0;
  std::vector<std::vector<PointId>> levels;
  int requested_depth = 0;
  bool truncated = false;
  std::string warning;

  int depth() const { return static_cast<int>(levels.size()) - 1; }
  double radius(int level) const;
};

NetHierarchy build_net_hierarchy(const FiniteMetricSpace& space, double a, int depth);

/// Verifies separation and covering of every level; throws SpaceError.
void check_hierarchy(const FiniteMetricSpace& space, const NetHierarchy& hierarchy);

/// The ball covering S_i of one level. Ball j is centered at centers[j].
struct Covering {
  int level = 0;
  double radius = 1.0;
  std::vector<PointId> centers;
  std::vector<std::vector<PointId>> balls;
};

Covering build_covering(const FiniteMetricSpace& space, const NetHierarchy& hierarchy,
                        int level);

/// Largest number of level-(i+1) centers lying in a level-i ball, over all
/// levels and centers. These centers are a greedy half-scale net of the ball,
/// so the count bounds the number of small balls needed to cover it.
int estimate_doubling_constant(const FiniteMetricSpace& space, const NetHierarchy& hierarchy);

}  // namespace confdim
