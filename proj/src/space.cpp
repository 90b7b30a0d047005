#include "confdim/space.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace confdim {

FiniteMetricSpace FiniteMetricSpace::from_points(std::string label,
                                                 const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw SpaceError("empty point set");
  FiniteMetricSpace s;
  s.label_ = std::move(label);
  s.size_ = points.size();
  s.dim_ = points.front().size();
  if (s.dim_ == 0) throw SpaceError("points must have at least one coordinate");
  s.coords_.reserve(s.size_ * s.dim_);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != s.dim_) {
      throw SpaceError("point " + std::to_string(i) + " has dimension " +
                       std::to_string(points[i].size()) + ", expected " + std::to_string(s.dim_));
    }
    for (double c : points[i]) {
      if (!std::isfinite(c)) throw SpaceError("non-finite coordinate at point " + std::to_string(i));
      s.coords_.push_back(c);
    }
  }
  s.finalize();
  return s;
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(std::string label,
                                                 const std::vector<std::vector<double>>& matrix) {
  if (matrix.empty()) throw SpaceError("empty point set");
  FiniteMetricSpace s;
  s.label_ = std::move(label);
  s.size_ = matrix.size();
  s.matrix_.reserve(s.size_ * s.size_);
  for (const auto& row : matrix) {
    if (row.size() != s.size_) throw SpaceError("distance matrix is not square");
    s.matrix_.insert(s.matrix_.end(), row.begin(), row.end());
  }
  for (std::size_t i = 0; i < s.size_; ++i) {
    for (std::size_t j = 0; j < s.size_; ++j) {
      const double d = s.matrix_[i * s.size_ + j];
      if (!std::isfinite(d)) throw SpaceError("non-finite distance");
      if (d != s.matrix_[j * s.size_ + i]) {
        throw SpaceError("distance matrix is not symmetric at (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
      }
    }
  }
  s.finalize();
  return s;
}

void FiniteMetricSpace::finalize() {
  double diam = 0.0;
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < size_; ++i) {
    if (dim_ == 0 && matrix_[i * size_ + i] != 0.0) {
      throw SpaceError("nonzero diagonal entry at " + std::to_string(i));
    }
    for (std::size_t j = i + 1; j < size_; ++j) {
      const double d = distance(i, j);
      if (!(d > 0.0)) {
        throw SpaceError("points " + std::to_string(i) + " and " + std::to_string(j) +
                         " are at distance " + std::to_string(d));
      }
      diam = std::max(diam, d);
      min_d = std::min(min_d, d);
    }
  }
  if (size_ == 1) {
    normalization_ = 1.0;
    min_distance_ = std::numeric_limits<double>::infinity();
    return;
  }
  normalization_ = diam;
  auto& store = dim_ > 0 ? coords_ : matrix_;
  for (double& v : store) v /= diam;
  min_distance_ = min_d / diam;
}

std::vector<PointId> FiniteMetricSpace::ball(PointId x, double r) const {
  std::vector<PointId> out;
  for (PointId y = 0; y < size_; ++y) {
    if (within(distance(x, y), r)) out.push_back(y);
  }
  return out;
}

double FiniteMetricSpace::diameter(std::span<const PointId> subset) const {
  if (dim_ == 2 && subset.size() > 64) {
    // Planar subsets: the diameter is attained on the convex hull.
    std::vector<std::pair<double, double>> pts;
    pts.reserve(subset.size());
    for (PointId i : subset) pts.emplace_back(coords_[2 * i], coords_[2 * i + 1]);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto cross = [](const auto& o, const auto& a, const auto& b) {
      return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
      hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
      while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
      hull[k++] = pts[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    double d2 = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      for (std::size_t j = i + 1; j < hull.size(); ++j) {
        const double dx = hull[i].first - hull[j].first;
        const double dy = hull[i].second - hull[j].second;
        d2 = std::max(d2, dx * dx + dy * dy);
      }
    }
    return std::sqrt(d2);
  }
  double d = 0.0;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (std::size_t j = i + 1; j < subset.size(); ++j) {
      d = std::max(d, distance(subset[i], subset[j]));
    }
  }
  return d;
}

nlohmann::json FiniteMetricSpace::to_json() const {
  nlohmann::json doc;
  doc["label"] = label_;
  if (dim_ > 0) {
    auto pts = nlohmann::json::array();
    for (std::size_t i = 0; i < size_; ++i) {
      pts.push_back(std::vector<double>(coords_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                                        coords_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_)));
    }
    doc["points"] = std::move(pts);
  } else {
    auto rows = nlohmann::json::array();
    for (std::size_t i = 0; i < size_; ++i) {
      rows.push_back(std::vector<double>(matrix_.begin() + static_cast<std::ptrdiff_t>(i * size_),
                                         matrix_.begin() + static_cast<std::ptrdiff_t>((i + 1) * size_)));
    }
    doc["matrix"] = std::move(rows);
  }
  return doc;
}

void validate_metric(const FiniteMetricSpace& space, std::uint64_t seed) {
  const std::size_t n = space.size();
  constexpr double kTriangleTol = 1e-9;
  auto check = [&](PointId i, PointId j, PointId k) {
    const double lhs = space.distance(i, k);
    const double rhs = space.distance(i, j) + space.distance(j, k);
    if (lhs > rhs + kTriangleTol) {
      std::ostringstream msg;
      msg << "triangle inequality violated: d(" << i << "," << k << ")=" << lhs << " > d(" << i
          << "," << j << ")+d(" << j << "," << k << ")=" << rhs;
      throw SpaceError(msg.str());
    }
  };
  if (n <= 500) {
    for (PointId i = 0; i < n; ++i)
      for (PointId j = 0; j < n; ++j)
        for (PointId k = i + 1; k < n; ++k) check(i, j, k);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<PointId> pick(0, n - 1);
    for (std::size_t t = 0; t < 10 * n; ++t) check(pick(rng), pick(rng), pick(rng));
  }
  if (n > 1) {
    double diam = 0.0;
    for (PointId i = 0; i < n; ++i)
      for (PointId j = i + 1; j < n; ++j) diam = std::max(diam, space.distance(i, j));
    if (std::abs(diam - 1.0) > 1e-12) {
      throw SpaceError("diameter is " + std::to_string(diam) + " after normalization");
    }
  }
}

FiniteMetricSpace space_from_json(const nlohmann::json& doc) {
  const std::string label = doc.value("label", std::string{});
  FiniteMetricSpace space = [&] {
    if (doc.contains("matrix")) {
      return FiniteMetricSpace::from_matrix(label, doc.at("matrix").get<std::vector<std::vector<double>>>());
    }
    if (doc.contains("points")) {
      return FiniteMetricSpace::from_points(label, doc.at("points").get<std::vector<std::vector<double>>>());
    }
    throw SpaceError("space JSON needs a \"points\" or \"matrix\" key");
  }();
  validate_metric(space);
  return space;
}

FiniteMetricSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpaceError("cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SpaceError(path.string() + ": " + e.what());
  }
  return space_from_json(doc);
}

double NetHierarchy::radius(int level) const { return std::pow(base, -level); }

NetHierarchy build_net_hierarchy(const FiniteMetricSpace& space, double a, int depth) {
  if (!(a > 1.0)) throw SpaceError("net base a must exceed 1");
  if (depth < 0) throw SpaceError("depth must be nonnegative");
  NetHierarchy h;
  h.base = a;
  h.requested_depth = depth;
  const std::size_t n = space.size();
  for (int i = 0; i <= depth; ++i) {
    const double r = h.radius(i);
    if (i > 0 && n > 1 && r < space.min_positive_distance() - kBallTol) {
      h.truncated = true;
      std::ostringstream msg;
      msg << "depth truncated to " << i - 1 << ": radius " << r
          << " is below the minimum pairwise distance " << space.min_positive_distance();
      h.warning = msg.str();
      break;
    }
    std::vector<PointId> centers;
    for (PointId y = 0; y < n; ++y) {
      const bool separated = std::all_of(centers.begin(), centers.end(), [&](PointId c) {
        return !within(space.distance(y, c), r);
      });
      if (separated) centers.push_back(y);
    }
    h.levels.push_back(std::move(centers));
  }
  check_hierarchy(space, h);
  return h;
}

void check_hierarchy(const FiniteMetricSpace& space, const NetHierarchy& hierarchy) {
  if (hierarchy.levels.empty() || hierarchy.levels.front().empty()) {
    throw SpaceError("hierarchy level 0 is empty");
  }
  for (int i = 0; i <= hierarchy.depth(); ++i) {
    const auto& centers = hierarchy.levels[static_cast<std::size_t>(i)];
    const double r = hierarchy.radius(i);
    if (i > 0 && centers.size() < hierarchy.levels[static_cast<std::size_t>(i - 1)].size()) {
      throw SpaceError("level " + std::to_string(i) + " has fewer centers than its parent");
    }
    for (std::size_t u = 0; u < centers.size(); ++u)
      for (std::size_t v = u + 1; v < centers.size(); ++v)
        if (within(space.distance(centers[u], centers[v]), r))
          throw SpaceError("level " + std::to_string(i) + " is not separated");
    for (PointId y = 0; y < space.size(); ++y) {
      const bool covered = std::any_of(centers.begin(), centers.end(), [&](PointId c) {
        return within(space.distance(y, c), r);
      });
      if (!covered) throw SpaceError("level " + std::to_string(i) + " does not cover point " +
                                     std::to_string(y));
    }
  }
}

Covering build_covering(const FiniteMetricSpace& space, const NetHierarchy& hierarchy, int level) {
  if (level < 0 || level > hierarchy.depth()) {
    throw SpaceError("covering level " + std::to_string(level) + " outside hierarchy depth " +
                     std::to_string(hierarchy.depth()));
  }
  Covering c;
  c.level = level;
  c.radius = hierarchy.radius(level);
  c.centers = hierarchy.levels[static_cast<std::size_t>(level)];
  c.balls.reserve(c.centers.size());
  for (PointId x : c.centers) c.balls.push_back(space.ball(x, c.radius));
  return c;
}

int estimate_doubling_constant(const FiniteMetricSpace& space, const NetHierarchy& hierarchy) {
  if (space.size() == 1) return 1;
  int best = 1;
  for (int i = 0; i < hierarchy.depth(); ++i) {
    const double r = hierarchy.radius(i);
    const auto& fine = hierarchy.levels[static_cast<std::size_t>(i + 1)];
    for (PointId x : hierarchy.levels[static_cast<std::size_t>(i)]) {
      const auto count = std::count_if(fine.begin(), fine.end(), [&](PointId c) {
        return within(space.distance(x, c), r);
      });
      best = std::max(best, static_cast<int>(count));
    }
  }
  return best;
}

}  // namespace confdim
