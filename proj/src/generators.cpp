#include "confdim/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace confdim {

namespace {

using Point2 = std::array<double, 2>;

constexpr double kDedupTol = 1e-9;

const std::map<std::string, GeneratorKind>& kind_names() {
  static const std::map<std::string, GeneratorKind> names{
      {"interval", GeneratorKind::kInterval},
      {"circle", GeneratorKind::kCircle},
      {"square_grid", GeneratorKind::kSquareGrid},
      {"sierpinski_gasket", GeneratorKind::kSierpinskiGasket},
      {"sierpinski_carpet", GeneratorKind::kSierpinskiCarpet},
      {"snowflake_interval", GeneratorKind::kSnowflakeInterval},
      {"ifs_custom", GeneratorKind::kIfsCustom},
  };
  return names;
}

Point2 apply(const SimilarityMap& f, const Point2& p) {
  const double c = std::cos(f.rotation);
  const double s = std::sin(f.rotation);
  return {f.ratio * (c * p[0] - s * p[1]) + f.offset[0],
          f.ratio * (s * p[0] + c * p[1]) + f.offset[1]};
}

// Deduplicates on a grid of cell size kDedupTol, checking neighboring cells.
std::vector<Point2> dedup(const std::vector<Point2>& pts) {
  std::map<std::pair<long long, long long>, std::vector<std::size_t>> cells;
  std::vector<Point2> out;
  for (const auto& p : pts) {
    const long long cx = std::llround(p[0] / kDedupTol);
    const long long cy = std::llround(p[1] / kDedupTol);
    bool dup = false;
    for (long long dx = -1; dx <= 1 && !dup; ++dx) {
      for (long long dy = -1; dy <= 1 && !dup; ++dy) {
        auto it = cells.find({cx + dx, cy + dy});
        if (it == cells.end()) continue;
        for (std::size_t idx : it->second) {
          if (std::hypot(out[idx][0] - p[0], out[idx][1] - p[1]) <= kDedupTol) {
            dup = true;
            break;
          }
        }
      }
    }
    if (!dup) {
      cells[{cx, cy}].push_back(out.size());
      out.push_back(p);
    }
  }
  return out;
}

// Images of the seeds under every composition f_{i1} o ... o f_{ik}, emitted
// in lexicographic order of the map word.
std::vector<Point2> ifs_vertices(const std::vector<SimilarityMap>& maps,
                                 const std::vector<Point2>& seeds, int depth) {
  std::vector<Point2> current = seeds;
  for (int level = 0; level < depth; ++level) {
    std::vector<Point2> next;
    next.reserve(current.size() * maps.size());
    for (const auto& f : maps)
      for (const auto& p : current) next.push_back(apply(f, p));
    current = dedup(next);
  }
  return dedup(current);
}

std::vector<SimilarityMap> gasket_maps() {
  const double h = std::sqrt(3.0) / 2.0;
  return {{0.5, 0.0, {0.0, 0.0}}, {0.5, 0.0, {0.5, 0.0}}, {0.5, 0.0, {0.25, h / 2.0}}};
}

std::vector<Point2> gasket_corners() { return {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}; }

std::vector<SimilarityMap> carpet_maps() {
  std::vector<SimilarityMap> maps;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i)
      if (i != 1 || j != 1) maps.push_back({1.0 / 3.0, 0.0, {i / 3.0, j / 3.0}});
  return maps;
}

std::vector<Point2> square_corners() { return {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}; }

std::vector<std::vector<double>> to_rows(const std::vector<Point2>& pts) {
  std::vector<std::vector<double>> rows;
  rows.reserve(pts.size());
  for (const auto& p : pts) rows.push_back({p[0], p[1]});
  return rows;
}

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > kMaxGeneratedPoints * 64) return r;
    r *= base;
  }
  return r;
}

}  // namespace

std::string to_string(GeneratorKind kind) {
  for (const auto& [name, k] : kind_names())
    if (k == kind) return name;
  return "unknown";
}

GeneratorKind generator_kind_from_string(const std::string& name) {
  auto it = kind_names().find(name);
  if (it == kind_names().end()) throw SpaceError("unknown generator kind '" + name + "'");
  return it->second;
}

GeneratorSpec generator_spec_from_json(const nlohmann::json& doc) {
  GeneratorSpec spec;
  spec.kind = generator_kind_from_string(doc.at("kind").get<std::string>());
  spec.resolution = doc.at("resolution").get<int>();
  const auto params = doc.value("parameters", nlohmann::json::object());
  spec.snowflake_exponent = params.value("exponent", 0.5);
  if (params.contains("maps")) {
    for (const auto& m : params.at("maps")) {
      SimilarityMap f;
      f.ratio = m.at("ratio").get<double>();
      f.rotation = m.value("rotation", 0.0);
      f.offset = m.value("offset", std::array<double, 2>{0.0, 0.0});
      spec.maps.push_back(f);
    }
  }
  if (params.contains("seed_points")) {
    spec.seed_points = params.at("seed_points").get<std::vector<std::array<double, 2>>>();
  }
  validate(spec);
  return spec;
}

nlohmann::json to_json(const GeneratorSpec& spec) {
  nlohmann::json doc{{"kind", to_string(spec.kind)}, {"resolution", spec.resolution}};
  nlohmann::json params = nlohmann::json::object();
  if (spec.kind == GeneratorKind::kSnowflakeInterval) params["exponent"] = spec.snowflake_exponent;
  if (spec.kind == GeneratorKind::kIfsCustom) {
    auto maps = nlohmann::json::array();
    for (const auto& f : spec.maps)
      maps.push_back({{"ratio", f.ratio}, {"rotation", f.rotation}, {"offset", f.offset}});
    params["maps"] = maps;
    params["seed_points"] = spec.seed_points;
  }
  doc["parameters"] = params;
  return doc;
}

std::size_t predicted_size(const GeneratorSpec& spec) {
  const auto n = static_cast<std::size_t>(std::max(spec.resolution, 0));
  switch (spec.kind) {
    case GeneratorKind::kInterval:
    case GeneratorKind::kCircle:
    case GeneratorKind::kSnowflakeInterval:
      return n;
    case GeneratorKind::kSquareGrid:
      return n * n;
    case GeneratorKind::kSierpinskiGasket:
      return gasket_vertex_count(spec.resolution);
    case GeneratorKind::kSierpinskiCarpet:
      return carpet_vertex_count(spec.resolution);
    case GeneratorKind::kIfsCustom:
      return std::max<std::size_t>(spec.seed_points.size(), 1) * ipow(spec.maps.size(), spec.resolution);
  }
  return n;
}

void validate(const GeneratorSpec& spec) {
  if (spec.resolution < 1) throw SpaceError("generator resolution must be >= 1");
  if (spec.kind == GeneratorKind::kSnowflakeInterval &&
      !(spec.snowflake_exponent > 0.0 && spec.snowflake_exponent < 1.0)) {
    throw SpaceError("snowflake exponent must lie in (0, 1)");
  }
  if (spec.kind == GeneratorKind::kIfsCustom) {
    if (spec.maps.empty()) throw SpaceError("ifs_custom needs at least one map");
    for (const auto& f : spec.maps)
      if (!(f.ratio > 0.0 && f.ratio < 1.0)) throw SpaceError("IFS contraction ratio must lie in (0, 1)");
  }
  if (spec.kind == GeneratorKind::kSierpinskiGasket || spec.kind == GeneratorKind::kSierpinskiCarpet) {
    if (spec.resolution > 12) throw SpaceError("fractal depth too large");
  }
  const std::size_t n = predicted_size(spec);
  if (n > kMaxGeneratedPoints) {
    std::ostringstream msg;
    msg << to_string(spec.kind) << " at resolution " << spec.resolution << " would emit " << n
        << " points (limit " << kMaxGeneratedPoints << ")";
    throw SpaceError(msg.str());
  }
}

std::size_t gasket_vertex_count(int depth) { return 3 * (ipow(3, depth) + 1) / 2; }

std::size_t carpet_vertex_count(int depth) {
  return (44 * ipow(8, depth) + 56 * ipow(3, depth) + 40) / 35;
}

FiniteMetricSpace generate(const GeneratorSpec& spec) {
  validate(spec);
  const int n = spec.resolution;
  const std::string label = to_string(spec.kind) + "-" + std::to_string(n);
  switch (spec.kind) {
    case GeneratorKind::kInterval: {
      std::vector<std::vector<double>> pts;
      for (int j = 0; j < n; ++j) pts.push_back({n == 1 ? 0.0 : static_cast<double>(j) / (n - 1)});
      return FiniteMetricSpace::from_points(label, pts);
    }
    case GeneratorKind::kCircle: {
      std::vector<std::vector<double>> pts;
      for (int j = 0; j < n; ++j) {
        const double t = 2.0 * std::numbers::pi * j / n;
        pts.push_back({std::cos(t), std::sin(t)});
      }
      return FiniteMetricSpace::from_points(label, pts);
    }
    case GeneratorKind::kSquareGrid: {
      std::vector<std::vector<double>> pts;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) pts.push_back({static_cast<double>(i), static_cast<double>(j)});
      return FiniteMetricSpace::from_points(label, pts);
    }
    case GeneratorKind::kSierpinskiGasket:
      return FiniteMetricSpace::from_points(label, to_rows(ifs_vertices(gasket_maps(), gasket_corners(), n)));
    case GeneratorKind::kSierpinskiCarpet:
      return FiniteMetricSpace::from_points(label, to_rows(ifs_vertices(carpet_maps(), square_corners(), n)));
    case GeneratorKind::kSnowflakeInterval: {
      std::vector<std::vector<double>> m(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double s = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
          const double t = n == 1 ? 0.0 : static_cast<double>(j) / (n - 1);
          m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::pow(std::abs(s - t), spec.snowflake_exponent);
        }
      return FiniteMetricSpace::from_matrix(label, m);
    }
    case GeneratorKind::kIfsCustom: {
      auto seeds = spec.seed_points;
      if (seeds.empty()) seeds.push_back({0.0, 0.0});
      return FiniteMetricSpace::from_points(label, to_rows(ifs_vertices(spec.maps, seeds, n)));
    }
  }
  throw SpaceError("unhandled generator kind");
}

}  // namespace confdim
