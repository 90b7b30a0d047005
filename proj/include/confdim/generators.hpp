#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "confdim/space.hpp"

namespace confdim {

/// Contracting similitude p -> ratio * R(rotation) * p + offset in the plane.
struct SimilarityMap {
  double ratio = 0.5;
  double rotation = 0.0;
  std::array<double, 2> offset{0.0, 0.0};
};

enum class GeneratorKind {
  kInterval,
  kCircle,
  kSquareGrid,
  kSierpinskiGasket,
  kSierpinskiCarpet,
  kSnowflakeInterval,
  kIfsCustom,
};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kCircle;
  /// Point count (interval, circle, snowflake), side length (grid), or IFS depth.
  int resolution = 1;
  double snowflake_exponent = 0.5;
  std::vector<SimilarityMap> maps;
  std::vector<std::array<double, 2>> seed_points;
};

inline constexpr std::size_t kMaxGeneratedPoints = 200000;

std::string to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& name);

/// {"kind": "...", "resolution": n, "parameters": {...}}
GeneratorSpec generator_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const GeneratorSpec& spec);

/// Throws SpaceError on an invalid spec or one that would exceed
/// kMaxGeneratedPoints.
void validate(const GeneratorSpec& spec);

/// Number of points the spec will emit, before deduplication for IFS kinds.
std::size_t predicted_size(const GeneratorSpec& spec);

FiniteMetricSpace generate(const GeneratorSpec& spec);

/// Closed forms for the deduplicated IFS vertex sets.
std::size_t gasket_vertex_count(int depth);
std::size_t carpet_vertex_count(int depth);

}  // namespace confdim
