#pragma once

#include <span>
#include <vector>

#include "confdim/nerve.hpp"

namespace confdim {

struct VertexCutResult {
  /// No finite cut exists: some source-sink path uses only uncuttable vertices.
  bool infinite = false;
  int size = 0;
  /// The minimum cut closest to the sources, sorted.
  std::vector<VertexId> cut;
};

/// Minimum vertex cut between two vertex sets by unit-capacity max-flow on the
/// node-split graph. Vertices with cuttable[v] == 0 have infinite capacity;
/// vertices with active[v] == 0 (when given) are ignored entirely. Source and
/// sink vertices are themselves cuttable.
VertexCutResult min_vertex_cut(const NerveGraph& graph, std::span<const VertexId> sources,
                               std::span<const VertexId> sinks, const std::vector<char>& cuttable,
                               const std::vector<char>* active = nullptr);

/// True when, after deleting `removed`, no remaining source reaches a
/// remaining sink. Plain breadth-first search, independent of the flow code.
bool separates(const NerveGraph& graph, std::span<const VertexId> sources,
               std::span<const VertexId> sinks, const std::vector<char>& removed);

}  // namespace confdim
