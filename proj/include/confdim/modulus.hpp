#pragma once

#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "confdim/nerve.hpp"

namespace confdim {

/// Sum of rho(A)^p over all vertices.
double vol_p(const WeightFunction& rho, double p);

struct Admissibility {
  bool admissible = true;
  double shortest_length = 0.0;
  /// Shortest path, reported when the check fails.
  Path witness;
};

/// rho is admissible iff every curve has rho-length >= 1 - tol.
Admissibility is_admissible(const CurveFamily& family, const WeightFunction& rho, double tol = 1e-9);

struct ModulusOptions {
  /// Relative duality gap at which the solve stops.
  double tol = 1e-4;
  int max_iterations = 100000;
};

struct ModulusResult {
  /// Vol_p of `weights`, an admissible weight; an upper bound on Mod_p.
  double value = 0.0;
  /// Dual objective at the final multipliers; a lower bound on Mod_p.
  double lower_bound = 0.0;
  WeightFunction weights;
  double p = 1.0;
  /// Generated curves whose length under `weights` is within tol of 1.
  std::vector<Path> active_curves;
  int iterations = 0;
  /// (value - lower_bound) / value at exit.
  double tolerance_achieved = 0.0;
  std::size_t generated_curves = 0;
};

class ModulusNonConvergence : public std::runtime_error {
 public:
  ModulusNonConvergence(const std::string& what, ModulusResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  /// Best iterate rescaled to be admissible; its value is an upper bound.
  const ModulusResult& best() const { return best_; }

 private:
  ModulusResult best_;
};

/// Mod_p of a curve family by constraint generation: solve the program
/// restricted to the curves found so far, query the shortest curve under the
/// current weights, add it when violated, and repeat until the duality gap
/// closes. p > 1 uses exact coordinate ascent on the Lagrangian dual; p = 1
/// uses a simplex solve of the restricted linear program. p < 1 is rejected.
ModulusResult compute_modulus(const CurveFamily& family, double p, const ModulusOptions& options = {});

struct MinCutModulus {
  /// No finite cut exists; cannot happen while every vertex is cuttable.
  bool infinite = false;
  int value = 0;
  std::vector<VertexId> cut;
};

/// The p = 1 modulus of a source-to-sink family as a minimum vertex cut.
MinCutModulus modulus_p1_mincut(const CurveFamily& family);

nlohmann::json to_json(const ModulusResult& result, bool include_weights);

}  // namespace confdim
