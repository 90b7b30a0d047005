#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace confdim {

struct RunConfig {
  std::string subcommand;
  /// Space JSON file.
  std::string space_path;
  /// Generator spec: a JSON file path or an inline JSON object.
  std::string generate;
  double a = 2.0;
  int depth = 8;
  std::string p_grid_text = "1.0:0.1:2.0";
  int n_max = 3;
  int balls_per_scale = 0;
  int c_max = 2;
  std::vector<int> m{2, 4, 8};
  double p = 2.0;
  double tol = 1e-4;
  std::string out;
  std::uint64_t seed = 0;
  int workers = 1;
  std::optional<std::size_t> center;
  int k = 1;
  std::optional<int> n;
  std::vector<int> budgets{2, 4, 8, 16, 32};
};

/// Exit statuses of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerdictFailure = 2;

/// Parses "lo:step:hi" into lo, lo + step, ..., hi (inclusive up to rounding).
std::vector<double> parse_p_grid(const std::string& text);

/// Parses argv; throws std::invalid_argument with the parser message on bad
/// input. `--help` is reported through the returned flag.
RunConfig parse_args(int argc, const char* const* argv, bool* help_requested = nullptr, std::string* help_text = nullptr);

/// Config echo embedded in every artifact.
nlohmann::json config_echo(const RunConfig& config);

/// Runs one subcommand, writing the artifact to config.out (or `out` when
/// empty). Errors are reported on `err` and give kExitError.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace confdim
