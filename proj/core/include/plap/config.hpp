#pragma once

#include "plap/adaptive.hpp"
#include "plap/kacanov.hpp"
#include "plap/steepest_descent.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace plap {

enum class Domain { disk, lshape };
enum class Mode { schedule, fixed_interval, adaptive, steepest_compare };

std::string_view to_string(Domain d);
std::string_view to_string(Mode m);

/// Fully resolved run description. Fields unused by the selected mode keep
/// their defaults and are still echoed in the manifest.
struct RunConfig {
  Mode mode = Mode::adaptive;
  Domain domain = Domain::disk;
  double p = 10.0;
  double f = 1.0;
  /// Uniform refinement of the initial mesh until it has at least this many
  /// triangles.
  int mesh_resolution = 0;
  int disk_boundary_vertices = 8;
  std::string output_dir = "out";
  int threads = 1;
  unsigned long long seed = 0;
  /// Record elapsed seconds; off keeps history.csv reproducible byte for byte.
  bool wall_time = false;

  // schedule
  double alpha = 0.0;
  double beta = 0.0;
  // schedule, fixed_interval, steepest_compare
  int max_iterations = 500;
  double gap_tolerance = 1e-9;
  // fixed_interval, steepest_compare
  double eps_minus = 1e-4;
  double eps_plus = 1e4;

  AdaptiveConfig adaptive;

  // steepest_compare: adaptive mesh size, then both solvers on that mesh
  int target_vertices = 1000;
  BaselineConfig baseline;

  /// Throws ConfigError (line 0) on an inconsistent setting.
  void validate() const;
  ScheduleConfig schedule() const;
};

/// Flat text format: one `key = value` per line, `#` starts a comment, blank
/// lines are ignored. `mode` is required; unknown keys and duplicates are
/// errors. Throws ConfigError with the offending line number.
RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Every field as `key = value`, parseable by parse_config.
std::string serialize_config(const RunConfig& cfg);

}  // namespace plap
