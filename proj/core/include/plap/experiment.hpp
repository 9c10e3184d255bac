#pragma once

#include "plap/config.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace plap {

/// Initial mesh of the configured domain, uniformly refined to
/// mesh_resolution triangles.
Mesh initial_mesh(const RunConfig& cfg);

struct ExperimentOutput {
  std::vector<ConvergenceRecord> history;
  /// steepest_compare only.
  std::vector<ConvergenceRecord> baseline_history;
  std::optional<DescentStop> baseline_stop;
  std::shared_ptr<const Mesh> mesh;
  SourceTerm f;
  P1Function u;
  P0VectorField sigma;
  bool converged = false;
};

/// Runs the configured mode. Rows of the main history are also passed to
/// the observer as they are produced.
ExperimentOutput run_experiment(const RunConfig& cfg, const RecordObserver& observer = {});

/// Writes history.csv (plus history_steepest.csv for steepest_compare),
/// solution.vtk and manifest.txt into dir. Each file is written to a
/// temporary name and renamed into place.
void write_outputs(const RunConfig& cfg, const ExperimentOutput& out, const std::filesystem::path& dir);

/// run_experiment + write_outputs. On a solver failure the rows produced so
/// far are written to history.csv before the error is rethrown.
ExperimentOutput run_and_write(const RunConfig& cfg, const std::filesystem::path& dir);

void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Properties every run of the configured mode must satisfy.
std::vector<CheckResult> verify_experiment(const RunConfig& cfg, const ExperimentOutput& out);

}  // namespace plap
