#pragma once

#include "plap/history.hpp"
#include "plap/indicators.hpp"
#include "plap/kacanov.hpp"

#include <memory>
#include <span>
#include <vector>

namespace plap {

struct AdaptiveConfig {
  double rho = 1e-3;
  double doerfler_theta = 0.3;
  double eps_plus_factor = 1.25;
  double eps_minus_factor = 0.8;
  /// Stop once the sum of the four squared indicators is at most this.
  double stop_tolerance = 1e-10;
  int max_rounds = 1000;
  /// Off: the mesh is frozen and eta_h is neither computed nor compared.
  bool refine_mesh = true;
  /// Stop once the accumulated degrees of freedom reach this; 0 disables.
  long long max_ndof_accumulated = 0;
  /// Stop once the mesh has at least this many vertices; 0 disables.
  int max_vertices = 0;
  double initial_eps_minus = 1.0;
  double initial_eps_plus = 1.0;

  /// Throws DomainError on an invalid setting.
  void validate() const;
};

/// Smallest greedy set (descending values, ties by lower index) whose sum
/// is at least theta times the total. All-zero input gives the empty set.
std::vector<int> doerfler_mark(std::span<const double> per_element, double theta);

/// Injects a piecewise constant field into the children of a bisected mesh.
/// Throws TransferError unless new_mesh was refined directly from old_mesh
/// (or is old_mesh itself).
P0VectorField transfer_sigma(const Mesh& old_mesh, const Mesh& new_mesh, const P0VectorField& sigma);
SourceTerm transfer_source(const Mesh& old_mesh, const Mesh& new_mesh, const SourceTerm& f);

/// Nodal interpolation of a P1 function onto a bisected mesh; created
/// vertices take the mean of their edge endpoints.
P1Function prolongate(const Mesh& old_mesh, const Mesh& new_mesh, const P1Function& u);

/// Branch of the largest squared indicator; ties resolve in the order
/// eps_plus, eps_minus, refine, kacanov.
Action choose_action(const IndicatorReport& report, bool refine_allowed);

struct AdaptiveResult {
  std::vector<ConvergenceRecord> history;
  std::shared_ptr<const Mesh> mesh;
  SourceTerm f;
  KacanovState state;
  bool converged = false;
};

/// Starts from sigma = 0 and the configured initial interval. Every round is
/// one Kacanov step, the indicators and the chosen action; the row of a
/// round carries the indicators and the action taken after it.
AdaptiveResult adaptive_loop(const Mesh& mesh, const SourceTerm& f, const Exponents& exps,
                             const AdaptiveConfig& cfg, const RecordObserver& observer = {});

}  // namespace plap
