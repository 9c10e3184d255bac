#pragma once

#include "plap/fem.hpp"
#include "plap/history.hpp"
#include "plap/relaxation.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace plap {

struct BaselineConfig {
  double delta = 1e-6;
  /// Relative width of the final step-size bracket.
  double line_search_tol = 1e-10;
  int max_iterations = 500;
  /// Stop once the energy is at most this value.
  std::optional<double> energy_target;

  void validate() const;
};

/// Solves sum_T (delta + |grad u|_T)^(p-2) int_T grad d . grad v
///   = -int |grad u|^(p-2) grad u . grad v + int f v
/// for d with zero Dirichlet values. Weights and right-hand side are scaled
/// by a common power of e, so (delta + t)^(p-2) may under- or overflow.
P1Function descent_direction(const Mesh& mesh, const P1Function& u, const SourceTerm& f, const Exponents& exps,
                             double delta);

/// Unrelaxed energy along u + alpha d, exact per element.
class LineEnergy {
 public:
  LineEnergy(const Mesh& mesh, const P1Function& u, const P1Function& d, const SourceTerm& f, const Exponents& exps);
  double value(double alpha) const;
  /// d/dalpha of value; nondecreasing since the energy is convex.
  double slope(double alpha) const;

 private:
  const Mesh* mesh_;
  P0VectorField gu_;
  P0VectorField gd_;
  double load_u_ = 0.0;
  double load_d_ = 0.0;
  double p_;
};

struct LineSearchResult {
  double alpha = 0.0;
  /// The energy does not decrease along d.
  bool no_descent = false;
};

/// Brackets the minimizer over alpha >= 0 by doubling, then bisects on the
/// sign of the directional derivative to relative width tol.
LineSearchResult line_search(const Mesh& mesh, const P1Function& u, const P1Function& d, const SourceTerm& f,
                             const Exponents& exps, double tol = 1e-10);

enum class DescentStop { budget, no_descent, stationary, energy_target, solver_failure };
std::string_view to_string(DescentStop s);

struct DescentRun {
  std::vector<ConvergenceRecord> history;
  P1Function u;
  DescentStop stop = DescentStop::budget;
};

/// Iterates from the Poisson solution. Row n holds J(u_n) in
/// primal_energy_unrelaxed; relaxed and dual columns are NaN.
DescentRun run_steepest_descent(const Mesh& mesh, const SourceTerm& f, const Exponents& exps,
                                const BaselineConfig& cfg, const RecordObserver& observer = {});

}  // namespace plap
