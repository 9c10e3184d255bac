#pragma once

#include "plap/energy.hpp"
#include "plap/fem.hpp"
#include "plap/history.hpp"
#include "plap/relaxation.hpp"

#include <optional>
#include <vector>

namespace plap {

/// Iterate (u_n, sigma_n) of the relaxed Kacanov scheme. eps is the interval
/// the iterate was computed with; both energies are relative to it.
struct KacanovState {
  P1Function u;
  P0VectorField sigma;
  RelaxInterval eps;
  int iteration = 0;
  double dual_energy = 0.0;
  double primal_energy = 0.0;

  /// J_eps(u) + J*_eps(sigma). Only meaningful once sigma is feasible,
  /// i.e. after the first step.
  double gap() const { return primal_energy + dual_energy; }
};

/// sigma = 0, u = 0 with energies evaluated at eps.
KacanovState initial_state(const Mesh& mesh, const SourceTerm& f, const RelaxInterval& eps,
                           const Exponents& exps);

/// State built from a given pair, e.g. a Poisson initializer with
/// sigma = grad u.
KacanovState make_state(const Mesh& mesh, const SourceTerm& f, const RelaxInterval& eps, const Exponents& exps,
                        P1Function u, P0VectorField sigma, int iteration = 0);

/// Kacanov steps on one mesh with a cached weighted Poisson solver.
class KacanovSolver {
 public:
  KacanovSolver(const Mesh& mesh, const SourceTerm& f, const Exponents& exps);

  /// One step with interval eps: weights w_T = clamp(|sigma_T|)^(2-q), solve
  /// for u_{n+1}, set sigma_{n+1} = w_T grad u_{n+1}.
  KacanovState step(const KacanovState& state, const RelaxInterval& eps);

  const Mesh& mesh() const noexcept { return *mesh_; }
  const SourceTerm& source() const noexcept { return f_; }
  const Exponents& exponents() const noexcept { return exps_; }
  const Eigen::VectorXd& load() const noexcept { return load_; }

 private:
  const Mesh* mesh_;
  SourceTerm f_;
  Exponents exps_;
  Eigen::VectorXd load_;
  WeightedPoissonSolver poisson_;
};

/// One step at the state's own interval.
KacanovState kacanov_step(const Mesh& mesh, const KacanovState& state, const SourceTerm& f,
                          const Exponents& exps);

/// Galerkin solution of the Poisson problem (p = 2) and sigma = grad u.
KacanovState poisson_initializer(const Mesh& mesh, const SourceTerm& f, const RelaxInterval& eps,
                                 const Exponents& exps);

/// Interval schedule eps_n = ((n+1)^-alpha, (n+1)^beta).
struct ScheduleConfig {
  double alpha = 0.0;
  double beta = 0.0;
  int max_iterations = 0;
  /// Stop once the gap drops to this value; 0 disables the test.
  double gap_tolerance = 0.0;

  /// alpha = beta = (2-q)^-1 / 2.
  static ScheduleConfig balanced(const Exponents& exps, int max_iterations);
  /// Throws DomainError unless alpha, beta > 0 and alpha + beta <= 1/(2-q).
  void validate(const Exponents& exps) const;
  RelaxInterval interval(int n) const;
};

struct KacanovRun {
  std::vector<ConvergenceRecord> history;
  KacanovState final_state;
  bool converged = false;
};

/// History row of a Kacanov state; indicator columns NaN.
ConvergenceRecord make_record(const Mesh& mesh, const SourceTerm& f, const Exponents& exps,
                              const KacanovState& s, long long ndof_accumulated);

/// Step n uses eps_n; row n+1 therefore carries eps_n. Starts from sigma = 0.
KacanovRun run_fixed_schedule(const Mesh& mesh, const SourceTerm& f, const Exponents& exps,
                              const ScheduleConfig& sched, const RecordObserver& observer = {});

/// Iterates at a frozen interval until the gap is at most gap_tol or
/// max_iter steps were taken. Starts from sigma = 0 unless an initial state
/// is given. Not reaching the tolerance is reported through `converged`.
KacanovRun run_fixed_interval(const Mesh& mesh, const SourceTerm& f, const Exponents& exps,
                              const RelaxInterval& eps, double gap_tol, int max_iter,
                              const std::optional<KacanovState>& initial = std::nullopt,
                              const RecordObserver& observer = {});

}  // namespace plap
