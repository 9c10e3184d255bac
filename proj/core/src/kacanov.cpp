#include "plap/kacanov.hpp"

#include "plap/error.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace plap {

KacanovState make_state(const Mesh& mesh, const SourceTerm& f, const RelaxInterval& eps, const Exponents& exps,
                        P1Function u, P0VectorField sigma, int iteration) {
  KacanovState s{std::move(u), std::move(sigma), eps, iteration, 0.0, 0.0};
  s.dual_energy = energy_dual(mesh, s.sigma, eps, exps);
  s.primal_energy = energy_primal(mesh, s.u, f, eps, exps);
  return s;
}

KacanovState initial_state(const Mesh& mesh, const SourceTerm& f, const RelaxInterval& eps,
                           const Exponents& exps) {
  return make_state(mesh, f, eps, exps, P1Function::zero(mesh), P0VectorField::zero(mesh));
}

KacanovSolver::KacanovSolver(const Mesh& mesh, const SourceTerm& f, const Exponents& exps)
    : mesh_(&mesh), f_(f), exps_(exps), load_(restrict_to_free(mesh, assemble_load(mesh, f))), poisson_(mesh) {}

KacanovState KacanovSolver::step(const KacanovState& state, const RelaxInterval& eps) {
  const Mesh& mesh = *mesh_;
  if (static_cast<int>(state.sigma.values.size()) != mesh.n_triangles()) {
    throw std::invalid_argument("Kacanov state does not live on the solver mesh");
  }
  const ClampBounds bounds = ClampBounds::from(eps);
  const double exponent = 2.0 - exps_.q();
  std::vector<double> weights(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    weights[t] = power(clamp_modulus(state.sigma.values[t].norm(), bounds), exponent);
  }
  P1Function u = poisson_.solve(weights, load_);
  P0VectorField sigma = gradient(mesh, u);
  for (int t = 0; t < mesh.n_triangles(); ++t) sigma.values[t] *= weights[t];
  return make_state(mesh, f_, eps, exps_, std::move(u), std::move(sigma), state.iteration + 1);
}

KacanovState kacanov_step(const Mesh& mesh, const KacanovState& state, const SourceTerm& f,
                          const Exponents& exps) {
  KacanovSolver solver(mesh, f, exps);
  return solver.step(state, state.eps);
}

KacanovState poisson_initializer(const Mesh& mesh, const SourceTerm& f, const RelaxInterval& eps,
                                 const Exponents& exps) {
  const std::vector<double> ones(mesh.n_triangles(), 1.0);
  P1Function u = solve_spd(mesh, make_system(mesh, ones, f));
  P0VectorField sigma = gradient(mesh, u);
  return make_state(mesh, f, eps, exps, std::move(u), std::move(sigma));
}

ScheduleConfig ScheduleConfig::balanced(const Exponents& exps, int max_iterations) {
  const double two_minus_q = 2.0 - exps.q();
  // At q = 2 every interval is exact; any positive pair is admissible.
  const double half = two_minus_q > 0.0 ? 0.5 / two_minus_q : 0.5;
  return {half, half, max_iterations, 0.0};
}

void ScheduleConfig::validate(const Exponents& exps) const {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("schedule exponents alpha and beta must be positive");
  const double two_minus_q = 2.0 - exps.q();
  if (two_minus_q > 0.0 && alpha + beta > (1.0 + 1e-12) / two_minus_q) {
    throw DomainError("schedule needs alpha + beta <= 1/(2-q) = " + std::to_string(1.0 / two_minus_q));
  }
  if (max_iterations < 0) throw DomainError("max_iterations must be >= 0");
  if (gap_tolerance < 0.0) throw DomainError("gap tolerance must be >= 0");
}

RelaxInterval ScheduleConfig::interval(int n) const {
  const double base = static_cast<double>(n) + 1.0;
  return RelaxInterval(std::pow(base, -alpha), std::pow(base, beta));
}

ConvergenceRecord make_record(const Mesh& mesh, const SourceTerm& f, const Exponents& exps,
                              const KacanovState& s, long long ndof_accumulated) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ConvergenceRecord r;
  r.iteration = s.iteration;
  r.ndof = mesh.n_free();
  r.ndof_accumulated = ndof_accumulated;
  r.eps_minus = s.eps.eps_minus();
  r.eps_plus = s.eps.eps_plus();
  r.primal_energy_relaxed = s.primal_energy;
  r.dual_energy_relaxed = s.dual_energy;
  r.primal_energy_unrelaxed = energy_primal(mesh, s.u, f, std::nullopt, exps);
  r.dual_energy_unrelaxed = energy_dual(mesh, s.sigma, std::nullopt, exps);
  r.gap = s.gap();
  r.eta_eps_plus_sq = nan;
  r.eta_eps_minus_sq = nan;
  r.eta_h_sq = nan;
  r.action = Action::kacanov;
  return r;
}

namespace {

class Recorder {
 public:
  Recorder(std::vector<ConvergenceRecord>& history, const RecordObserver& observer)
      : history_(history), observer_(observer), start_(std::chrono::steady_clock::now()) {}

  void add(ConvergenceRecord r) {
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    history_.push_back(r);
    if (observer_) observer_(history_.back());
  }

 private:
  std::vector<ConvergenceRecord>& history_;
  const RecordObserver& observer_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

KacanovRun run_fixed_schedule(const Mesh& mesh, const SourceTerm& f, const Exponents& exps,
                              const ScheduleConfig& sched, const RecordObserver& observer) {
  sched.validate(exps);
  KacanovRun run{{}, initial_state(mesh, f, sched.interval(0), exps), false};
  Recorder rec(run.history, observer);
  long long acc = mesh.n_free();
  rec.add(make_record(mesh, f, exps, run.final_state, acc));
  KacanovSolver solver(mesh, f, exps);
  for (int n = 0; n < sched.max_iterations; ++n) {
    run.final_state = solver.step(run.final_state, sched.interval(n));
    acc += mesh.n_free();
    rec.add(make_record(mesh, f, exps, run.final_state, acc));
    if (sched.gap_tolerance > 0.0 && run.final_state.gap() <= sched.gap_tolerance) {
      run.converged = true;
      break;
    }
  }
  return run;
}

KacanovRun run_fixed_interval(const Mesh& mesh, const SourceTerm& f, const Exponents& exps,
                              const RelaxInterval& eps, double gap_tol, int max_iter,
                              const std::optional<KacanovState>& initial, const RecordObserver& observer) {
  if (!(gap_tol > 0.0)) throw DomainError("gap tolerance must be positive");
  KacanovRun run{{}, initial ? *initial : initial_state(mesh, f, eps, exps), false};
  if (initial) run.final_state = make_state(mesh, f, eps, exps, initial->u, initial->sigma, initial->iteration);
  Recorder rec(run.history, observer);
  long long acc = mesh.n_free();
  rec.add(make_record(mesh, f, exps, run.final_state, acc));
  KacanovSolver solver(mesh, f, exps);
  for (int n = 0; n < max_iter; ++n) {
    run.final_state = solver.step(run.final_state, eps);
    acc += mesh.n_free();
    rec.add(make_record(mesh, f, exps, run.final_state, acc));
    if (run.final_state.gap() <= gap_tol) {
      run.converged = true;
      break;
    }
  }
  return run;
}

}  // namespace plap
