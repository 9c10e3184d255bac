#include "plap/error.hpp"
#include "plap/kacanov.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace plap;

namespace {

double load_scale(const Mesh& m, const SourceTerm& f) {
  return restrict_to_free(m, assemble_load(m, f)).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("first step from zero stress is a scaled Poisson solve") {
  const Mesh m = refine_uniform(make_unit_disk_mesh(8), 200);
  const SourceTerm f = SourceTerm::constant(m, 1.0);
  const Exponents exps(4.0);
  const RelaxInterval eps(0.3, 5.0);
  const KacanovState s1 = kacanov_step(m, initial_state(m, f, eps, exps), f, exps);
  const P1Function poisson = solve_spd(m, make_system(m, std::vector<double>(m.n_triangles(), 1.0), f));
  const double scale = std::pow(0.3, exps.q() - 2.0);
  CHECK((s1.u.values - scale * poisson.values).norm() <= 1e-12 * s1.u.values.norm());
  CHECK(s1.iteration == 1);
  CHECK(s1.eps == eps);
}

TEST_CASE("p = 2 reaches the fixed point in one step") {
  const Mesh m = refine_uniform(make_lshape_mesh(), 300);
  const SourceTerm f = SourceTerm::constant(m, 2.0);
  const Exponents exps(2.0);
  const RelaxInterval eps(0.1, 10.0);
  const KacanovState s1 = kacanov_step(m, initial_state(m, f, eps, exps), f, exps);
  const KacanovState s2 = kacanov_step(m, s1, f, exps);
  CHECK((s2.u.values - s1.u.values).norm() <= 1e-13 * s1.u.values.norm());
  CHECK(std::abs(s1.gap()) <= 1e-12);
  const KacanovRun run = run_fixed_interval(m, f, exps, eps, 1e-10, 50);
  CHECK(run.converged);
  CHECK(run.history.size() == 2);
  const KacanovRun sched = run_fixed_schedule(m, f, exps, {0.5, 0.5, 5, 0.0});
  CHECK(std::abs(sched.history[1].gap) <= 1e-12);
}

TEST_CASE("dual energy decreases on the disk at p = 10") {
  const Mesh m = refine_uniform(make_unit_disk_mesh(8), 500);
  const SourceTerm f = SourceTerm::constant(m, 1.0);
  const Exponents exps(10.0);
  const RelaxInterval eps(0.5, 2.0);
  KacanovSolver solver(m, f, exps);
  KacanovState s = solver.step(initial_state(m, f, eps, exps), eps);
  const double load = load_scale(m, f);
  for (int n = 0; n < 30; ++n) {
    const KacanovState next = solver.step(s, eps);
    CHECK(next.dual_energy <= s.dual_energy + 10.0 * kSolverRtol * std::abs(s.dual_energy));
    CHECK(next.gap() >= -1e-10 * std::abs(next.dual_energy));
    CHECK(divergence_residual(m, next.sigma, f) <= 1e-9 * load);
    s = next;
  }
}

TEST_CASE("fixed interval on the L-shape closes the gap") {
  const Mesh m = refine_uniform(make_lshape_mesh(), 1500);
  const SourceTerm f = SourceTerm::constant(m, 2.0);
  const Exponents exps(5.0);
  const RelaxInterval eps(1e-6, 1e6);
  const KacanovRun run = run_fixed_interval(m, f, exps, eps, 1e-7, 500);
  CHECK(run.converged);
  CHECK(run.final_state.gap() <= 1e-7);
  CHECK(run.history.back().gap <= 1e-7);
  CHECK(run.history.size() == static_cast<std::size_t>(run.final_state.iteration + 1));
  // Contraction over the tail.
  const std::size_t n = run.history.size();
  REQUIRE(n >= 6);
  for (std::size_t k = n - 4; k < n; ++k) CHECK(run.history[k].gap < run.history[k - 1].gap);
  for (std::size_t k = 2; k < n; ++k) {
    CHECK(run.history[k].dual_energy_relaxed <=
          run.history[k - 1].dual_energy_relaxed + 10.0 * kSolverRtol * std::abs(run.history[k - 1].dual_energy_relaxed));
  }
}

TEST_CASE("budget exhaustion is reported, not thrown") {
  const Mesh m = refine_uniform(make_lshape_mesh(), 200);
  const SourceTerm f = SourceTerm::constant(m, 2.0);
  const Exponents exps(10.0);
  const KacanovRun run = run_fixed_interval(m, f, exps, RelaxInterval(1e-6, 1e6), 1e-14, 3);
  CHECK(!run.converged);
  CHECK(run.history.size() == 4);
  CHECK_THROWS_AS(run_fixed_interval(m, f, exps, RelaxInterval(1e-6, 1e6), 0.0, 3), DomainError);
}

TEST_CASE("schedule intervals follow the power law") {
  const Exponents exps(10.0);
  const ScheduleConfig sched = ScheduleConfig::balanced(exps, 8);
  const double q = exps.q();
  CHECK(sched.alpha == doctest::Approx(0.5 / (2.0 - q)));
  CHECK(sched.beta == doctest::Approx(0.5 / (2.0 - q)));
  CHECK_NOTHROW(sched.validate(exps));
  for (int n = 0; n < 8; ++n) {
    const RelaxInterval e = sched.interval(n);
    CHECK(e.eps_minus() == std::pow(n + 1.0, -sched.alpha));
    CHECK(e.eps_plus() == std::pow(n + 1.0, sched.beta));
  }
  CHECK_THROWS_AS(ScheduleConfig({1.0, 1.0, 5, 0.0}).validate(exps), DomainError);
  CHECK_THROWS_AS(ScheduleConfig({0.0, 0.5, 5, 0.0}).validate(exps), DomainError);

  const Mesh m = refine_uniform(make_unit_disk_mesh(8), 300);
  const SourceTerm f = SourceTerm::constant(m, 1.0);
  const KacanovRun run = run_fixed_schedule(m, f, exps, sched);
  REQUIRE(run.history.size() == 9);
  for (int n = 0; n < 8; ++n) {
    CHECK(run.history[n + 1].eps_minus == sched.interval(n).eps_minus());
    CHECK(run.history[n + 1].eps_plus == sched.interval(n).eps_plus());
    CHECK(run.history[n + 1].iteration == n + 1);
  }
  CHECK(run.history[0].ndof_accumulated == m.n_free());
  CHECK(run.history.back().ndof_accumulated == 9LL * m.n_free());
}

TEST_CASE("zero iteration budget keeps only the initial row") {
  const Mesh m = make_lshape_mesh();
  const SourceTerm f = SourceTerm::constant(m, 1.0);
  const Exponents exps(3.0);
  const KacanovRun run = run_fixed_schedule(m, f, exps, ScheduleConfig::balanced(exps, 0));
  CHECK(run.history.size() == 1);
  CHECK(run.history[0].iteration == 0);
  CHECK(run.history[0].action == Action::kacanov);
}

TEST_CASE("schedule run on the disk lowers the primal energy") {
  const Mesh m = refine_uniform(make_unit_disk_mesh(8), 800);
  const SourceTerm f = SourceTerm::constant(m, 1.0);
  const Exponents exps(10.0);
  const KacanovRun run = run_fixed_schedule(m, f, exps, ScheduleConfig::balanced(exps, 60));
  // The unrelaxed primal energy of the iterates settles well below the first iterate.
  CHECK(run.history.back().primal_energy_unrelaxed < run.history[1].primal_energy_unrelaxed);
  for (std::size_t k = 1; k < run.history.size(); ++k) {
    CHECK(run.history[k].gap >= -1e-10 * std::abs(run.history[k].dual_energy_relaxed));
  }
}

TEST_CASE("step rejects a state from another mesh") {
  const Mesh a = make_lshape_mesh();
  const Mesh b = refine_uniform(a, 50);
  const Exponents exps(3.0);
  const SourceTerm fa = SourceTerm::constant(a, 1.0);
  const SourceTerm fb = SourceTerm::constant(b, 1.0);
  KacanovSolver solver(b, fb, exps);
  CHECK_THROWS(solver.step(initial_state(a, fa, RelaxInterval(0.5, 2.0), exps), RelaxInterval(0.5, 2.0)));
}

TEST_CASE("Poisson initializer") {
  const Mesh m = refine_uniform(make_lshape_mesh(), 200);
  const SourceTerm f = SourceTerm::constant(m, 2.0);
  const Exponents exps(5.0);
  const KacanovState s = poisson_initializer(m, f, RelaxInterval(1e-6, 1e6), exps);
  CHECK(s.iteration == 0);
  CHECK(divergence_residual(m, s.sigma, f) <= 1e-12 * load_scale(m, f));
  const P0VectorField g = gradient(m, s.u);
  for (int t = 0; t < m.n_triangles(); ++t) CHECK((g.values[t] - s.sigma.values[t]).norm() == 0.0);
}
