#include "plap/adaptive.hpp"
#include "plap/indicators.hpp"
#include "plap/kacanov.hpp"
#include "plap/steepest_descent.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace plap;

namespace {

Mesh lshape(int triangles) { return refine_uniform(make_lshape_mesh(), triangles); }

void BM_KappaStar(benchmark::State& state) {
  const Exponents exps(10.0);
  const RelaxInterval eps(1e-3, 1e3);
  double t = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kappa_star(t, eps, exps));
    t = t * 1.37 > 1e4 ? 1e-4 : t * 1.37;
  }
}
BENCHMARK(BM_KappaStar);

void BM_ShiftedConjugate(benchmark::State& state) {
  const Exponents exps(10.0);
  const RelaxInterval eps(1e-3, 1e3);
  double s = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(shifted_conjugate(0.7, s, eps, exps));
    s = s * 1.37 > 1e3 ? 1e-3 : s * 1.37;
  }
}
BENCHMARK(BM_ShiftedConjugate);

void BM_AssembleStiffness(benchmark::State& state) {
  const Mesh m = lshape(static_cast<int>(state.range(0)));
  const std::vector<double> w(m.n_triangles(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_weighted_stiffness(m, w));
  state.SetItemsProcessed(state.iterations() * m.n_triangles());
}
BENCHMARK(BM_AssembleStiffness)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_SolvePoisson(benchmark::State& state) {
  const Mesh m = lshape(static_cast<int>(state.range(0)));
  const SourceTerm f = SourceTerm::constant(m, 2.0);
  const SpdSystem sys = make_system(m, std::vector<double>(m.n_triangles(), 1.0), f);
  for (auto _ : state) benchmark::DoNotOptimize(solve_spd(m, sys));
  state.counters["ndof"] = m.n_free();
}
BENCHMARK(BM_SolvePoisson)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_KacanovStep(benchmark::State& state) {
  const Mesh m = lshape(static_cast<int>(state.range(0)));
  const SourceTerm f = SourceTerm::constant(m, 2.0);
  const Exponents exps(10.0);
  const RelaxInterval eps(1e-3, 1e3);
  KacanovSolver solver(m, f, exps);
  const KacanovState s0 = solver.step(initial_state(m, f, eps, exps), eps);
  for (auto _ : state) benchmark::DoNotOptimize(solver.step(s0, eps));
  state.counters["ndof"] = m.n_free();
}
BENCHMARK(BM_KacanovStep)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Indicators(benchmark::State& state) {
  const Mesh m = lshape(static_cast<int>(state.range(0)));
  const SourceTerm f = SourceTerm::constant(m, 2.0);
  const Exponents exps(10.0);
  const RelaxInterval eps(1e-3, 1e3);
  const KacanovState s = kacanov_step(m, initial_state(m, f, eps, exps), f, exps);
  for (auto _ : state) benchmark::DoNotOptimize(compute_indicators(m, s, f, exps, 1e-3));
}
BENCHMARK(BM_Indicators)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_RefineDorfler(benchmark::State& state) {
  const Mesh m = lshape(static_cast<int>(state.range(0)));
  std::vector<double> eta(m.n_triangles());
  for (int t = 0; t < m.n_triangles(); ++t) eta[t] = 1.0 / (1.0 + t % 97);
  for (auto _ : state) benchmark::DoNotOptimize(bisect(m, doerfler_mark(eta, 0.5)));
}
BENCHMARK(BM_RefineDorfler)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DescentIteration(benchmark::State& state) {
  const Mesh m = lshape(static_cast<int>(state.range(0)));
  const SourceTerm f = SourceTerm::constant(m, 2.0);
  const Exponents exps(5.0);
  const P1Function u = solve_spd(m, make_system(m, std::vector<double>(m.n_triangles(), 1.0), f));
  for (auto _ : state) {
    const P1Function d = descent_direction(m, u, f, exps, 1e-6);
    benchmark::DoNotOptimize(line_search(m, u, d, f, exps));
  }
}
BENCHMARK(BM_DescentIteration)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
