#include "plap/steepest_descent.hpp"

#include "plap/energy.hpp"
#include "plap/error.hpp"
#include "plap/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace plap {

void BaselineConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(line_search_tol > 0.0)) throw DomainError("line_search_tol must be positive");
  if (max_iterations < 0) throw DomainError("max_iterations must be >= 0");
}

P1Function descent_direction(const Mesh& mesh, const P1Function& u, const SourceTerm& f, const Exponents& exps,
                             double delta) {
  const P0VectorField g = gradient(mesh, u);
  const int nt = mesh.n_triangles();
  const double e = exps.p() - 2.0;
  std::vector<double> log_w(nt);
  std::vector<double> log_r(nt);
  double shift = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < nt; ++t) {
    const double s = g.values[t].norm();
    log_w[t] = e * std::log(delta + s);
    log_r[t] = s > 0.0 ? e * std::log(s) : (e == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity());
    shift = std::max({shift, log_w[t], log_r[t]});
  }
  if (nt == 0) return P1Function::zero(mesh);
  // The load enters with factor 1 = exp(0).
  shift = std::max(shift, 0.0);
  std::vector<double> w(nt);
  for (int t = 0; t < nt; ++t) {
    w[t] = std::max(std::exp(log_w[t] - shift), std::numeric_limits<double>::min());
  }
  Eigen::VectorXd rhs = std::exp(-shift) * assemble_load(mesh, f);
  for (int t = 0; t < nt; ++t) {
    const ElementGeometry& geo = mesh.geometry(t);
    const Eigen::Vector2d flux = std::exp(log_r[t] - shift) * g.values[t];
    const auto& v = mesh.triangles()[t].v;
    for (int k = 0; k < 3; ++k) rhs[v[k]] -= geo.area * flux.dot(geo.grad[k]);
  }
  return solve_spd(mesh, {assemble_weighted_stiffness(mesh, w), restrict_to_free(mesh, rhs)});
}

LineEnergy::LineEnergy(const Mesh& mesh, const P1Function& u, const P1Function& d, const SourceTerm& f,
                       const Exponents& exps)
    : mesh_(&mesh), gu_(gradient(mesh, u)), gd_(gradient(mesh, d)), p_(exps.p()) {
  const Eigen::VectorXd b = assemble_load(mesh, f);
  load_u_ = b.dot(u.values);
  load_d_ = b.dot(d.values);
}

double LineEnergy::value(double alpha) const {
  const double s = parallel_sum(mesh_->n_triangles(), [&](int t) {
    const double r = (gu_.values[t] + alpha * gd_.values[t]).norm();
    return r > 0.0 ? mesh_->geometry(t).area * std::exp(p_ * std::log(r)) / p_ : 0.0;
  });
  return s - load_u_ - alpha * load_d_;
}

double LineEnergy::slope(double alpha) const {
  const double s = parallel_sum(mesh_->n_triangles(), [&](int t) {
    const Eigen::Vector2d v = gu_.values[t] + alpha * gd_.values[t];
    const double r = v.norm();
    if (r == 0.0) return 0.0;
    return mesh_->geometry(t).area * std::exp((p_ - 2.0) * std::log(r)) * v.dot(gd_.values[t]);
  });
  return s - load_d_;
}

LineSearchResult line_search(const Mesh& mesh, const P1Function& u, const P1Function& d, const SourceTerm& f,
                             const Exponents& exps, double tol) {
  if (!(tol > 0.0)) throw DomainError("line search tolerance must be positive");
  if (d.values.size() != mesh.n_vertices()) throw std::invalid_argument("P1Function size mismatch");
  if (d.values.cwiseAbs().maxCoeff() == 0.0) throw DomainError("line search along a zero direction");
  const LineEnergy line(mesh, u, d, f, exps);
  const double j0 = line.value(0.0);
  if (!(line.slope(0.0) < 0.0)) return {0.0, true};

  double lo = 0.0;
  double hi = 1.0;
  double j_hi = line.value(hi);
  if (j_hi < j0) {
    // Double until the energy stops decreasing.
    double mid = hi;
    double j_mid = j_hi;
    hi = 2.0 * mid;
    j_hi = line.value(hi);
    while (j_hi < j_mid && std::isfinite(hi)) {
      lo = mid;
      mid = hi;
      j_mid = j_hi;
      hi *= 2.0;
      j_hi = line.value(hi);
    }
    if (!std::isfinite(hi)) throw SolverError("line search found no upper bracket", 0.0);
  } else {
    // Halve until some step decreases the energy or the step no longer
    // changes u in double precision.
    const double d_max = d.values.cwiseAbs().maxCoeff();
    const double floor = 1e-17 * std::max(u.values.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    double a = hi;
    double j_a = j_hi;
    while (!(j_a < j0) && a * d_max > floor) {
      a *= 0.5;
      j_a = line.value(a);
    }
    if (!(j_a < j0)) return {0.0, true};
    hi = 2.0 * a;
  }

  // The minimizer lies in [lo, hi]; the slope is monotone there.
  while (hi - lo > tol * 0.5 * (hi + lo)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (line.slope(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  double alpha = 0.5 * (lo + hi);
  if (!(line.value(alpha) < j0)) {
    alpha = lo;
    if (!(alpha > 0.0 && line.value(alpha) < j0)) return {0.0, true};
  }
  return {alpha, false};
}

std::string_view to_string(DescentStop s) {
  switch (s) {
    case DescentStop::budget: return "budget";
    case DescentStop::no_descent: return "no_descent";
    case DescentStop::stationary: return "stationary";
    case DescentStop::energy_target: return "energy_target";
    case DescentStop::solver_failure: return "solver_failure";
  }
  return "unknown";
}

namespace {

ConvergenceRecord descent_record(const Mesh& mesh, int iteration, long long acc, double energy) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ConvergenceRecord r;
  r.iteration = iteration;
  r.ndof = mesh.n_free();
  r.ndof_accumulated = acc;
  r.eps_minus = nan;
  r.eps_plus = nan;
  r.primal_energy_relaxed = nan;
  r.dual_energy_relaxed = nan;
  r.primal_energy_unrelaxed = energy;
  r.dual_energy_unrelaxed = nan;
  r.gap = nan;
  r.eta_eps_plus_sq = nan;
  r.eta_eps_minus_sq = nan;
  r.eta_h_sq = nan;
  r.action = Action::descent;
  return r;
}

// Residual of the Euler-Lagrange equation relative to the load.
bool stationary(const Mesh& mesh, const P1Function& u, const SourceTerm& f, const Exponents& exps) {
  const P0VectorField g = gradient(mesh, u);
  P0VectorField flux = g;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double s = g.values[t].norm();
    flux.values[t] *= s > 0.0 ? std::exp((exps.p() - 2.0) * std::log(s)) : (exps.p() == 2.0 ? 1.0 : 0.0);
  }
  const double res = restrict_to_free(mesh, divergence_functional(mesh, flux, f)).norm();
  const double scale = restrict_to_free(mesh, assemble_load(mesh, f)).norm();
  return res <= 1e-11 * scale;
}

}  // namespace

DescentRun run_steepest_descent(const Mesh& mesh, const SourceTerm& f, const Exponents& exps,
                                const BaselineConfig& cfg, const RecordObserver& observer) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  DescentRun run;
  auto record = [&](ConvergenceRecord r) {
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    run.history.push_back(r);
    if (observer) observer(run.history.back());
  };
  const std::vector<double> ones(mesh.n_triangles(), 1.0);
  run.u = solve_spd(mesh, make_system(mesh, ones, f));
  long long acc = mesh.n_free();
  double energy = energy_primal(mesh, run.u, f, std::nullopt, exps);
  record(descent_record(mesh, 0, acc, energy));
  for (int n = 1; n <= cfg.max_iterations; ++n) {
    if (cfg.energy_target && energy <= *cfg.energy_target) {
      run.stop = DescentStop::energy_target;
      return run;
    }
    if (stationary(mesh, run.u, f, exps)) {
      run.stop = DescentStop::stationary;
      return run;
    }
    P1Function d;
    try {
      d = descent_direction(mesh, run.u, f, exps, cfg.delta);
    } catch (const SolverError&) {
      run.stop = DescentStop::solver_failure;
      return run;
    }
    if (d.values.cwiseAbs().maxCoeff() == 0.0) {
      run.stop = DescentStop::stationary;
      return run;
    }
    const LineSearchResult ls = line_search(mesh, run.u, d, f, exps, cfg.line_search_tol);
    if (ls.no_descent) {
      run.stop = DescentStop::no_descent;
      return run;
    }
    P1Function next{run.u.values + ls.alpha * d.values};
    const double next_energy = energy_primal(mesh, next, f, std::nullopt, exps);
    if (!(next_energy <= energy)) {
      run.stop = DescentStop::no_descent;
      return run;
    }
    run.u = std::move(next);
    energy = next_energy;
    acc += mesh.n_free();
    record(descent_record(mesh, n, acc, energy));
  }
  if (cfg.energy_target && energy <= *cfg.energy_target) run.stop = DescentStop::energy_target;
  else if (stationary(mesh, run.u, f, exps)) run.stop = DescentStop::stationary;
  return run;
}

}  // namespace plap
