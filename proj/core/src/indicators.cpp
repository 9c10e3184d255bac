#include "plap/indicators.hpp"

#include "plap/error.hpp"
#include "plap/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace plap {

namespace {

void check_sigma(const Mesh& mesh, const P0VectorField& sigma) {
  if (static_cast<int>(sigma.values.size()) != mesh.n_triangles()) {
    throw std::invalid_argument("P0VectorField size mismatch");
  }
}

// Both integrands agree except where the released clamp would have acted, so
// the difference is taken per element and cut at zero against rounding.
double released_difference(const Mesh& mesh, const P0VectorField& sigma, const RelaxInterval& eps,
                           const ClampBounds& released, const Exponents& exps) {
  check_sigma(mesh, sigma);
  const ClampBounds full = ClampBounds::from(eps);
  return parallel_sum(mesh.n_triangles(), [&](int t) {
    const double s = sigma.values[t].norm();
    const double d = kappa_star(s, full, exps) - kappa_star(s, released, exps);
    return mesh.geometry(t).area * std::max(0.0, d);
  });
}

}  // namespace

double indicator_eps_plus(const Mesh& mesh, const P0VectorField& sigma, const RelaxInterval& eps,
                          const Exponents& exps) {
  return released_difference(mesh, sigma, eps, ClampBounds::upper_released(eps), exps);
}

double indicator_eps_minus(const Mesh& mesh, const P0VectorField& sigma, const RelaxInterval& eps,
                           const Exponents& exps) {
  return released_difference(mesh, sigma, eps, ClampBounds::lower_released(eps), exps);
}

double indicator_kacanov(const Mesh& mesh, const P1Function& u, const P0VectorField& sigma, const SourceTerm& f,
                         const RelaxInterval& eps, const Exponents& exps) {
  return energy_primal(mesh, u, f, eps, exps) + energy_dual(mesh, sigma, eps, exps);
}

DiscretizationIndicator indicator_discretization(const Mesh& mesh, const P1Function& u, const SourceTerm& f,
                                                 const RelaxInterval& eps, const Exponents& exps, double rho) {
  if (static_cast<int>(f.values.size()) != mesh.n_triangles()) {
    throw std::invalid_argument("SourceTerm size mismatch");
  }
  const P0VectorField grad = gradient(mesh, u);
  const int nt = mesh.n_triangles();
  std::vector<Eigen::Vector2d> v(nt);
  DiscretizationIndicator out;
  out.per_element.resize(nt);
  parallel_for(nt, [&](int t) {
    v[t] = v_primal(grad.values[t], eps, exps);
    const ElementGeometry& g = mesh.geometry(t);
    out.per_element[t] = g.area * shifted_conjugate(grad.values[t].norm(), g.diameter * std::abs(f.values[t]), eps, exps);
  });
  for (const Edge& e : mesh.edges()) {
    if (e.on_boundary()) continue;
    const double h = (mesh.point(e.v[0]) - mesh.point(e.v[1])).norm();
    const double jump = h * h * (v[e.t[0]] - v[e.t[1]]).squaredNorm();
    out.per_element[e.t[0]] += jump;
    out.per_element[e.t[1]] += jump;
  }
  double sum = 0.0;
  for (double x : out.per_element) sum += x;
  out.total = rho * sum;
  return out;
}

IndicatorReport compute_indicators(const Mesh& mesh, const KacanovState& state, const SourceTerm& f,
                                   const Exponents& exps, double rho, bool with_mesh) {
  IndicatorReport r;
  r.rho = rho;
  r.eta_eps_plus_sq = indicator_eps_plus(mesh, state.sigma, state.eps, exps);
  r.eta_eps_minus_sq = indicator_eps_minus(mesh, state.sigma, state.eps, exps);
  r.eta_kacanov_sq = state.gap();
  if (with_mesh) {
    DiscretizationIndicator d = indicator_discretization(mesh, state.u, f, state.eps, exps, rho);
    r.eta_h_sq = d.total;
    r.per_element_eta_h_sq = std::move(d.per_element);
  } else {
    r.per_element_eta_h_sq.assign(mesh.n_triangles(), 0.0);
  }
  return r;
}

}  // namespace plap
