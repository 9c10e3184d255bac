#include "plap/energy.hpp"

#include "plap/parallel.hpp"

namespace plap {

double energy_primal(const Mesh& mesh, const P1Function& u, const SourceTerm& f, const ClampBounds& bounds,
                     const Exponents& exps) {
  if (u.values.size() != mesh.n_vertices()) throw std::invalid_argument("P1Function size mismatch");
  return parallel_sum(mesh.n_triangles(), [&](int t) {
    const auto& v = mesh.triangles()[t].v;
    const ElementGeometry& g = mesh.geometry(t);
    const Eigen::Vector2d grad =
        u.values[v[0]] * g.grad[0] + u.values[v[1]] * g.grad[1] + u.values[v[2]] * g.grad[2];
    const double mean = (u.values[v[0]] + u.values[v[1]] + u.values[v[2]]) / 3.0;
    return g.area * (kappa(grad.norm(), bounds, exps) - f.values[t] * mean);
  });
}

double energy_primal(const Mesh& mesh, const P1Function& u, const SourceTerm& f,
                     const std::optional<RelaxInterval>& eps, const Exponents& exps) {
  return energy_primal(mesh, u, f, eps ? ClampBounds::from(*eps) : ClampBounds::unrelaxed(), exps);
}

double energy_dual(const Mesh& mesh, const P0VectorField& sigma, const ClampBounds& bounds,
                   const Exponents& exps) {
  if (static_cast<int>(sigma.values.size()) != mesh.n_triangles()) {
    throw std::invalid_argument("P0VectorField size mismatch");
  }
  return parallel_sum(mesh.n_triangles(), [&](int t) {
    return mesh.geometry(t).area * kappa_star(sigma.values[t].norm(), bounds, exps);
  });
}

double energy_dual(const Mesh& mesh, const P0VectorField& sigma, const std::optional<RelaxInterval>& eps,
                   const Exponents& exps) {
  return energy_dual(mesh, sigma, eps ? ClampBounds::from(*eps) : ClampBounds::unrelaxed(), exps);
}

}  // namespace plap
