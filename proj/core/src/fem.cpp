#include "plap/fem.hpp"

#include "plap/error.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace plap {

namespace {

void check_weights(const Mesh& mesh, std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != mesh.n_triangles()) {
    throw AssemblyError("weight count does not match the triangle count");
  }
  for (std::size_t t = 0; t < weights.size(); ++t) {
    if (!(weights[t] > 0.0) || !std::isfinite(weights[t])) {
      throw AssemblyError("weight of triangle " + std::to_string(t) + " is not positive and finite");
    }
  }
}

// Unweighted local stiffness |T| grad(phi_i) . grad(phi_j).
Eigen::Matrix3d local_stiffness(const ElementGeometry& g) {
  Eigen::Matrix3d k;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) k(i, j) = g.area * g.grad[i].dot(g.grad[j]);
  }
  return k;
}

SparseMatrix assemble(const Mesh& mesh, std::span<const double> weights, bool eliminate) {
  check_weights(mesh, weights);
  const int n = eliminate ? mesh.n_free() : mesh.n_vertices();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * static_cast<std::size_t>(mesh.n_triangles()));
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& v = mesh.triangles()[t].v;
    const Eigen::Matrix3d k = weights[t] * local_stiffness(mesh.geometry(t));
    for (int i = 0; i < 3; ++i) {
      const int row = eliminate ? mesh.free_index(v[i]) : v[i];
      if (row < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int col = eliminate ? mesh.free_index(v[j]) : v[j];
        if (col < 0) continue;
        triplets.emplace_back(row, col, k(i, j));
      }
    }
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

double relative_residual(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b,
                         double b_norm) {
  return (a * x - b).norm() / b_norm;
}

// Max absolute row sum; bounds the 2-norm of a symmetric matrix.
double norm_inf(const SparseMatrix& a) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(a.rows());
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) rows[it.row()] += std::abs(it.value());
  }
  return rows.size() > 0 ? rows.maxCoeff() : 0.0;
}

// On fine meshes ||A|| ||x|| / ||b|| grows like h^-2 and the relative
// residual of the correctly rounded solution exceeds rtol. A normwise
// backward error of a few ulp is accepted as converged in that case.
constexpr double kBackwardTol = 1e-15;

bool accepted(double rel_res, double rtol, double a_norm, const Eigen::VectorXd& x, double b_norm) {
  if (rel_res <= rtol) return true;
  const double eta = rel_res * b_norm / (a_norm * x.norm() + b_norm);
  return eta <= kBackwardTol;
}

// LDL^T solve with up to three refinement sweeps, then CG from the best
// iterate. The factorization must already hold a factor of a.
Eigen::VectorXd solve_factored(const SparseMatrix& a, const Eigen::VectorXd& b,
                               const Eigen::SimplicialLDLT<SparseMatrix>& ldlt, double rtol) {
  const double b_norm = b.norm();
  if (b_norm == 0.0) return Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  double res = 1.0;
  if (ldlt.info() == Eigen::Success) {
    x = ldlt.solve(b);
    res = relative_residual(a, x, b, b_norm);
    for (int sweep = 0; sweep < 3 && res > rtol && std::isfinite(res); ++sweep) {
      const Eigen::VectorXd candidate = x + ldlt.solve(b - a * x);
      const double candidate_res = relative_residual(a, candidate, b, b_norm);
      if (!(candidate_res < res)) break;
      x = candidate;
      res = candidate_res;
    }
    if (!std::isfinite(res)) {
      x.setZero();
      res = 1.0;
    }
  }
  const double a_norm = norm_inf(a);
  if (accepted(res, rtol, a_norm, x, b_norm)) return x;

  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(rtol);
  cg.setMaxIterations(std::max<Eigen::Index>(1000, 20 * b.size()));
  cg.compute(a);
  const Eigen::VectorXd y = cg.solveWithGuess(b, x);
  const double cg_res = relative_residual(a, y, b, b_norm);
  if (accepted(cg_res, rtol, a_norm, y, b_norm)) return y;
  const double best = std::min(res, cg_res);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", best);
  throw SolverError(std::string("linear solve stalled at relative residual ") + buf, best);
}

}  // namespace

P0VectorField gradient(const Mesh& mesh, const P1Function& u) {
  if (u.values.size() != mesh.n_vertices()) throw std::invalid_argument("P1Function size mismatch");
  P0VectorField g;
  g.values.resize(mesh.n_triangles());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& v = mesh.triangles()[t].v;
    const ElementGeometry& geo = mesh.geometry(t);
    g.values[t] = u.values[v[0]] * geo.grad[0] + u.values[v[1]] * geo.grad[1] + u.values[v[2]] * geo.grad[2];
  }
  return g;
}

SparseMatrix assemble_weighted_stiffness(const Mesh& mesh, std::span<const double> weights) {
  return assemble(mesh, weights, true);
}

SparseMatrix assemble_full_stiffness(const Mesh& mesh, std::span<const double> weights) {
  return assemble(mesh, weights, false);
}

Eigen::VectorXd assemble_load(const Mesh& mesh, const SourceTerm& f) {
  if (static_cast<int>(f.values.size()) != mesh.n_triangles()) {
    throw std::invalid_argument("SourceTerm size mismatch");
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.n_vertices());
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double share = f.values[t] * mesh.geometry(t).area / 3.0;
    for (int v : mesh.triangles()[t].v) b[v] += share;
  }
  return b;
}

Eigen::VectorXd restrict_to_free(const Mesh& mesh, const Eigen::VectorXd& full) {
  Eigen::VectorXd r(mesh.n_free());
  const auto free = mesh.free_vertices();
  for (int i = 0; i < mesh.n_free(); ++i) r[i] = full[free[i]];
  return r;
}

P1Function extend_from_free(const Mesh& mesh, const Eigen::VectorXd& free) {
  P1Function u = P1Function::zero(mesh);
  const auto fv = mesh.free_vertices();
  for (int i = 0; i < mesh.n_free(); ++i) u.values[fv[i]] = free[i];
  return u;
}

SpdSystem make_system(const Mesh& mesh, std::span<const double> weights, const SourceTerm& f) {
  return {assemble_weighted_stiffness(mesh, weights), restrict_to_free(mesh, assemble_load(mesh, f))};
}

P1Function solve_spd(const Mesh& mesh, const SpdSystem& system, double rtol) {
  if (system.matrix.rows() != mesh.n_free() || system.rhs.size() != mesh.n_free()) {
    throw std::invalid_argument("system size does not match the free vertex count");
  }
  if (mesh.n_free() == 0) return P1Function::zero(mesh);
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  ldlt.compute(system.matrix);
  return extend_from_free(mesh, solve_factored(system.matrix, system.rhs, ldlt, rtol));
}

Eigen::VectorXd divergence_functional(const Mesh& mesh, const P0VectorField& tau, const SourceTerm& f) {
  if (static_cast<int>(tau.values.size()) != mesh.n_triangles()) {
    throw std::invalid_argument("P0VectorField size mismatch");
  }
  Eigen::VectorXd r = -assemble_load(mesh, f);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry& g = mesh.geometry(t);
    const auto& v = mesh.triangles()[t].v;
    for (int k = 0; k < 3; ++k) r[v[k]] += g.area * tau.values[t].dot(g.grad[k]);
  }
  return r;
}

double divergence_residual(const Mesh& mesh, const P0VectorField& tau, const SourceTerm& f) {
  const Eigen::VectorXd r = divergence_functional(mesh, tau, f);
  double m = 0.0;
  for (int v : mesh.free_vertices()) m = std::max(m, std::abs(r[v]));
  return m;
}

struct WeightedPoissonSolver::Impl {
  SparseMatrix matrix;
  // Per triangle, the 9 local entries: position in matrix.valuePtr() or -1.
  std::vector<std::array<int, 9>> slots;
  std::vector<Eigen::Matrix3d> local;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  bool analyzed = false;
};

WeightedPoissonSolver::WeightedPoissonSolver(const Mesh& mesh) : mesh_(&mesh), impl_(std::make_unique<Impl>()) {
  const std::vector<double> ones(mesh.n_triangles(), 1.0);
  impl_->matrix = assemble_weighted_stiffness(mesh, ones);
  impl_->matrix.makeCompressed();
  impl_->slots.resize(mesh.n_triangles());
  impl_->local.resize(mesh.n_triangles());
  const SparseMatrix& a = impl_->matrix;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    impl_->local[t] = local_stiffness(mesh.geometry(t));
    const auto& v = mesh.triangles()[t].v;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int row = mesh.free_index(v[i]);
        const int col = mesh.free_index(v[j]);
        int slot = -1;
        if (row >= 0 && col >= 0) {
          const int* begin = a.innerIndexPtr() + a.outerIndexPtr()[col];
          const int* end = a.innerIndexPtr() + a.outerIndexPtr()[col + 1];
          slot = static_cast<int>(std::lower_bound(begin, end, row) - a.innerIndexPtr());
        }
        impl_->slots[t][3 * i + j] = slot;
      }
    }
  }
}

WeightedPoissonSolver::~WeightedPoissonSolver() = default;
WeightedPoissonSolver::WeightedPoissonSolver(WeightedPoissonSolver&&) noexcept = default;
WeightedPoissonSolver& WeightedPoissonSolver::operator=(WeightedPoissonSolver&&) noexcept = default;

P1Function WeightedPoissonSolver::solve(std::span<const double> weights, const Eigen::VectorXd& rhs_free,
                                        double rtol) {
  const Mesh& mesh = *mesh_;
  check_weights(mesh, weights);
  if (rhs_free.size() != mesh.n_free()) throw std::invalid_argument("rhs size does not match free vertices");
  if (mesh.n_free() == 0) return P1Function::zero(mesh);
  SparseMatrix& a = impl_->matrix;
  double* values = a.valuePtr();
  std::fill(values, values + a.nonZeros(), 0.0);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& slots = impl_->slots[t];
    const Eigen::Matrix3d& k = impl_->local[t];
    for (int e = 0; e < 9; ++e) {
      if (slots[e] >= 0) values[slots[e]] += weights[t] * k(e / 3, e % 3);
    }
  }
  if (!impl_->analyzed) {
    impl_->ldlt.analyzePattern(a);
    impl_->analyzed = true;
  }
  impl_->ldlt.factorize(a);
  return extend_from_free(mesh, solve_factored(a, rhs_free, impl_->ldlt, rtol));
}

}  // namespace plap
