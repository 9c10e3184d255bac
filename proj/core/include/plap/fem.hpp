#pragma once

#include "plap/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <memory>
#include <span>
#include <vector>

namespace plap {

/// Continuous piecewise linear function, one coefficient per mesh vertex,
/// zero on the Dirichlet vertices.
struct P1Function {
  Eigen::VectorXd values;

  static P1Function zero(const Mesh& mesh) { return {Eigen::VectorXd::Zero(mesh.n_vertices())}; }
};

/// Piecewise constant vector field, one 2-vector per triangle.
struct P0VectorField {
  std::vector<Eigen::Vector2d> values;

  static P0VectorField zero(const Mesh& mesh) {
    return {std::vector<Eigen::Vector2d>(mesh.n_triangles(), Eigen::Vector2d::Zero())};
  }
};

/// Piecewise constant right-hand side f.
struct SourceTerm {
  std::vector<double> values;

  static SourceTerm constant(const Mesh& mesh, double value) {
    return {std::vector<double>(mesh.n_triangles(), value)};
  }
};

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Weighted stiffness matrix and load on the free vertices (Dirichlet rows
/// and columns eliminated), in Mesh::free_index numbering.
struct SpdSystem {
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
};

/// Relative residual target of every linear solve.
inline constexpr double kSolverRtol = 1e-12;

P0VectorField gradient(const Mesh& mesh, const P1Function& u);

/// sum_T w_T |T| grad(phi_i) . grad(phi_j) over free vertices i, j.
/// Throws AssemblyError for a non-positive or non-finite weight.
SparseMatrix assemble_weighted_stiffness(const Mesh& mesh, std::span<const double> weights);

/// Same as assemble_weighted_stiffness over all vertices, before the
/// Dirichlet elimination.
SparseMatrix assemble_full_stiffness(const Mesh& mesh, std::span<const double> weights);

/// int f phi_i for every vertex i (exact for piecewise constant f).
Eigen::VectorXd assemble_load(const Mesh& mesh, const SourceTerm& f);

/// Entries of a full vertex vector at the free vertices.
Eigen::VectorXd restrict_to_free(const Mesh& mesh, const Eigen::VectorXd& full);

/// Extends a free-vertex vector by zeros on the Dirichlet vertices.
P1Function extend_from_free(const Mesh& mesh, const Eigen::VectorXd& free);

SpdSystem make_system(const Mesh& mesh, std::span<const double> weights, const SourceTerm& f);

/// Sparse LDL^T with iterative refinement, then preconditioned CG from that
/// iterate if the residual is still above rtol. A solution whose normwise
/// backward error ||Au - b|| / (||A|| ||u|| + ||b||) is at most 1e-15 is
/// accepted as well, since rounding alone can keep the relative residual
/// above rtol on fine meshes. Throws SolverError carrying the achieved
/// relative residual otherwise.
P1Function solve_spd(const Mesh& mesh, const SpdSystem& system, double rtol = kSolverRtol);

/// int tau . grad(phi_i) - int f phi_i for every vertex i. Vanishes at the
/// free vertices iff div_h tau = -f.
Eigen::VectorXd divergence_functional(const Mesh& mesh, const P0VectorField& tau, const SourceTerm& f);

/// Max over the free vertices of |divergence_functional|.
double divergence_residual(const Mesh& mesh, const P0VectorField& tau, const SourceTerm& f);

/// Repeated weighted Poisson solves on one mesh. The sparsity pattern, the
/// unweighted element matrices and the symbolic factorization are computed
/// once; each solve only rescales, refactorizes and solves.
class WeightedPoissonSolver {
 public:
  explicit WeightedPoissonSolver(const Mesh& mesh);
  ~WeightedPoissonSolver();
  WeightedPoissonSolver(WeightedPoissonSolver&&) noexcept;
  WeightedPoissonSolver& operator=(WeightedPoissonSolver&&) noexcept;

  /// Solves sum_T w_T int_T grad u . grad v = rhs(v) for all free v, where
  /// rhs is given on the free vertices.
  P1Function solve(std::span<const double> weights, const Eigen::VectorXd& rhs_free,
                   double rtol = kSolverRtol);

  const Mesh& mesh() const noexcept { return *mesh_; }

 private:
  struct Impl;
  const Mesh* mesh_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace plap
