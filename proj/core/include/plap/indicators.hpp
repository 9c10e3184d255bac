#pragma once

#include "plap/fem.hpp"
#include "plap/kacanov.hpp"
#include "plap/relaxation.hpp"

#include <vector>

namespace plap {

/// The four squared indicators after a Kacanov step. eta_h_sq already
/// contains the weight rho.
struct IndicatorReport {
  double eta_eps_plus_sq = 0.0;
  double eta_eps_minus_sq = 0.0;
  double eta_kacanov_sq = 0.0;
  double eta_h_sq = 0.0;
  /// Unweighted per-triangle contributions; eta_h_sq = rho * their sum.
  std::vector<double> per_element_eta_h_sq;
  double rho = 0.0;
};

/// J*_eps(sigma) - J*_(eps_minus, inf)(sigma), summed elementwise.
double indicator_eps_plus(const Mesh& mesh, const P0VectorField& sigma, const RelaxInterval& eps,
                          const Exponents& exps);

/// J*_eps(sigma) - J*_(0, eps_plus)(sigma), summed elementwise.
double indicator_eps_minus(const Mesh& mesh, const P0VectorField& sigma, const RelaxInterval& eps,
                           const Exponents& exps);

/// Duality gap J_eps(u) + J*_eps(sigma).
double indicator_kacanov(const Mesh& mesh, const P1Function& u, const P0VectorField& sigma, const SourceTerm& f,
                         const RelaxInterval& eps, const Exponents& exps);

struct DiscretizationIndicator {
  double total = 0.0;
  std::vector<double> per_element;
};

/// Per triangle: |T| (phi_{eps,|grad u|})*(h_T |f|) plus h_e^2 |[V_eps(grad u)]|^2
/// over its interior edges. total = rho * sum.
DiscretizationIndicator indicator_discretization(const Mesh& mesh, const P1Function& u, const SourceTerm& f,
                                                 const RelaxInterval& eps, const Exponents& exps, double rho);

/// All four indicators for a state. With with_mesh = false the
/// discretization part is left at zero.
IndicatorReport compute_indicators(const Mesh& mesh, const KacanovState& state, const SourceTerm& f,
                                   const Exponents& exps, double rho, bool with_mesh = true);

}  // namespace plap
