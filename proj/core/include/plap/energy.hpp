#pragma once

#include "plap/fem.hpp"
#include "plap/relaxation.hpp"

#include <optional>

namespace plap {

/// Primal energy sum_T |T| kappa(|grad u|_T) - int f u. Without an interval
/// the unrelaxed integrand t^p / p is used (evaluated in the log domain, so
/// large p underflows to 0 instead of producing NaN).
double energy_primal(const Mesh& mesh, const P1Function& u, const SourceTerm& f,
                     const std::optional<RelaxInterval>& eps, const Exponents& exps);
double energy_primal(const Mesh& mesh, const P1Function& u, const SourceTerm& f,
                     const ClampBounds& bounds, const Exponents& exps);

/// Dual energy sum_T |T| kappa_star(|sigma_T|); unrelaxed: |sigma|^q / q.
double energy_dual(const Mesh& mesh, const P0VectorField& sigma, const std::optional<RelaxInterval>& eps,
                   const Exponents& exps);
double energy_dual(const Mesh& mesh, const P0VectorField& sigma, const ClampBounds& bounds,
                   const Exponents& exps);

}  // namespace plap
