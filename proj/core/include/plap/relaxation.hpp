#pragma once

#include <Eigen/Core>

#include <limits>

namespace plap {

/// Primal exponent p >= 2 together with its conjugate q = p / (p - 1).
class Exponents {
 public:
  /// Throws DomainError unless 2 <= p < inf.
  explicit Exponents(double p);

  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }

 private:
  double p_;
  double q_;
};

/// Relaxation interval [eps_minus, eps_plus] with 0 < eps_minus <= eps_plus < inf.
class RelaxInterval {
 public:
  /// Throws DomainError on an invalid pair.
  RelaxInterval(double eps_minus, double eps_plus);

  double eps_minus() const noexcept { return lo_; }
  double eps_plus() const noexcept { return hi_; }

  friend bool operator==(const RelaxInterval&, const RelaxInterval&) = default;

 private:
  double lo_;
  double hi_;
};

/// Clamp range with optionally released ends. The lower end may be 0 and the
/// upper end +inf; this is how the one-sided comparison energies of the
/// interval indicators, and the unrelaxed limit, are expressed.
struct ClampBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();

  static ClampBounds from(const RelaxInterval& eps) {
    return {eps.eps_minus(), eps.eps_plus()};
  }
  /// (eps_minus, inf): upper clamp released.
  static ClampBounds upper_released(const RelaxInterval& eps) {
    return {eps.eps_minus(), std::numeric_limits<double>::infinity()};
  }
  /// (0, eps_plus): lower clamp released.
  static ClampBounds lower_released(const RelaxInterval& eps) {
    return {0.0, eps.eps_plus()};
  }
  static ClampBounds unrelaxed() { return {}; }
};

/// x^e for x >= 0 with the convention 0^e = 0 for e > 0 and 0^0 = 1.
double power(double x, double e);

/// eps_minus v t ^ eps_plus.
double clamp_modulus(double t, const ClampBounds& b);

/// Relaxed dual integrand: quadratic below eps_minus and above eps_plus,
/// t^q / q in between. Throws DomainError for t < 0.
double kappa_star(double t, const ClampBounds& b, const Exponents& exps);
double kappa_star(double t, const RelaxInterval& eps, const Exponents& exps);

/// Relaxed primal integrand, the convex conjugate of kappa_star. Its
/// branches switch at t = eps_minus^(q-1) and t = eps_plus^(q-1).
double kappa(double t, const ClampBounds& b, const Exponents& exps);
double kappa(double t, const RelaxInterval& eps, const Exponents& exps);

/// clamp(s)^(q-2) * s
double phi_eps_star_prime(double s, const ClampBounds& b, const Exponents& exps);
double phi_eps_star_prime(double s, const RelaxInterval& eps, const Exponents& exps);

/// Exact inverse of phi_eps_star_prime.
double phi_eps_prime(double t, const ClampBounds& b, const Exponents& exps);
double phi_eps_prime(double t, const RelaxInterval& eps, const Exponents& exps);

/// phi_eps_prime(t) / t, continuous extension at t = 0. This is the Kacanov
/// weight seen from the primal side.
double primal_weight(double t, const ClampBounds& b, const Exponents& exps);

Eigen::Vector2d a_star(const Eigen::Vector2d& P, const RelaxInterval& eps, const Exponents& exps);
Eigen::Vector2d v_star(const Eigen::Vector2d& P, const RelaxInterval& eps, const Exponents& exps);
Eigen::Vector2d v_primal(const Eigen::Vector2d& P, const RelaxInterval& eps, const Exponents& exps);

/// Conjugate of the shifted primal N-function, (phi_{eps,t})^*(s). Evaluated
/// as the dual function shifted at a = phi_eps_prime(t):
///   int_0^s g(max(a, tau)) tau dtau,  g(x) = clamp(x)^(q-2),
/// integrated in closed form branch by branch.
double shifted_conjugate(double t, double s, const RelaxInterval& eps, const Exponents& exps);

}  // namespace plap
