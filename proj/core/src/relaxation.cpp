#include "plap/relaxation.hpp"

#include "plap/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace plap {

Exponents::Exponents(double p) : p_(p), q_(p / (p - 1.0)) {
  if (!(p >= 2.0) || !std::isfinite(p)) {
    throw DomainError("exponent p must satisfy 2 <= p < inf, got " + std::to_string(p));
  }
}

RelaxInterval::RelaxInterval(double eps_minus, double eps_plus) : lo_(eps_minus), hi_(eps_plus) {
  if (!(eps_minus > 0.0) || !(eps_minus <= eps_plus) || !std::isfinite(eps_plus)) {
    throw DomainError("relaxation interval needs 0 < eps_minus <= eps_plus < inf, got [" +
                      std::to_string(eps_minus) + ", " + std::to_string(eps_plus) + "]");
  }
}

double power(double x, double e) {
  if (x == 0.0) return e == 0.0 ? 1.0 : 0.0;
  return std::pow(x, e);
}

double clamp_modulus(double t, const ClampBounds& b) {
  return std::min(std::max(t, b.lower), b.upper);
}

namespace {

void require_nonnegative(double t, const char* what) {
  if (!(t >= 0.0)) throw DomainError(std::string(what) + ": argument must be >= 0");
}

// Value of the quadratic branch (1/2) a^(q-2) t^2 + (1/q - 1/2) a^q.
double quadratic_dual_branch(double t, double a, double q) {
  return 0.5 * power(a, q - 2.0) * t * t + (1.0 / q - 0.5) * power(a, q);
}

}  // namespace

double kappa_star(double t, const ClampBounds& b, const Exponents& exps) {
  require_nonnegative(t, "kappa_star");
  const double q = exps.q();
  if (t <= b.lower) return quadratic_dual_branch(t, b.lower, q);
  if (t >= b.upper) return quadratic_dual_branch(t, b.upper, q);
  return power(t, q) / q;
}

double kappa_star(double t, const RelaxInterval& eps, const Exponents& exps) {
  return kappa_star(t, ClampBounds::from(eps), exps);
}

double kappa(double t, const ClampBounds& b, const Exponents& exps) {
  require_nonnegative(t, "kappa");
  const double q = exps.q();
  const double p = exps.p();
  const double t_lo = power(b.lower, q - 1.0);
  const double t_hi = std::isinf(b.upper) ? b.upper : power(b.upper, q - 1.0);
  if (b.lower > 0.0 && t <= t_lo) {
    return 0.5 * power(b.lower, 2.0 - q) * t * t - (1.0 / q - 0.5) * power(b.lower, q);
  }
  if (t >= t_hi) {
    return 0.5 * power(b.upper, 2.0 - q) * t * t - (1.0 / q - 0.5) * power(b.upper, q);
  }
  return power(t, p) / p;
}

double kappa(double t, const RelaxInterval& eps, const Exponents& exps) {
  return kappa(t, ClampBounds::from(eps), exps);
}

double phi_eps_star_prime(double s, const ClampBounds& b, const Exponents& exps) {
  require_nonnegative(s, "phi_eps_star_prime");
  if (s == 0.0) return 0.0;
  return power(clamp_modulus(s, b), exps.q() - 2.0) * s;
}

double phi_eps_star_prime(double s, const RelaxInterval& eps, const Exponents& exps) {
  return phi_eps_star_prime(s, ClampBounds::from(eps), exps);
}

double primal_weight(double t, const ClampBounds& b, const Exponents& exps) {
  require_nonnegative(t, "primal_weight");
  const double q = exps.q();
  const double t_lo = power(b.lower, q - 1.0);
  const double t_hi = std::isinf(b.upper) ? b.upper : power(b.upper, q - 1.0);
  if (b.lower > 0.0 && t <= t_lo) return power(b.lower, 2.0 - q);
  if (t >= t_hi) return power(b.upper, 2.0 - q);
  return power(t, exps.p() - 2.0);
}

double phi_eps_prime(double t, const ClampBounds& b, const Exponents& exps) {
  return primal_weight(t, b, exps) * t;
}

double phi_eps_prime(double t, const RelaxInterval& eps, const Exponents& exps) {
  return phi_eps_prime(t, ClampBounds::from(eps), exps);
}

Eigen::Vector2d a_star(const Eigen::Vector2d& P, const RelaxInterval& eps, const Exponents& exps) {
  const double n = P.norm();
  if (n == 0.0) return Eigen::Vector2d::Zero();
  return power(clamp_modulus(n, ClampBounds::from(eps)), exps.q() - 2.0) * P;
}

Eigen::Vector2d v_star(const Eigen::Vector2d& P, const RelaxInterval& eps, const Exponents& exps) {
  const double n = P.norm();
  if (n == 0.0) return Eigen::Vector2d::Zero();
  return power(clamp_modulus(n, ClampBounds::from(eps)), 0.5 * (exps.q() - 2.0)) * P;
}

Eigen::Vector2d v_primal(const Eigen::Vector2d& P, const RelaxInterval& eps, const Exponents& exps) {
  const double n = P.norm();
  if (n == 0.0) return Eigen::Vector2d::Zero();
  return std::sqrt(primal_weight(n, ClampBounds::from(eps), exps)) * P;
}

double shifted_conjugate(double t, double s, const RelaxInterval& eps, const Exponents& exps) {
  require_nonnegative(t, "shifted_conjugate");
  require_nonnegative(s, "shifted_conjugate");
  if (s == 0.0) return 0.0;
  const ClampBounds b = ClampBounds::from(eps);
  const double q = exps.q();
  const double shift = phi_eps_prime(t, b, exps);
  const double below = std::min(s, shift);
  // Frozen part: int_0^min(s,a) g(a) tau dtau.
  double value = 0.0;
  if (below > 0.0) value = 0.5 * power(clamp_modulus(shift, b), q - 2.0) * below * below;
  // Unshifted part: int_a^s g(tau) tau dtau = kappa_star(s) - kappa_star(a).
  if (s > shift) value += kappa_star(s, b, exps) - kappa_star(shift, b, exps);
  return value;
}

}  // namespace plap
