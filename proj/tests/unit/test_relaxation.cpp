#include "plap/error.hpp"
#include "plap/relaxation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace plap;

namespace {

// Brute-force min over a log grid of the defining quadratic family.
double kappa_star_oracle(double t, double lo, double hi, double q) {
  double best = INFINITY;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const double a = lo * std::pow(hi / lo, static_cast<double>(i) / n);
    best = std::min(best, 0.5 * std::pow(a, q - 2.0) * t * t + (1.0 / q - 0.5) * std::pow(a, q));
  }
  best = std::min(best, 0.5 * std::pow(std::clamp(t, lo, hi), q - 2.0) * t * t +
                            (1.0 / q - 0.5) * std::pow(std::clamp(t, lo, hi), q));
  return best;
}

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int n = 2000) {
  if (b <= a) return 0.0;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("constructors reject invalid parameters") {
  CHECK_THROWS_AS(Exponents{1.5}, DomainError);
  CHECK_THROWS_AS(Exponents{INFINITY}, DomainError);
  CHECK_THROWS_AS(Exponents{NAN}, DomainError);
  CHECK(Exponents(3.0).q() == doctest::Approx(1.5));
  CHECK(Exponents(2.0).q() == 2.0);
  auto interval = [](double lo, double hi) { return RelaxInterval(lo, hi); };
  CHECK_THROWS_AS(interval(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(interval(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(interval(1.0, INFINITY), DomainError);
  CHECK_NOTHROW(interval(1.0, 1.0));
}

TEST_CASE("power handles zero base") {
  CHECK(power(0.0, 0.0) == 1.0);
  CHECK(power(0.0, 1.5) == 0.0);
  CHECK(power(4.0, 0.5) == doctest::Approx(2.0));
}

TEST_CASE("kappa_star hand values") {
  const Exponents exps(3.0);
  const RelaxInterval eps(0.5, 2.0);
  SUBCASE("middle branch") { CHECK(kappa_star(1.0, eps, exps) == doctest::Approx(2.0 / 3.0).epsilon(1e-14)); }
  SUBCASE("lower branch") {
    const double expected = 0.5 * std::pow(0.5, -0.5) * 0.0625 + (2.0 / 3.0 - 0.5) * std::pow(0.5, 1.5);
    CHECK(kappa_star(0.25, eps, exps) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(kappa_star(0.25, eps, exps) == doctest::Approx(0.103120).epsilon(1e-6));
  }
  SUBCASE("upper branch") {
    const double expected = 0.5 * std::pow(2.0, -0.5) * 9.0 + (2.0 / 3.0 - 0.5) * std::pow(2.0, 1.5);
    CHECK(kappa_star(3.0, eps, exps) == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(kappa_star(0.0, eps, exps) == doctest::Approx((2.0 / 3.0 - 0.5) * std::pow(0.5, 1.5)));
  CHECK_THROWS_AS(kappa_star(-1.0, eps, exps), DomainError);
}

TEST_CASE("kappa hand value and unrelaxed limit") {
  const Exponents exps(3.0);
  CHECK(kappa(1.0, RelaxInterval(0.5, 2.0), exps) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(kappa(2.0, ClampBounds::unrelaxed(), exps) == doctest::Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(kappa_star(2.0, ClampBounds::unrelaxed(), exps) == doctest::Approx(std::pow(2.0, 1.5) / 1.5));
}

TEST_CASE("phi_eps_star_prime hand value") {
  const Exponents exps(3.0);
  const RelaxInterval eps(0.5, 2.0);
  CHECK(phi_eps_star_prime(1.0, eps, exps) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(phi_eps_star_prime(4.0, eps, exps) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(phi_eps_star_prime(0.0, eps, exps) == 0.0);
  CHECK(phi_eps_star_prime(0.37, eps, Exponents(2.0)) == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("phi_eps_prime hand values") {
  const Exponents exps(3.0);
  const RelaxInterval eps(0.5, 2.0);
  CHECK(phi_eps_prime(1.0, eps, exps) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(phi_eps_prime(0.5, eps, exps) == doctest::Approx(std::sqrt(0.5) * 0.5).epsilon(1e-14));
  CHECK(phi_eps_prime(0.5, eps, exps) == doctest::Approx(0.35355).epsilon(1e-5));
  CHECK(phi_eps_prime(0.37, eps, Exponents(2.0)) == doctest::Approx(0.37).epsilon(1e-15));
}

TEST_CASE("shifted_conjugate hand value") {
  const Exponents exps(3.0);
  const RelaxInterval eps(0.5, 2.0);
  CHECK(shifted_conjugate(1.0, 0.5, eps, exps) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(shifted_conjugate(1.0, 0.0, eps, exps) == 0.0);
  for (double t : {0.0, 0.3, 7.0}) CHECK(shifted_conjugate(t, 1.7, eps, Exponents(2.0)) == doctest::Approx(0.5 * 1.7 * 1.7));
  CHECK_THROWS_AS(shifted_conjugate(-1.0, 0.5, eps, exps), DomainError);
}

TEST_CASE("kappa_star matches the minimum over the clamp interval") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uq(1.01, 2.0), ulo(-3.0, 0.0), uhi(0.0, 2.0), ut(-4.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const Exponents exps(1.0 / (1.0 - 1.0 / uq(rng)));
    const double lo = std::pow(10.0, ulo(rng));
    const double hi = std::pow(10.0, uhi(rng));
    const double t = std::pow(10.0, ut(rng));
    const double value = kappa_star(t, RelaxInterval(lo, hi), exps);
    const double oracle = kappa_star_oracle(t, lo, hi, exps.q());
    CHECK(value <= oracle * (1.0 + 1e-13));
    CHECK(value >= oracle * (1.0 - 1e-6));
  }
}

TEST_CASE("phi_eps_prime inverts phi_eps_star_prime") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> up(2.0, 100.0), us(-4.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const Exponents exps(up(rng));
    const RelaxInterval eps(1e-2, 1e2);
    const double s = std::pow(10.0, us(rng));
    const double t = phi_eps_star_prime(s, eps, exps);
    CHECK(phi_eps_prime(t, eps, exps) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("derivatives match finite differences of the integrands") {
  const Exponents exps(5.0);
  const RelaxInterval eps(0.1, 3.0);
  for (double s : {0.01, 0.05, 0.2, 1.0, 2.5, 4.0, 10.0}) {
    const double h = 1e-6 * s;
    const double fd = (kappa_star(s + h, eps, exps) - kappa_star(s - h, eps, exps)) / (2.0 * h);
    CHECK(phi_eps_star_prime(s, eps, exps) == doctest::Approx(fd).epsilon(1e-7));
  }
  for (double t : {0.01, 0.2, 0.5, 1.0, 1.5, 5.0}) {
    const double h = 1e-6 * t;
    const double fd = (kappa(t + h, eps, exps) - kappa(t - h, eps, exps)) / (2.0 * h);
    CHECK(phi_eps_prime(t, eps, exps) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("kappa is the convex conjugate of kappa_star") {
  const Exponents exps(4.0);
  const RelaxInterval eps(0.2, 5.0);
  for (double t : {0.0, 0.05, 0.3, 1.0, 2.0, 4.0}) {
    double sup = -INFINITY;
    const int n = 200000;
    for (int i = 0; i <= n; ++i) {
      const double s = 20.0 * i / n;
      sup = std::max(sup, s * t - kappa_star(s, eps, exps));
    }
    CHECK(kappa(t, eps, exps) == doctest::Approx(sup).epsilon(1e-6).scale(1e-6));
  }
}

TEST_CASE("relaxed dual energy density decreases as the interval widens") {
  const Exponents exps(10.0);
  for (double t : {1e-4, 1e-2, 0.5, 1.0, 3.0, 100.0}) {
    double prev = INFINITY;
    for (double w : {1.0, 2.0, 4.0, 16.0, 1e3}) {
      const double v = kappa_star(t, RelaxInterval(1.0 / w, w), exps);
      CHECK(v <= prev * (1.0 + 1e-14));
      prev = v;
    }
    CHECK(prev >= kappa_star(t, ClampBounds::unrelaxed(), exps) * (1.0 - 1e-14));
  }
}

TEST_CASE("kappa_star is convex along random chords") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0), l(0.0, 1.0);
  const Exponents exps(6.0);
  const RelaxInterval eps(0.3, 4.0);
  for (int k = 0; k < 2000; ++k) {
    const double a = u(rng), b = u(rng), lam = l(rng);
    const double lhs = kappa_star(lam * a + (1 - lam) * b, eps, exps);
    const double rhs = lam * kappa_star(a, eps, exps) + (1 - lam) * kappa_star(b, eps, exps);
    CHECK(lhs <= rhs + 1e-12 * std::abs(rhs));
  }
}

TEST_CASE("relaxed dual density grows quadratically far outside the interval") {
  const Exponents exps(10.0);
  const RelaxInterval eps(1e-2, 10.0);
  const double t = 1e6 * eps.eps_plus();
  const double ratio = kappa_star(2.0 * t, eps, exps) / kappa_star(t, eps, exps);
  CHECK(ratio == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("shifted conjugate matches the conjugate of the shifted primal density") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> up(2.0, 12.0), ut(0.0, 3.0), us(0.0, 3.0);
  for (int k = 0; k < 12; ++k) {
    const Exponents exps(up(rng));
    const RelaxInterval eps(0.25, 4.0);
    const ClampBounds b = ClampBounds::from(eps);
    const double t = ut(rng);
    const double s = us(rng);
    // Shifted primal density phi_t(r) = int_0^r phi'(max(t,tau)) / max(t,tau) tau dtau,
    // tabulated by Simpson on a grid; sup over r of s r - phi_t(r).
    auto phi_t_prime = [&](double tau) {
      const double m = std::max(t, tau);
      return m == 0.0 ? primal_weight(0.0, b, exps) * tau : phi_eps_prime(m, b, exps) / m * tau;
    };
    const double r_max = 3.0 * phi_eps_star_prime(std::max(s, 1.0), b, exps) + 3.0 * std::max(t, 1.0);
    const int n = 400000;
    double phi = 0.0, sup = 0.0, r_prev = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double r = r_max * i / n;
      phi += simpson(phi_t_prime, r_prev, r, 2);
      r_prev = r;
      sup = std::max(sup, s * r - phi);
    }
    CHECK(shifted_conjugate(t, s, eps, exps) == doctest::Approx(sup).epsilon(1e-5).scale(1e-6));
  }
}

TEST_CASE("monotone operator ratio against the V* distance stays bounded") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uq(1.01, 2.0), ulog(-3.0, 3.0), ang(0.0, 6.283185307179586);
  for (int k = 0; k < 5000; ++k) {
    const Exponents exps(1.0 / (1.0 - 1.0 / uq(rng)));
    const RelaxInterval eps(1e-2, 1e2);
    const double r1 = std::pow(10.0, ulog(rng)), r2 = std::pow(10.0, ulog(rng));
    const double a1 = ang(rng), a2 = ang(rng);
    const Eigen::Vector2d P(r1 * std::cos(a1), r1 * std::sin(a1));
    const Eigen::Vector2d Q(r2 * std::cos(a2), r2 * std::sin(a2));
    const double monotone = (a_star(P, eps, exps) - a_star(Q, eps, exps)).dot(P - Q);
    const double vdist = (v_star(P, eps, exps) - v_star(Q, eps, exps)).squaredNorm();
    if (vdist == 0.0) continue;
    const double ratio = monotone / vdist;
    CHECK(ratio >= 0.1);
    CHECK(ratio <= 10.0);
  }
}

TEST_CASE("vector maps") {
  const Exponents exps(3.0);
  const RelaxInterval eps(0.5, 2.0);
  const Eigen::Vector2d P(0.6, 0.8);
  CHECK((a_star(P, eps, exps) - P).norm() == doctest::Approx(0.0));
  CHECK((v_star(P, eps, exps) - P).norm() == doctest::Approx(0.0));
  CHECK(a_star(Eigen::Vector2d::Zero(), eps, exps).norm() == 0.0);
  CHECK(v_star(Eigen::Vector2d::Zero(), eps, exps).norm() == 0.0);
  CHECK(v_primal(Eigen::Vector2d::Zero(), eps, exps).norm() == 0.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector2d R(n(rng), n(rng));
    CHECK(a_star(R, eps, exps).dot(R) >= 0.0);
  }
  const Eigen::Vector2d big(3.0, 4.0);
  CHECK(a_star(big, eps, exps).norm() == doctest::Approx(std::pow(2.0, -0.5) * 5.0));
  CHECK(v_star(big, eps, exps).squaredNorm() == doctest::Approx(std::pow(2.0, -0.5) * 25.0));
  const Eigen::Vector2d s = a_star(big, eps, exps);
  CHECK(v_primal(s, eps, exps).squaredNorm() == doctest::Approx(primal_weight(s.norm(), ClampBounds::from(eps), exps) * s.squaredNorm()));
}

TEST_CASE("branches join continuously at the clamp points") {
  for (double p : {2.5, 4.0, 10.0, 100.0}) {
    const Exponents exps(p);
    const double q = exps.q();
    const RelaxInterval eps(0.3, 3.0);
    for (double bp : {eps.eps_minus(), eps.eps_plus()}) {
      const double lo = std::nextafter(bp, 0.0), hi = std::nextafter(bp, INFINITY);
      CHECK(kappa_star(lo, eps, exps) == doctest::Approx(kappa_star(hi, eps, exps)).epsilon(1e-12));
      CHECK(phi_eps_star_prime(lo, eps, exps) == doctest::Approx(phi_eps_star_prime(hi, eps, exps)).epsilon(1e-12));
      const double tp = std::pow(bp, q - 1.0);
      const double tlo = std::nextafter(tp, 0.0), thi = std::nextafter(tp, INFINITY);
      CHECK(kappa(tlo, eps, exps) == doctest::Approx(kappa(thi, eps, exps)).epsilon(1e-12));
      CHECK(phi_eps_prime(tlo, eps, exps) == doctest::Approx(phi_eps_prime(thi, eps, exps)).epsilon(1e-12));
    }
  }
}
