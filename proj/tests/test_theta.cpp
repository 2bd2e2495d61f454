#include <doctest.h>

#include <random>

#include "ght/theta.hpp"

using C = std::complex<double>;
using ght::theta;
using ght::theta_quasi_shift;

namespace {

// Brute-force oracle: 200 terms of the same series, no argument reduction, no early exit.
C theta_direct(C z, C tau) {
  const double pi = std::numbers::pi;
  C sum = 0;
  for (int n = 0; n < 200; ++n) {
    const double h = n + 0.5;
    // sin expanded into exponentials so that tiny q-powers and large sines never meet as 0 * inf.
    const C a = C(0, pi) * tau * (h * h);
    const C b = C(0, (2 * n + 1) * pi) * z;
    sum += (n % 2 ? -1.0 : 1.0) * (std::exp(a + b) - std::exp(a - b)) / C(0, 2);
  }
  return 2.0 * sum;
}

}  // namespace

TEST_CASE("theta: zero at the origin and at lattice points") {
  const C tau(0.5, 0.8);
  CHECK(std::abs(theta(C(0), tau)) == 0.0);
  for (int m = -2; m <= 2; ++m)
    for (int n = -2; n <= 2; ++n)
      {
        const double scale = std::abs(theta_quasi_shift(C(0.5), m, n, tau) * theta(C(0.5), tau));
        CHECK(std::abs(theta(C(m) + double(n) * tau, tau)) < 1e-13 * scale);
      }
}

TEST_CASE("theta: sign flip under z -> z+1") {
  const C z(0.21, 0.13), tau(0.4, 0.9);
  const C a = theta(z + 1.0, tau), b = theta(z, tau);
  CHECK(std::abs(a + b) < 1e-14 * std::abs(b));
}

TEST_CASE("theta: direct-sum oracle") {
  const C tau(0, 2);
  const C v = theta(C(0.3), tau), o = theta_direct(C(0.3), tau);
  CHECK(std::abs(v - o) < 1e-10 * std::abs(o));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5), im(0.3, 3.0);
  for (int k = 0; k < 200; ++k) {
    const C t(u(rng), im(rng));
    const C z(u(rng), u(rng) * t.imag());
    CHECK(std::abs(theta(z, t) - theta_direct(z, t)) < 1e-12 * (1 + std::abs(theta_direct(z, t))));
  }
}

TEST_CASE("theta: derivative matches central difference") {
  const C tau(0.3, 0.7), z(0.17, 0.05);
  const double h = 1e-6;
  const C fd = (theta(z + h, tau) - theta(z - h, tau)) / (2 * h);
  CHECK(std::abs(ght::theta_prime(z, tau) - fd) < 1e-7 * std::abs(fd));
  const C far = z + 2.0 + 3.0 * tau;
  const C fd2 = (theta(far + h, tau) - theta(far - h, tau)) / (2 * h);
  CHECK(std::abs(ght::theta_prime(far, tau) - fd2) < 1e-6 * std::abs(fd2));
}

TEST_CASE("theta_quasi_shift: identity, unit shift, tau shift") {
  const C z(0.2, 0.1), tau(0.3, 0.7);
  CHECK(std::abs(theta_quasi_shift(z, 0, 0, tau) - 1.0) == 0.0);
  CHECK(std::abs(theta_quasi_shift(z, 1, 0, tau) + 1.0) < 1e-15);
  const C ratio = theta(z + tau, tau) / theta(z, tau);
  CHECK(std::abs(ratio - theta_quasi_shift(z, 0, 1, tau)) < 1e-12 * std::abs(ratio));
}

TEST_CASE("theta: domain errors") {
  CHECK_THROWS_AS(theta(C(0.1), C(0.2, 0)), ght::DomainError);
  CHECK_THROWS_AS(theta(C(0.1), C(0.2, -1)), ght::DomainError);
  CHECK_THROWS_AS(theta(C(NAN, 0), C(0, 1)), ght::DomainError);
  CHECK(ght::theta_eval(C(0.1), C(0, 0.04)).accuracy_warning);
  CHECK_FALSE(ght::theta_eval(C(0.1), C(0, 0.5)).accuracy_warning);
}

TEST_CASE("theta: quasi-periodicity, oddness, asymptotics on random samples") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1), im(0.3, 5.0), im_big(6.0, 10.0);
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const C tau(u(rng), im(rng));
    const C z(u(rng), u(rng) * tau.imag());
    const C t0 = theta(z, tau);
    CHECK(std::abs(theta(-z, tau) + t0) <= 1e-12 * std::abs(t0));
    if (std::abs(t0) < 1e-6) continue;
    for (int m = -2; m <= 2; ++m)
      for (int n = -2; n <= 2; ++n) {
        const C lhs = theta(z + double(m) + double(n) * tau, tau);
        const C rhs = theta_quasi_shift(z, m, n, tau) * t0;
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(rhs));
        ++checked;
      }
    const C tb(u(rng), im_big(rng));
    const C zb(u(rng), 0.5 * u(rng));
    const C q = std::exp(C(0, std::numbers::pi) * tb);
    const C asym = 2.0 * std::pow(q, 0.25) * std::sin(std::numbers::pi * zb);
    CHECK(std::abs(theta(zb, tb) - asym) < 1e-6 * std::abs(asym));
  }
  CHECK(checked > 20000);
}
