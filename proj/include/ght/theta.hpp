#ifndef GHT_THETA_HPP
#define GHT_THETA_HPP

// Odd Jacobi theta function theta(z; tau) = 2 sum (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z),
// q = exp(i pi tau). Zeros at m + n tau.

#include <cmath>
#include <complex>
#include <numbers>

#include "ght/errors.hpp"

namespace ght {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
class Nome {
 public:
  explicit Nome(Complex<Real> tau) : tau_(tau) {
    if (!std::isfinite(tau.real()) || !std::isfinite(tau.imag()))
      throw DomainError("Nome: non-finite tau");
    if (!(tau.imag() > 0)) throw DomainError("Nome: Im(tau) must be positive");
  }
  Complex<Real> tau() const { return tau_; }
  Complex<Real> q() const {
    return std::exp(Complex<Real>(0, std::numbers::pi_v<Real>) * tau_);
  }

 private:
  Complex<Real> tau_;
};

template <typename Real>
struct ThetaValue {
  Complex<Real> value;
  Complex<Real> derivative;  // d/dz
  int terms = 0;
  bool accuracy_warning = false;
};

inline constexpr int kThetaMaxTerms = 512;
inline constexpr double kThetaRelTol = 1e-16;
inline constexpr double kThetaWarnImTau = 0.05;

template <typename Real>
Complex<Real> theta_quasi_shift(Complex<Real> z, long m, long n, Complex<Real> tau) {
  Nome<Real> nome(tau);
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("theta_quasi_shift: non-finite z");
  const Real pi = std::numbers::pi_v<Real>;
  const Complex<Real> i(0, 1);
  const Real sign = ((m + n) % 2 == 0) ? Real(1) : Real(-1);
  const Real nn = Real(n);
  return sign * std::exp(-i * pi * (nn * nn) * tau) * std::exp(Real(-2) * i * pi * nn * z);
}

// Series at a point already reduced to |Im w| <= Im tau / 2, |Re w| <= 1/2.
template <typename Real>
ThetaValue<Real> theta_series(Complex<Real> w, Complex<Real> tau, bool with_derivative) {
  const Real pi = std::numbers::pi_v<Real>;
  const Complex<Real> ipt = Complex<Real>(0, pi) * tau;
  ThetaValue<Real> out;
  Complex<Real> sum(0), dsum(0);
  for (int k = 0; k < kThetaMaxTerms; ++k) {
    const Real h = Real(k) + Real(0.5);
    const Complex<Real> qk = std::exp(ipt * (h * h));
    const Real sgn = (k % 2 == 0) ? Real(1) : Real(-1);
    const Real f = Real(2 * k + 1) * pi;
    const Complex<Real> t = sgn * qk * std::sin(f * w);
    sum += t;
    Complex<Real> dt(0);
    if (with_derivative) {
      dt = sgn * qk * f * std::cos(f * w);
      dsum += dt;
    }
    out.terms = k + 1;
    const bool small = std::abs(t) <= Real(kThetaRelTol) * std::abs(sum);
    const bool dsmall = !with_derivative || std::abs(dt) <= Real(kThetaRelTol) * std::abs(dsum);
    if (k > 0 && small && dsmall) break;
  }
  out.value = Real(2) * sum;
  out.derivative = Real(2) * dsum;
  return out;
}

template <typename Real>
ThetaValue<Real> theta_eval(Complex<Real> z, Complex<Real> tau, bool with_derivative = false) {
  Nome<Real> nome(tau);
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("theta: non-finite z");
  const long n = std::lround(z.imag() / tau.imag());
  Complex<Real> w = z - Real(n) * tau;
  const long m = std::lround(w.real());
  w -= Real(m);
  ThetaValue<Real> r = theta_series(w, tau, with_derivative);
  r.accuracy_warning = tau.imag() < Real(kThetaWarnImTau);
  if (m != 0 || n != 0) {
    const Complex<Real> mult = theta_quasi_shift(w, m, n, tau);
    const Complex<Real> i(0, 1);
    const Real pi = std::numbers::pi_v<Real>;
    r.derivative = mult * (r.derivative - Real(2) * i * pi * Real(n) * r.value);
    r.value = mult * r.value;
  }
  return r;
}

template <typename Real>
Complex<Real> theta(Complex<Real> z, Complex<Real> tau) {
  return theta_eval(z, tau, false).value;
}

template <typename Real>
Complex<Real> theta_prime(Complex<Real> z, Complex<Real> tau) {
  return theta_eval(z, tau, true).derivative;
}

}  // namespace ght

#endif
