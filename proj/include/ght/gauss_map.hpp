#ifndef GHT_GAUSS_MAP_HPP
#define GHT_GAUSS_MAP_HPP

// Gauss map of the gyrating H'-T family on the branched torus C/(Z + tau Z):
// G^2(z) = rho' e^{2 i pi z} theta(3z; 3tau) / theta(3z - tau; 3tau), zeros at k/3, poles at tau/3 + k/3.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "ght/theta.hpp"

namespace ght {

using cd = std::complex<double>;

inline constexpr double kPoleExclusion = 1e-9;
inline constexpr double kBranchExclusion = 1e-4;

// Representative of z - p closest to 0 modulo the lattice Z + tau Z.
template <typename Real>
Complex<Real> lattice_reduce_near_zero(Complex<Real> d, Complex<Real> tau) {
  const Real n = std::round(d.imag() / tau.imag());
  d -= n * tau;
  d -= std::round(d.real());
  Complex<Real> best = d;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) {
      const Complex<Real> c = d + Real(a) + Real(b) * tau;
      if (std::abs(c) < std::abs(best)) best = c;
    }
  return best;
}

// Reduce z into the parallelogram s, t in [0, 1) where z = s + t tau.
template <typename Real>
Complex<Real> reduce_to_fundamental(Complex<Real> z, Complex<Real> tau) {
  const Real t = z.imag() / tau.imag();
  z -= std::floor(t) * tau;
  z -= std::floor(z.real() - (z.imag() / tau.imag()) * tau.real());
  return z;
}

template <typename Real>
std::array<Complex<Real>, 3> gsq_zeros(Complex<Real>) {
  return {Complex<Real>(0), Complex<Real>(Real(1) / 3), Complex<Real>(Real(2) / 3)};
}

template <typename Real>
std::array<Complex<Real>, 3> gsq_poles(Complex<Real> tau) {
  const Complex<Real> p = tau / Real(3);
  return {p, p + Real(1) / 3, p + Real(2) / 3};
}

template <typename Real>
void check_not_pole(Complex<Real> z, Complex<Real> tau) {
  for (const auto& p : gsq_poles(tau))
    if (std::abs(lattice_reduce_near_zero(z - p, tau)) < Real(kPoleExclusion))
      throw PoleError("gsq: evaluation at a pole", cd(double(p.real()), double(p.imag())));
}

template <typename Real>
Complex<Real> lopez_ros_factor(Complex<Real> tau) {
  const Real pi = std::numbers::pi_v<Real>;
  return -std::exp(Complex<Real>(0, -pi / 3) * tau);
}

template <typename Real>
Complex<Real> gsq(Complex<Real> z, Complex<Real> tau) {
  Nome<Real> nome(tau);
  check_not_pole(z, tau);
  const Complex<Real> w = reduce_to_fundamental(z, tau);
  const Real pi = std::numbers::pi_v<Real>;
  const Complex<Real> t3 = Real(3) * tau;
  return lopez_ros_factor(tau) * std::exp(Complex<Real>(0, 2 * pi) * w) * theta(Real(3) * w, t3) /
         theta(Real(3) * w - tau, t3);
}

enum class BranchKind { none = 0, zero = 1, pole = -1 };

// G^2(e + delta) for a branch point e, with the vanishing theta factor evaluated at 3 delta so that
// small offsets keep full relative accuracy.
template <typename Real>
Complex<Real> gsq_near(Complex<Real> e, Complex<Real> delta, Complex<Real> tau, BranchKind kind) {
  if (kind == BranchKind::none) return gsq(e + delta, tau);
  if (delta == Complex<Real>(0)) {
    if (kind == BranchKind::zero) return Complex<Real>(0);
    throw PoleError("gsq: evaluation at a pole", cd(double(e.real()), double(e.imag())));
  }
  const Real pi = std::numbers::pi_v<Real>;
  const Complex<Real> t3 = Real(3) * tau;
  const Complex<Real> z = e + delta;
  const Complex<Real> base = Real(3) * e - (kind == BranchKind::pole ? tau : Complex<Real>(0));
  const long nn = std::lround(base.imag() / t3.imag());
  const long mm = std::lround((base - Real(nn) * t3).real());
  const Complex<Real> small = theta_quasi_shift(Real(3) * delta, mm, nn, t3) * theta(Real(3) * delta, t3);
  const Complex<Real> pre = lopez_ros_factor(tau) * std::exp(Complex<Real>(0, 2 * pi) * z);
  if (kind == BranchKind::zero) return pre * small / theta(Real(3) * z - tau, t3);
  return pre * theta(Real(3) * z, t3) / small;
}

// d/dz log G^2.
template <typename Real>
Complex<Real> gsq_log_derivative(Complex<Real> z, Complex<Real> tau) {
  const Complex<Real> w = reduce_to_fundamental(z, tau);
  const Real pi = std::numbers::pi_v<Real>;
  const Complex<Real> t3 = Real(3) * tau;
  const auto a = theta_eval(Real(3) * w, t3, true);
  const auto b = theta_eval(Real(3) * w - tau, t3, true);
  return Complex<Real>(0, 2 * pi) + Real(3) * a.derivative / a.value - Real(3) * b.derivative / b.value;
}

template <typename Real>
Complex<Real> gsq_product_unnormalized(Complex<Real> w, Complex<Real> tau) {
  const Real third = Real(1) / 3;
  const Complex<Real> num = theta(w, tau) * theta(w - third, tau) * theta(w + third, tau);
  const Complex<Real> den = theta(w + Real(2) * tau / Real(3), tau) *
                            theta(w - tau / Real(3) - third, tau) *
                            theta(w - tau / Real(3) + third, tau);
  return num / den;
}

template <typename Real>
Complex<Real> gsq_product_form(Complex<Real> z, Complex<Real> tau) {
  Nome<Real> nome(tau);
  check_not_pole(z, tau);
  const Complex<Real> w = reduce_to_fundamental(z, tau);
  const Complex<Real> rho = Real(1) / gsq_product_unnormalized(tau / Real(6), tau);
  return rho * gsq_product_unnormalized(w, tau);
}

// Stereographic normal from the Gauss map value; g = infinity maps to the north pole.
template <typename Real>
std::array<Real, 3> normal_from_gauss(Complex<Real> g) {
  if (!std::isfinite(std::abs(g))) return {0, 0, 1};
  const Real n2 = std::norm(g);
  return {2 * g.real() / (n2 + 1), 2 * g.imag() / (n2 + 1), (n2 - 1) / (n2 + 1)};
}

struct BranchedTorus {
  cd tau;

  explicit BranchedTorus(cd t);

  std::array<cd, 6> branch_points() const;
  std::array<std::pair<cd, cd>, 3> cuts() const;

  // z = s + t tau.
  std::pair<double, double> strip_coords(cd z) const;
  cd from_strip(double s, double t) const { return s + t * tau; }

  bool is_three_division(cd p, double tol = 1e-12) const;
  double distance_to_branch_points(cd z) const;
  BranchKind branch_kind(cd z, double tol = 1e-12) const;

  // Number of cut translates crossed by the straight segment a -> b in the plane.
  int cut_crossings(cd a, cd b) const;
};

struct TorusSample {
  cd z;
  int sheet = 0;
};

struct TorusPath {
  std::vector<TorusSample> samples;
  double max_step = 0.01;

  // Samples a polyline with spacing <= max_step; sheet flips at each cut crossing.
  static TorusPath polyline(const BranchedTorus& bt, const std::vector<cd>& vertices,
                            int start_sheet, double max_step);
  static TorusPath circle(const BranchedTorus& bt, cd center, double radius, int n, int start_sheet);
};

// Square-root continuation of G along the path; seed^2 = gsq(path start).
std::vector<cd> continue_G(const TorusPath& path, cd tau, cd seed);

// One continuation leg a -> b starting from g_a; adaptive steps keep the G^2 jump below 0.2.
cd continue_G_segment(cd a, cd b, cd tau, cd g_a, double exclusion = kBranchExclusion);

// G on sheet 0: the continuation from G(tau/6) = 1 along a path inside the cut strips.
cd gauss_sheet0(cd z, cd tau);

// Critical points of G^2 (branch points of the Gauss map), reduced to the fundamental parallelogram.
std::vector<cd> gauss_flat_points(cd tau);

// Winding number of G^2 around a small circle (argument principle).
int gsq_winding(cd center, double radius, cd tau, int n = 256);

}  // namespace ght

#endif
