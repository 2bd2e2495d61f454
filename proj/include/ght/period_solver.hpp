#ifndef GHT_PERIOD_SOLVER_HPP
#define GHT_PERIOD_SOLVER_HPP

#include <utility>
#include <vector>

#include "ght/quadrature.hpp"

namespace ght {

// Omega_t = { Im tau > 0, 0 < Re tau < 1, |tau - 1/3| > 1/3, |tau - 2/3| > 1/3 }.
struct SearchDomain {
  static bool contains(cd tau);
  // Height of the upper boundary formed by the two arcs at the given Re tau.
  static double arc_height(double re);
  static std::pair<double, double> default_bracket(double re);
};

struct PeriodDiagnostics {
  cd tau{0};
  cd psi{0};
  cd psi_inv{0};  // integral of dz / G over the same segment
  double theta_h = 0;
  double theta_v = 0;
  double residual = 0;  // theta_h - theta_v wrapped to (-pi, pi]
};

double wrap_angle(double a);

// psi(tau) = integral of G dz from 0 to tau/3, G(tau/6) = +1.
cd psi(cd tau);
double theta_v(cd tau);
double theta_h(cd tau);
PeriodDiagnostics period_diagnostics(cd tau);

struct SolveReport {
  PeriodDiagnostics root;
  std::vector<PeriodDiagnostics> roots;
  bool multi_root_warning = false;
  int iterations = 0;
};

SolveReport solve_im(double re_tau, std::pair<double, double> bracket, double tol = 1e-9);
SolveReport solve_im(double re_tau, double tol = 1e-9);

struct CurveTrace {
  std::vector<PeriodDiagnostics> points;
  bool multi_root_warning = false;
  double max_reflection_asymmetry = 0;  // diagnostic only
};

CurveTrace trace_curve(const std::vector<double>& re_samples, double tol = 1e-9);

}  // namespace ght

#endif
