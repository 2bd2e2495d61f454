#include "ght/period_solver.hpp"

#include <algorithm>
#include <cmath>

namespace ght {

namespace {
const double pi = std::numbers::pi;
}

bool SearchDomain::contains(cd tau) {
  return tau.imag() > 0 && tau.real() > 0 && tau.real() < 1 && std::abs(tau - 1.0 / 3) > 1.0 / 3 &&
         std::abs(tau - 2.0 / 3) > 1.0 / 3;
}

double SearchDomain::arc_height(double re) {
  double h = 0;
  for (double c : {1.0 / 3, 2.0 / 3}) {
    const double d = 1.0 / 9 - (re - c) * (re - c);
    if (d > 0) h = std::max(h, std::sqrt(d));
  }
  return h;
}

std::pair<double, double> SearchDomain::default_bracket(double re) { return {arc_height(re) + 1e-3, 10.0}; }

double wrap_angle(double a) {
  a = std::remainder(a, 2 * pi);
  if (a <= -pi) a += 2 * pi;
  return a;
}

cd psi(cd tau) { return integrate_g_segment(tau, 0.0, tau / 3.0, 1.0, SeedAt::midpoint).int_g; }

double theta_v(cd tau) {
  if (tau == cd(1.0)) throw DomainError("theta_v: tau = 1");
  return wrap_angle(std::arg(tau - 1.0) - pi / 2);
}

double theta_h(cd tau) { return std::arg(psi(tau)); }

PeriodDiagnostics period_diagnostics(cd tau) {
  const GIntegrals gi = integrate_g_segment(tau, 0.0, tau / 3.0, 1.0, SeedAt::midpoint);
  PeriodDiagnostics d;
  d.tau = tau;
  d.psi = gi.int_g;
  d.psi_inv = gi.int_ginv;
  d.theta_h = std::arg(d.psi);
  d.theta_v = theta_v(tau);
  d.residual = wrap_angle(d.theta_h - d.theta_v);
  return d;
}

namespace {

PeriodDiagnostics bisect(double re, double lo, double hi, double rlo, double tol, int& iterations) {
  PeriodDiagnostics best = period_diagnostics(cd(re, lo));
  for (int it = 0; it < 60; ++it) {
    ++iterations;
    const double mid = 0.5 * (lo + hi);
    const PeriodDiagnostics d = period_diagnostics(cd(re, mid));
    if (std::abs(d.residual) < std::abs(best.residual) || it == 0) best = d;
    if (std::abs(d.residual) < tol && hi - lo < 1e-12 * std::max(1.0, mid)) return d;
    if ((d.residual < 0) == (rlo < 0)) {
      lo = mid;
      rlo = d.residual;
    } else {
      hi = mid;
    }
  }
  return best;
}

}  // namespace

SolveReport solve_im(double re, std::pair<double, double> bracket, double tol) {
  if (!(re > 0 && re < 1)) throw DomainError("solve_im: Re tau must lie in (0, 1)");
  auto [lo, hi] = bracket;
  if (!(lo < hi) || !SearchDomain::contains(cd(re, lo)) || !SearchDomain::contains(cd(re, hi)))
    throw DomainError("solve_im: bracket must lie inside Omega_t");
  // Scan on a geometric grid to detect every sign change.
  const int n = 24;
  std::vector<double> ims(n + 1), res(n + 1);
  for (int k = 0; k <= n; ++k) {
    ims[k] = lo * std::pow(hi / lo, double(k) / n);
    res[k] = period_diagnostics(cd(re, ims[k])).residual;
  }
  SolveReport rep;
  for (int k = 0; k < n; ++k) {
    if ((res[k] < 0) == (res[k + 1] < 0)) continue;
    // Ignore the +-pi wrap discontinuity.
    if (std::abs(res[k] - res[k + 1]) > pi) continue;
    rep.roots.push_back(bisect(re, ims[k], ims[k + 1], res[k], tol, rep.iterations));
  }
  if (rep.roots.empty()) throw BracketingError("solve_im: no sign change of the residual in the bracket");
  rep.multi_root_warning = rep.roots.size() > 1;
  rep.root = rep.roots.front();
  if (std::abs(rep.root.residual) >= tol) throw NumericError("solve_im: bisection did not reach the tolerance");
  return rep;
}

SolveReport solve_im(double re, double tol) { return solve_im(re, SearchDomain::default_bracket(re), tol); }

CurveTrace trace_curve(const std::vector<double>& re_samples, double tol) {
  CurveTrace out;
  for (size_t i = 0; i < re_samples.size(); ++i) {
    const double re = re_samples[i];
    if (!(re > 0 && re < 1)) throw DomainError("trace_curve: samples must lie in (0, 1)");
    const auto [dlo, dhi] = SearchDomain::default_bracket(re);
    SolveReport rep;
    bool done = false;
    if (!out.points.empty()) {
      const double prev = out.points.back().tau.imag();
      for (double delta = 0.05; delta < 10 && !done; delta *= 2) {
        const double lo = std::max(dlo, prev - delta), hi = std::min(dhi, prev + delta);
        const PeriodDiagnostics a = period_diagnostics(cd(re, lo)), b = period_diagnostics(cd(re, hi));
        if ((a.residual < 0) != (b.residual < 0) && std::abs(a.residual - b.residual) < pi) {
          rep = solve_im(re, {lo, hi}, tol);
          done = true;
        }
        if (lo == dlo && hi == dhi) break;
      }
    }
    if (!done) rep = solve_im(re, {dlo, dhi}, tol);
    if (rep.multi_root_warning) out.multi_root_warning = true;
    PeriodDiagnostics chosen = rep.root;
    if (!out.points.empty()) {
      const cd prev = out.points.back().tau;
      for (const auto& r : rep.roots)
        if (std::abs(r.tau - prev) < std::abs(chosen.tau - prev)) chosen = r;
      const double spacing = std::abs(re - re_samples[i - 1]);
      if (std::abs(chosen.tau - prev) > 5 * spacing)
        throw NumericError("trace_curve: consecutive roots farther apart than 5x the sample spacing");
    }
    out.points.push_back(chosen);
  }
  for (size_t i = 0; i < out.points.size(); ++i)
    for (size_t j = 0; j < out.points.size(); ++j)
      if (std::abs(out.points[i].tau.real() + out.points[j].tau.real() - 1) < 1e-9) {
        const double a = out.points[i].tau.imag(), b = out.points[j].tau.imag();
        out.max_reflection_asymmetry = std::max(out.max_reflection_asymmetry, std::abs(a - b) / std::max(a, b));
      }
  return out;
}

}  // namespace ght
