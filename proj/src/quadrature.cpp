#include "ght/quadrature.hpp"

#include <limits>
#include <optional>

namespace ght {

const GaussLegendre<double>& gauss_legendre_20() {
  static const GaussLegendre<double> rule(20);
  return rule;
}

namespace {

constexpr int kMaxDepth = 48;
constexpr double kMaxJump = 0.2;

struct PanelValue {
  cd ig{0}, iginv{0};
  cd f_end{0};
  bool ok = false;
};

// One half of a segment: z(u) = e + (m - e) u^2, u in [0, 1], with G = F u^k.
class HalfIntegrator {
 public:
  HalfIntegrator(cd tau, cd e, cd m, int k, double abs_tol)
      : tau_(tau), e_(e), d_(m - e), k_(k), abs_tol_(abs_tol) {}

  cd fsq(double u) const {
    const cd q = gsq_near(e_, d_ * (u * u), tau_, BranchKind(k_));
    if (k_ == 0) return q;
    return k_ > 0 ? q / (u * u) : q * (u * u);
  }

  static bool pick(cd q, cd& f, cd& q_prev) {
    if (!std::isfinite(std::abs(q)) || std::abs(q - q_prev) > kMaxJump * std::abs(q_prev)) return false;
    const cd r = std::sqrt(q);
    f = (std::abs(r - f) <= std::abs(r + f)) ? r : -r;
    q_prev = q;
    return true;
  }

  // Gauss-Legendre on [u0, u1] tracking F from its value f0 at u0 (u0 may exceed u1).
  PanelValue panel(double u0, double u1, cd f0) const {
    const auto& gl = gauss_legendre_20();
    const int n = int(gl.nodes.size());
    PanelValue out;
    cd f = f0, q_prev = f0 * f0;
    const double w = std::abs(u1 - u0);
    for (int j = 0; j < n; ++j) {
      const double x = gl.nodes[j];
      const double u = u0 + (u1 - u0) * x;
      if (!pick(fsq(u), f, q_prev)) return out;
      const double up = (k_ > 0) ? u * u : (k_ < 0 ? 1.0 : u);
      const double um = (k_ > 0) ? 1.0 : (k_ < 0 ? u * u : u);
      out.ig += gl.weights[j] * f * up;
      out.iginv += gl.weights[j] * um / f;
    }
    const double sgn = u1 > u0 ? 1.0 : -1.0;
    out.ig *= 2.0 * d_ * w * sgn;
    out.iginv *= 2.0 * d_ * w * sgn;
    if (u1 == 0 && k_ != 0) {
      out.f_end = std::numeric_limits<double>::quiet_NaN();
    } else {
      if (!pick(fsq(u1), f, q_prev)) return out;
      out.f_end = f;
    }
    out.ok = true;
    return out;
  }

  PanelValue adapt(double u0, double u1, cd f0, const PanelValue& coarse, int depth, int& panels) const {
    const double um = 0.5 * (u0 + u1);
    const PanelValue left = panel(u0, um, f0);
    PanelValue right;
    if (left.ok) right = panel(um, u1, left.f_end);
    if (coarse.ok && left.ok && right.ok) {
      const double err = std::abs(coarse.ig - left.ig - right.ig) + std::abs(coarse.iginv - left.iginv - right.iginv);
      const double floor = 1e-14 * (std::abs(left.ig + right.ig) + std::abs(left.iginv + right.iginv));
      if (err <= std::max(abs_tol_ * std::abs(u1 - u0), floor) || std::abs(u1 - u0) < 1e-15) {
        ++panels;
        return {left.ig + right.ig, left.iginv + right.iginv, right.f_end, true};
      }
    }
    if (depth >= kMaxDepth) throw QuadratureError("integrate_g_segment: adaptive panels did not converge", abs_tol_);
    const PanelValue l = adapt(u0, um, f0, left, depth + 1, panels);
    const bool reuse = right.ok && std::abs(l.f_end - left.f_end) <= 1e-6 * std::abs(left.f_end);
    const PanelValue r = adapt(um, u1, l.f_end, reuse ? right : PanelValue{}, depth + 1, panels);
    return {l.ig + r.ig, l.iginv + r.iginv, r.f_end, true};
  }

  PanelValue run(double u0, double u1, cd f0, int& panels) const {
    return adapt(u0, u1, f0, panel(u0, u1, f0), 0, panels);
  }

 private:
  cd tau_, e_, d_;
  int k_;
  double abs_tol_;
};

int kind_of(const BranchedTorus& bt, cd z) {
  return int(bt.branch_kind(z, 1e-12 * std::max(1.0, std::abs(bt.tau))));
}

}  // namespace

GIntegrals integrate_g_segment(cd tau, cd a, cd b, cd g_seed, SeedAt where, double rel_tol) {
  const BranchedTorus bt(tau);
  const int ka = kind_of(bt, a), kb = kind_of(bt, b);
  if (where == SeedAt::start && ka != 0)
    throw ContinuationError("integrate_g_segment: cannot seed G at a branch point");
  const cd m = 0.5 * (a + b);
  GIntegrals out;
  if (a == b) {
    out.g_mid = out.g_end = g_seed;
    return out;
  }
  // Scale for the absolute tolerance: |b - a| * max(|G|, 1/|G|) at the seed.
  const double gs = std::abs(g_seed);
  const double scale = std::abs(b - a) * std::max(gs, 1.0 / std::max(gs, 1e-300));
  const double abs_tol = rel_tol * std::max(scale, 1e-300);
  HalfIntegrator ha(tau, a, m, ka, abs_tol), hb(tau, b, m, kb, abs_tol);
  if (where == SeedAt::start) {
    const PanelValue A = ha.run(0.0, 1.0, g_seed, out.panels);
    out.g_mid = A.f_end;
    const PanelValue B = hb.run(1.0, 0.0, out.g_mid, out.panels);
    out.int_g = A.ig + B.ig;
    out.int_ginv = A.iginv + B.iginv;
    out.g_end = B.f_end;
  } else {
    out.g_mid = g_seed;
    const PanelValue A = ha.run(1.0, 0.0, g_seed, out.panels);
    const PanelValue B = hb.run(1.0, 0.0, g_seed, out.panels);
    // A runs m -> a; reverse it. B runs m -> b.
    out.int_g = -A.ig + B.ig;
    out.int_ginv = -A.iginv + B.iginv;
    out.g_end = B.f_end;
  }
  if (kb > 0) out.g_end = 0.0;
  if (kb < 0) out.g_end = cd(std::numeric_limits<double>::infinity(), 0);
  return out;
}

}  // namespace ght
