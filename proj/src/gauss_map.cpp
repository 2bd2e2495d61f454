#include "ght/gauss_map.hpp"

#include <algorithm>
#include <limits>

namespace ght {

namespace {

double frac(double x) { return x - std::floor(x); }

double point_segment_distance(cd p, cd a, cd b) {
  const cd d = b - a;
  const double len2 = std::norm(d);
  double lam = len2 > 0 ? ((p - a) * std::conj(d)).real() / len2 : 0.0;
  lam = std::clamp(lam, 0.0, 1.0);
  return std::abs(a + lam * d - p);
}

}  // namespace

BranchedTorus::BranchedTorus(cd t) : tau(t) { Nome<double> check(t); }

std::array<cd, 6> BranchedTorus::branch_points() const {
  const auto z = gsq_zeros(tau);
  const auto p = gsq_poles(tau);
  return {z[0], z[1], z[2], p[0], p[1], p[2]};
}

std::array<std::pair<cd, cd>, 3> BranchedTorus::cuts() const {
  std::array<std::pair<cd, cd>, 3> c;
  for (int k = 0; k < 3; ++k) c[k] = {tau / 3.0 + k / 3.0, tau + k / 3.0};
  return c;
}

std::pair<double, double> BranchedTorus::strip_coords(cd z) const {
  const double t = z.imag() / tau.imag();
  return {z.real() - t * tau.real(), t};
}

bool BranchedTorus::is_three_division(cd p, double tol) const {
  return std::abs(lattice_reduce_near_zero(3.0 * p, tau)) < tol;
}

double BranchedTorus::distance_to_branch_points(cd z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const cd& p : branch_points()) d = std::min(d, std::abs(lattice_reduce_near_zero(z - p, tau)));
  return d;
}

BranchKind BranchedTorus::branch_kind(cd z, double tol) const {
  for (const cd& p : gsq_zeros(tau))
    if (std::abs(lattice_reduce_near_zero(z - p, tau)) < tol) return BranchKind::zero;
  for (const cd& p : gsq_poles(tau))
    if (std::abs(lattice_reduce_near_zero(z - p, tau)) < tol) return BranchKind::pole;
  return BranchKind::none;
}

int BranchedTorus::cut_crossings(cd a, cd b) const {
  const auto [s0, t0] = strip_coords(a);
  const auto [s1, t1] = strip_coords(b);
  if (s0 == s1) return 0;
  const int j0 = int(std::floor(3 * std::min(s0, s1))) - 1;
  const int j1 = int(std::ceil(3 * std::max(s0, s1))) + 1;
  int count = 0;
  for (int j = j0; j <= j1; ++j) {
    const double sj = j / 3.0;
    // Points on a cut line belong to the strip on its right.
    if ((s0 >= sj) == (s1 >= sj)) continue;
    const double lam = (sj - s0) / (s1 - s0);
    const double tf = frac(t0 + lam * (t1 - t0));
    if (tf > 1.0 / 3 && tf < 1.0) ++count;
  }
  return count;
}

TorusPath TorusPath::polyline(const BranchedTorus& bt, const std::vector<cd>& vertices, int start_sheet,
                              double max_step) {
  TorusPath path;
  path.max_step = max_step;
  if (vertices.empty()) return path;
  path.samples.push_back({vertices.front(), start_sheet});
  for (size_t i = 1; i < vertices.size(); ++i) {
    const cd a = vertices[i - 1], b = vertices[i];
    const int n = std::max(1, int(std::ceil(std::abs(b - a) / max_step * (1 + 1e-12))));
    for (int k = 1; k <= n; ++k) {
      const cd z = a + (b - a) * (double(k) / n);
      const TorusSample& prev = path.samples.back();
      const int sheet = (prev.sheet + bt.cut_crossings(prev.z, z)) % 2;
      path.samples.push_back({z, sheet});
    }
  }
  return path;
}

TorusPath TorusPath::circle(const BranchedTorus& bt, cd center, double radius, int n, int start_sheet) {
  std::vector<cd> pts;
  for (int k = 0; k <= n; ++k) pts.push_back(center + radius * std::exp(cd(0, 2 * std::numbers::pi * k / n)));
  const double chord = 2 * radius * std::sin(std::numbers::pi / n);
  return polyline(bt, pts, start_sheet, chord * (1 + 1e-9));
}

cd continue_G_segment(cd a, cd b, cd tau, cd g_a, double exclusion) {
  const BranchedTorus bt(tau);
  if (exclusion > 0) {
    // Exact segment-to-branch-point distance over nearby lattice translates.
    const auto [s0, t0] = bt.strip_coords(a);
    const auto [s1, t1] = bt.strip_coords(b);
    for (const cd& p : bt.branch_points())
      for (int n = int(std::floor(std::min(t0, t1))) - 1; n <= int(std::ceil(std::max(t0, t1))) + 1; ++n)
        for (int m = int(std::floor(std::min(s0, s1))) - 1; m <= int(std::ceil(std::max(s0, s1))) + 1; ++m)
          if (point_segment_distance(p + double(m) + double(n) * tau, a, b) < exclusion)
            throw ContinuationError("continue_G: path passes within the branch-point exclusion radius");
  }
  cd g = g_a;
  cd q_prev = g * g;
  double lam = 0, dl = std::min(1.0 / 8, 0.02 / std::max(std::abs(b - a), 1e-300));
  while (lam < 1) {
    dl = std::min(dl, 1 - lam);
    const double next = (lam + dl >= 1) ? 1.0 : lam + dl;
    const cd z = a + (b - a) * next;
    const cd q = gsq(z, tau);
    if (std::abs(q - q_prev) > 0.2 * std::abs(q_prev)) {
      dl *= 0.5;
      if (dl < 1e-15) throw StepRefinementError("continue_G: relative jump of G^2 cannot be bounded");
      continue;
    }
    const cd r = std::sqrt(q);
    g = (std::abs(r - g) <= std::abs(r + g)) ? r : -r;
    q_prev = q;
    lam = next;
    dl *= 1.5;
  }
  return g;
}

std::vector<cd> continue_G(const TorusPath& path, cd tau, cd seed) {
  std::vector<cd> out;
  if (path.samples.empty()) return out;
  const cd q0 = gsq(path.samples.front().z, tau);
  if (std::abs(seed * seed - q0) > 1e-8 * std::abs(q0))
    throw DomainError("continue_G: seed is not a square root of G^2 at the path start");
  const BranchedTorus bt(tau);
  if (bt.distance_to_branch_points(path.samples.front().z) < kBranchExclusion)
    throw ContinuationError("continue_G: path starts within the branch-point exclusion radius");
  out.push_back(seed);
  for (size_t i = 1; i < path.samples.size(); ++i)
    out.push_back(continue_G_segment(path.samples[i - 1].z, path.samples[i].z, tau, out.back()));
  return out;
}

cd gauss_sheet0(cd z, cd tau) {
  const BranchedTorus bt(tau);
  const cd w = reduce_to_fundamental(z, tau);
  switch (bt.branch_kind(w)) {
    case BranchKind::zero: return 0.0;
    case BranchKind::pole: return cd(std::numeric_limits<double>::infinity(), 0);
    default: break;
  }
  auto [s, t] = bt.strip_coords(w);
  const int k = std::clamp(int(std::floor(3 * s)), 0, 2);
  const double sc = (k + 0.5) / 3;
  const cd p0 = tau / 6.0;
  const cd p1 = bt.from_strip(sc, 1.0 / 6);
  const cd p2 = bt.from_strip(sc, t);
  cd g = continue_G_segment(p0, p1, tau, 1.0, 0);
  g = continue_G_segment(p1, p2, tau, g, 0);
  return continue_G_segment(p2, w, tau, g, 0);
}

int gsq_winding(cd center, double radius, cd tau, int n) {
  double total = 0;
  cd prev = gsq(center + radius, tau);
  for (int k = 1; k <= n; ++k) {
    const cd cur = gsq(center + radius * std::exp(cd(0, 2 * std::numbers::pi * k / n)), tau);
    total += std::arg(cur / prev);
    prev = cur;
  }
  return int(std::lround(total / (2 * std::numbers::pi)));
}

std::vector<cd> gauss_flat_points(cd tau) {
  const BranchedTorus bt(tau);
  std::vector<cd> found;
  const int grid = 12;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      cd z = bt.from_strip((i + 0.5) / grid, (j + 0.5) / grid);
      if (bt.distance_to_branch_points(z) < 0.02) continue;
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const double h = 1e-6;
        const cd L = gsq_log_derivative(z, tau);
        if (!std::isfinite(std::abs(L))) break;
        const cd dL = (gsq_log_derivative(z + h, tau) - gsq_log_derivative(z - h, tau)) / (2 * h);
        const cd step = L / dL;
        z -= step;
        if (bt.distance_to_branch_points(z) < 1e-3) break;
        if (std::abs(step) < 1e-14) {
          ok = true;
          break;
        }
      }
      if (!ok) continue;
      z = reduce_to_fundamental(z, tau);
      const bool dup = std::any_of(found.begin(), found.end(), [&](cd f) {
        return std::abs(lattice_reduce_near_zero(f - z, tau)) < 1e-8;
      });
      if (!dup) found.push_back(z);
    }
  if (found.size() != 6) throw NumericError("gauss_flat_points: expected 6 critical points of G^2");
  std::sort(found.begin(), found.end(), [&](cd a, cd b) {
    const auto [sa, ta] = bt.strip_coords(a);
    const auto [sb, tb] = bt.strip_coords(b);
    return sa != sb ? sa < sb : ta < tb;
  });
  return found;
}

}  // namespace ght
