#include "ght/immersion.hpp"

#include <algorithm>
#include <cmath>

namespace ght {

namespace {
const double pi = std::numbers::pi;

struct Leg {
  Vec3 dx = Vec3::Zero();
  cd g_end{0};
};

Leg leg(const WeierstrassData& d, cd a, cd b, cd g_a) {
  if (a == b) return {Vec3::Zero(), g_a};
  const GIntegrals r = integrate_g_segment(d.tau, a, b, g_a, SeedAt::start);
  return {weierstrass_increment(d, r.int_g, r.int_ginv, b - a), r.g_end};
}

// Raw immersion on sheet 0 with X(0) = 0, z already reduced.
PatchSample immerse_raw(cd w, const WeierstrassData& d) {
  const BranchedTorus bt(d.tau);
  const cd p0 = d.tau / 6.0;
  // 0 -> tau/6 is integrated backwards from the seed G(tau/6) = 1.
  const GIntegrals first = integrate_g_segment(d.tau, p0, 0.0, 1.0, SeedAt::start);
  Vec3 x = -weierstrass_increment(d, first.int_g, first.int_ginv, -p0);
  auto [s, t] = bt.strip_coords(w);
  const int k = std::clamp(int(std::floor(3 * s)), 0, 2);
  const double sc = (k + 0.5) / 3;
  const cd p1 = bt.from_strip(sc, 1.0 / 6), p2 = bt.from_strip(sc, t);
  Leg l1 = leg(d, p0, p1, 1.0);
  Leg l2 = leg(d, p1, p2, l1.g_end);
  Leg l3 = leg(d, p2, w, l2.g_end);
  x += l1.dx + l2.dx + l3.dx;
  PatchSample out;
  out.z = w;
  out.position = x;
  out.gauss_map_value = l3.g_end;
  return out;
}

}  // namespace

WeierstrassData WeierstrassData::on_curve(double re_tau, double tol) {
  WeierstrassData d;
  d.tau = solve_im(re_tau, tol).root.tau;
  d.theta = theta_v(d.tau);
  return d;
}

Vec3 weierstrass_increment(const WeierstrassData& d, cd int_g, cd int_ginv, cd dz) {
  const cd rot = d.scale * std::exp(cd(0, -d.theta));
  return {(0.5 * rot * (int_ginv - int_g)).real(), (0.5 * cd(0, 1) * rot * (int_ginv + int_g)).real(),
          (rot * dz).real()};
}

PatchSample immerse_sample(cd z, int sheet, const WeierstrassData& d) {
  if (sheet != 0 && sheet != 1) throw DomainError("immerse: sheet must be 0 or 1");
  if (!(d.scale > 0)) throw DomainError("immerse: scale must be positive");
  const cd w = reduce_to_fundamental(z, d.tau);
  PatchSample out = immerse_raw(w, d);
  out.sheet = sheet;
  if (sheet == 1) {
    // G -> -G on the other sheet; the sheets meet at the branch point 0, so only the part of the
    // path beyond it changes: horizontal components flip sign.
    out.position.x() = -out.position.x();
    out.position.y() = -out.position.y();
    out.gauss_map_value = -out.gauss_map_value;
  }
  if (d.base_point != cd(0)) out.position -= immerse_raw(reduce_to_fundamental(d.base_point, d.tau), d).position;
  return out;
}

Vec3 immerse(cd z, int sheet, const WeierstrassData& d) { return immerse_sample(z, sheet, d).position; }

RigidMotion ScrewSymmetry::motion() const {
  const Mat3 R = rotation_z(angle);
  Vec3 t = axis_point - R * axis_point;
  t.z() += shift;
  return {R, t};
}

ScrewSymmetry screw_symmetry(const WeierstrassData& d) {
  // On sheet 0, G(z + 1/3) = e^{-2 i pi/3} G(z); composing the shift with the sheet swap gives
  // X(z + 1/3, sheet 1) = R X(z, sheet 0) + b with R the +60 deg rotation.
  const Vec3 x0 = immerse(0.0, 0, d);
  const Vec3 x1 = immerse(1.0 / 3, 1, d);
  ScrewSymmetry s;
  s.angle = pi / 3;
  const Mat3 R = rotation_z(s.angle);
  const Vec3 b = x1 - R * x0;
  const Eigen::Matrix2d A = Eigen::Matrix2d::Identity() - R.topLeftCorner<2, 2>();
  const Eigen::Vector2d p = A.lu().solve(b.head<2>());
  s.axis_point = Vec3(p.x(), p.y(), 0);
  s.shift = b.z();
  return s;
}

CellLattice lattice_from_data(const WeierstrassData& d, double tol) {
  const cd g = gauss_sheet0(1.0 / 6, d.tau);
  const GIntegrals r = integrate_g_segment(d.tau, 1.0 / 6, 1.0 / 6 + d.tau, g, SeedAt::start);
  const Vec3 cvec = weierstrass_increment(d, r.int_g, r.int_ginv, d.tau);
  const RigidMotion S = screw_symmetry(d).motion();
  // S^4 maps the patch to strip 1 of sheet 0; X(1/3) - S^4(X(0)) is minus the period of the loop z -> z + 1.
  const Vec3 L = immerse(1.0 / 3, 0, d) - S.pow(4)(immerse(0.0, 0, d));
  if (std::abs(cvec.z()) < 1e-12) throw AssemblyError("lattice: vertical period vanishes", 0);
  const double k = std::round(L.z() / cvec.z());
  Vec3 a1 = L - k * cvec;
  CellLattice out;
  out.closure_error = std::max(std::abs(a1.z()), cvec.head<2>().norm());
  if (out.closure_error > tol * d.scale)
    throw AssemblyError("lattice: periods do not close (period problem unsolved?)", out.closure_error);
  a1.z() = 0;
  const Vec3 c(0, 0, std::abs(cvec.z()));
  out.vectors.col(0) = a1;
  out.vectors.col(1) = rotation_z(2 * pi / 3) * a1;
  out.vectors.col(2) = c;
  out.a = a1.norm();
  out.c = c.z();
  return out;
}

RigidMotion RotationAxis::motion() const { return RigidMotion::rotation(point, direction, pi); }

std::vector<RotationAxis> order2_axes(const WeierstrassData& d) {
  std::vector<RotationAxis> out;
  for (cd z : {d.tau / 6.0, d.tau / 6.0 + 1.0 / 6, 2.0 * d.tau / 3.0}) {
    const PatchSample p = immerse_sample(z, 0, d);
    RotationAxis ax;
    ax.z = z;
    ax.point = p.position;
    const cd g = p.gauss_map_value;
    ax.direction = Vec3(g.real(), g.imag(), 0).normalized();
    out.push_back(ax);
  }
  return out;
}

std::vector<double> graded_nodes(double lo, double hi, int uniform_cells, double ratio, int levels) {
  if (uniform_cells < 2 || uniform_cells % 2) throw DomainError("graded_nodes: uniform cell count must be even");
  if (!(ratio > 0 && ratio < 1) || levels < 0) throw DomainError("graded_nodes: need 0 < ratio < 1 and levels >= 0");
  const int n = uniform_cells + 2 * levels;
  // Steps from either end: h ratio^levels, ..., h ratio, then h.
  std::vector<double> steps(n / 2, 1.0);
  for (int k = 0; k < levels; ++k) steps[k] = std::pow(ratio, levels - k);
  double total = 0;
  for (double st : steps) total += st;
  const double h = 0.5 * (hi - lo) / total;
  std::vector<double> x(n + 1);
  x[0] = lo;
  for (int k = 1; k <= n / 2; ++k) x[k] = x[k - 1] + h * steps[k - 1];
  for (int k = 0; k < n / 2; ++k) x[n - k] = hi - (x[k] - lo);
  x[n / 2] = 0.5 * (lo + hi);
  return x;
}

namespace {

int even_cells(double v) { return std::max(2, 2 * int(std::lround(v / 2))); }

}  // namespace

PatchGrid patch_grid(const WeierstrassData& d, int n_u, int n_v) {
  if (n_u < 16 || n_v < 16)
    throw RefinementError("build_patch: grid too coarse to keep continuation steps bounded (need n >= 16)");
  PatchGrid g;
  g.s = graded_nodes(0, 1.0 / 3, even_cells(n_u / 3.0 - 4));
  g.t = graded_nodes(0, 1.0 / 3, even_cells(n_v / 3.0 - 4));
  g.j_third = int(g.t.size()) - 1;
  const auto upper = graded_nodes(1.0 / 3, 1, even_cells(2 * n_v / 3.0 - 4));
  g.t.insert(g.t.end(), upper.begin() + 1, upper.end());
  g.ns = int(g.s.size()) - 1;
  g.nt = int(g.t.size()) - 1;
  g.z.resize(size_t(g.ns + 1) * (g.nt + 1));
  for (int j = 0; j <= g.nt; ++j)
    for (int i = 0; i <= g.ns; ++i) g.z[size_t(j) * (g.ns + 1) + i] = g.s[i] + g.t[j] * d.tau;
  return g;
}

PeriodicMesh build_patch(const WeierstrassData& d, int n_u, int n_v) {
  const PatchGrid grid = patch_grid(d, n_u, n_v);
  const int ns = grid.ns, nt = grid.nt, j_third = grid.j_third;
  const int j_seed = j_third / 2, j_mid2 = (j_third + nt) / 2;
  auto id = [&](int i, int j) { return j * (ns + 1) + i; };
  auto zof = [&](int i, int j) { return grid.node(i, j); };
  const int nv = (ns + 1) * (nt + 1);
  std::vector<Vec3> X(nv, Vec3::Zero());
  std::vector<cd> G(nv, 0.0);
  auto step = [&](int i0, int j0, int i1, int j1) {
    const Leg l = leg(d, zof(i0, j0), zof(i1, j1), G[id(i0, j0)]);
    X[id(i1, j1)] = X[id(i0, j0)] + l.dx;
    G[id(i1, j1)] = l.g_end;
  };
  // Seed row through tau/6 (G = 1), then interior columns, then the cut columns from their
  // interior neighbours so that branch vertices are only ever segment endpoints.
  G[id(0, j_seed)] = 1.0;
  for (int i = 0; i < ns; ++i) step(i, j_seed, i + 1, j_seed);
  for (int i = 1; i < ns; ++i) {
    for (int j = j_seed; j < nt; ++j) step(i, j, i, j + 1);
    for (int j = j_seed; j > 0; --j) step(i, j, i, j - 1);
  }
  for (int j = 0; j <= nt; ++j) {
    if (j != j_seed) {
      step(1, j, 0, j);
      step(ns - 1, j, ns, j);
    }
  }
  Vec3 origin = X[id(0, 0)];
  if (d.base_point != cd(0)) origin += immerse_raw(reduce_to_fundamental(d.base_point, d.tau), d).position;

  PeriodicMesh m;
  m.vertices.resize(3, nv);
  m.tags.assign(nv, 0);
  m.param.resize(nv);
  m.sheet.assign(nv, 0);
  for (int j = 0; j <= nt; ++j)
    for (int i = 0; i <= ns; ++i) {
      const int v = id(i, j);
      m.vertices.col(v) = X[v] - origin;
      m.param[v] = zof(i, j);
      if (i == 0 || i == ns || j == 0 || j == nt) m.tags[v] |= kTagSeam;
    }
  for (int i : {0, ns})
    for (int j : {0, j_third, nt}) m.tags[id(i, j)] |= kTagBranch;
  for (int v : {id(0, j_seed), id(ns / 2, j_seed), id(0, j_mid2)}) m.tags[v] |= kTagCenter;
  for (cd f : gauss_flat_points(d.tau)) {
    const double t = f.imag() / d.tau.imag(), s = f.real() - t * d.tau.real();
    if (s < 0 || s >= 1.0 / 3) continue;
    int best = 0;
    for (int v = 0; v < nv; ++v)
      if (std::abs(m.param[v] - f) < std::abs(m.param[best] - f)) best = v;
    m.tags[best] |= kTagFlat;
  }
  try {
    m.lattice = lattice_from_data(d).vectors;
  } catch (const AssemblyError&) {
    // Unsolved period problem: the patch is still valid, only not periodic.
  }
  // Split each cell along its shorter diagonal.
  const bool anti = d.tau.real() >= 0;
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < ns; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i, j + 1), e = id(i + 1, j + 1);
      if (anti) {
        m.add_triangle(a, b, c);
        m.add_triangle(b, e, c);
      } else {
        m.add_triangle(a, b, e);
        m.add_triangle(a, e, c);
      }
    }
  return m;
}

double intrinsic_length(const WeierstrassData& d, cd a, cd b, cd g_a) {
  const auto& gl = gauss_legendre_20();
  const int panels = 8;
  double sum = 0;
  cd g = g_a, z = a;
  for (int p = 0; p < panels; ++p) {
    const cd z0 = a + (b - a) * (double(p) / panels);
    for (size_t k = 0; k < gl.nodes.size(); ++k) {
      const cd zk = z0 + (b - a) * (gl.nodes[k] / panels);
      g = continue_G_segment(z, zk, d.tau, g, 0);
      z = zk;
      sum += gl.weights[k] * 0.5 * (std::abs(g) + 1 / std::abs(g));
    }
  }
  return sum / panels * std::abs(b - a) * d.scale;
}

}  // namespace ght
