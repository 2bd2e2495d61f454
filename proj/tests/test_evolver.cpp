#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "ght/evolver.hpp"
#include "ght/nets.hpp"

using ght::cd;
using ght::Offset;
using ght::Vec3;

namespace {
const double pi = std::numbers::pi;

ght::PeriodicMesh icosphere(int levels, double R) {
  const double p = (1 + std::sqrt(5.0)) / 2;
  std::vector<Vec3> v = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                         {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
  std::vector<Eigen::Vector3i> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back(0.5 * (v[a] + v[b]));
      return mid[key] = int(v.size()) - 1;
    };
    std::vector<Eigen::Vector3i> g;
    for (const auto& t : f) {
      const int a = midpoint(t[0], t[1]), b = midpoint(t[1], t[2]), c = midpoint(t[2], t[0]);
      g.emplace_back(t[0], a, c);
      g.emplace_back(t[1], b, a);
      g.emplace_back(t[2], c, b);
      g.emplace_back(a, b, c);
    }
    f = g;
  }
  ght::PeriodicMesh m;
  m.vertices.resize(3, Eigen::Index(v.size()));
  for (size_t i = 0; i < v.size(); ++i) m.vertices.col(Eigen::Index(i)) = R * v[i].normalized();
  for (const auto& t : f) m.add_triangle(t[0], t[1], t[2]);
  m.tags.assign(v.size(), 0);
  return m;
}

// Open cylinder of radius 1 between z = -h and z = h; boundary rings are the first and last rings.
ght::PeriodicMesh cylinder(int segments, int rings, double h) {
  ght::PeriodicMesh m;
  m.vertices.resize(3, segments * rings);
  for (int r = 0; r < rings; ++r)
    for (int k = 0; k < segments; ++k) {
      const double phi = 2 * pi * (k + 0.5 * (r % 2)) / segments;
      m.vertices.col(r * segments + k) = Vec3(std::cos(phi), std::sin(phi), -h + 2 * h * r / (rings - 1));
    }
  for (int r = 0; r + 1 < rings; ++r)
    for (int k = 0; k < segments; ++k) {
      const int a = r * segments + k, b = r * segments + (k + 1) % segments;
      const int c = (r + 1) * segments + k, d = (r + 1) * segments + (k + 1) % segments;
      if (r % 2 == 0) {
        m.add_triangle(a, b, c);
        m.add_triangle(b, d, c);
      } else {
        m.add_triangle(a, d, c);
        m.add_triangle(a, b, d);
      }
    }
  m.tags.assign(m.num_vertices(), 0);
  return m;
}

ght::PeriodicMesh small_tube() {
  return ght::tubular_mesh(ght::generate_qtz(1.0), 0.15, 8);
}
}  // namespace

TEST_CASE("willmore_energy: sphere gives 4 pi at any radius, a plane gives 0") {
  const auto s1 = icosphere(4, 1.0), s3 = icosphere(4, 3.0);
  const double e1 = ght::willmore_energy(s1), e3 = ght::willmore_energy(s3);
  CHECK(std::abs(e1 / (4 * pi) - 1) < 0.02);
  CHECK(std::abs(e1 - e3) < 1e-9 * e1);
  ght::PeriodicMesh plane;
  const int n = 6;
  plane.vertices.resize(3, n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) plane.vertices.col(j * n + i) = Vec3(double(i) / n, double(j) / n, 0.2);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      auto vid = [&](int a, int b) { return (b % n) * n + (a % n); };
      auto off = [&](int a, int b) { return Offset(a / n, b / n, 0); };
      plane.add_triangle(vid(i, j), vid(i + 1, j), vid(i, j + 1), off(i, j), off(i + 1, j), off(i, j + 1));
      plane.add_triangle(vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1), off(i + 1, j), off(i + 1, j + 1),
                         off(i, j + 1));
    }
  plane.lattice = ght::Mat3::Identity();
  CHECK(ght::willmore_energy(plane) < 1e-24);
  CHECK(ght::willmore_gradient(plane).norm() < 1e-12);
}

TEST_CASE("willmore_gradient: matches central differences and is translation invariant") {
  auto m = small_tube();
  std::mt19937 rng(5);
  std::normal_distribution<double> n01;
  for (int v = 0; v < m.num_vertices(); ++v) m.vertices.col(v) += 0.01 * Vec3(n01(rng), n01(rng), n01(rng));
  const auto g = ght::willmore_gradient(m);
  std::vector<int> pick;
  for (int v = 0; v < m.num_vertices(); v += 7) pick.push_back(v);
  const auto fd = ght::willmore_gradient_fd(m, 1e-6, pick);
  double num = 0, den = 0;
  for (int v : pick) {
    num = std::max(num, (g.col(v) - fd.col(v)).norm());
    den = std::max(den, g.col(v).norm());
  }
  CHECK(num / den < 1e-6);
  CHECK(g.rowwise().sum().norm() < 1e-9 * g.norm());
}

TEST_CASE("willmore_energy: invariant under rigid motions of mesh and lattice") {
  auto m = small_tube();
  const double e0 = ght::willmore_energy(m);
  const auto R = ght::RigidMotion::rotation(Vec3(0.3, -0.2, 0.1), Vec3(1, 2, 3).normalized(), 0.7);
  for (int v = 0; v < m.num_vertices(); ++v) m.vertices.col(v) = R(Vec3(m.vertices.col(v)));
  m.lattice = R.R * *m.lattice;
  CHECK(std::abs(ght::willmore_energy(m) - e0) < 1e-10 * e0);
}

TEST_CASE("subdivide: counts, topology and old vertices kept") {
  const auto m = small_tube();
  const auto top = ght::mesh_topology(m);
  const auto s = ght::subdivide(m);
  const auto ts = ght::mesh_topology(s);
  CHECK(s.num_vertices() == m.num_vertices() + top.edges);
  CHECK(s.num_triangles() == 4 * m.num_triangles());
  CHECK(ts.closed);
  CHECK(ts.oriented);
  CHECK(ts.euler == top.euler);
  CHECK((s.vertices.leftCols(m.num_vertices()) - m.vertices).norm() == 0);
  // Midpoints lie on the old surface.
  const ght::TriangleGrid grid(m);
  for (int v = m.num_vertices(); v < s.num_vertices(); v += 5) CHECK(grid.distance(s.vertices.col(v)) < 1e-12);
}

TEST_CASE("relax: catenoid between two fixed rings") {
  const double h = 0.4;
  auto m = cylinder(32, 13, h);
  ght::RelaxConfig cfg;
  cfg.fixed.assign(m.num_vertices(), false);
  for (int k = 0; k < 32; ++k) cfg.fixed[k] = cfg.fixed[12 * 32 + k] = true;
  cfg.max_iters = 3000;
  cfg.energy_tol = 1e-14;
  const auto st = ght::relax(m, cfg);
  for (size_t k = 1; k < st.trace.size(); ++k) CHECK(st.trace[k] <= st.trace[k - 1]);
  const auto H = ght::mean_curvature_field(st.mesh);
  double hmax = 0;
  for (int v = 0; v < st.mesh.num_vertices(); ++v)
    if (!cfg.fixed[v]) hmax = std::max(hmax, std::abs(H[v]));
  CHECK(hmax < 1e-3);
  // Waist of a cosh(z/a) through the rings: a cosh(h/a) = 1.
  double a = 0.9;
  for (int it = 0; it < 50; ++it) a -= (a * std::cosh(h / a) - 1) / (std::cosh(h / a) - h / a * std::sinh(h / a));
  double waist = 0;
  for (int k = 0; k < 32; ++k) waist += st.mesh.vertices.col(6 * 32 + k).head<2>().norm() / 32;
  CHECK(std::abs(waist - a) < 5e-3);
}

TEST_CASE("relax: energy of the qtz tube decreases monotonically") {
  ght::RelaxConfig cfg;
  cfg.max_iters = 30;
  const auto st = ght::relax(small_tube(), cfg);
  REQUIRE(st.trace.size() >= 2);
  for (size_t k = 1; k < st.trace.size(); ++k) CHECK(st.trace[k] <= st.trace[k - 1]);
  CHECK(st.trace.back() < 0.5 * st.trace.front());
  CHECK(*st.mesh.lattice == *small_tube().lattice);
}

TEST_CASE("hausdorff_distance: identity and a translated square") {
  ght::PeriodicMesh sq;
  sq.vertices.resize(3, 4);
  sq.vertices << 0, 1, 1, 0, 0, 0, 1, 1, 0, 0, 0, 0;
  sq.add_triangle(0, 1, 2);
  sq.add_triangle(0, 2, 3);
  CHECK(ght::hausdorff_distance(sq, sq) == 0);
  auto moved = sq;
  moved.vertices.row(0).array() += 1.0;
  CHECK(std::abs(ght::hausdorff_distance(sq, moved) - 1.0) < 1e-12);
}

TEST_CASE("cross_validate: recovers a rigidly moved and rescaled analytic cell") {
  const auto d = ght::WeierstrassData::on_curve(0.5);
  const auto cell = ght::build_unit_cell(d, 32);
  const auto screw = ght::screw_symmetry(d);
  // "Relaxed" copy: unit a, screw axis on the z axis, a1 along x, then a vertical shift.
  const double s = 1 / cell.lattice.a;
  const ght::Mat3 L = *cell.mesh.lattice;
  const double phi = -std::atan2(L(1, 0), L(0, 0));
  const ght::Mat3 R = ght::rotation_z(phi);
  ght::PeriodicMesh moved = cell.mesh;
  const Vec3 axis(screw.axis_point.x(), screw.axis_point.y(), 0);
  for (int v = 0; v < moved.num_vertices(); ++v)
    moved.vertices.col(v) = s * (R * (Vec3(cell.mesh.vertices.col(v)) - axis)) + Vec3(0, 0, 0.137);
  moved.lattice = s * R * L;
  const auto xv = ght::cross_validate(moved, cell.mesh, screw.axis_point);
  CHECK(xv.hausdorff < 1e-6);
  CHECK(std::abs(xv.c_over_a_relaxed - xv.c_over_a_analytic) < 1e-12);
  // A stretched lattice is not comparable.
  auto stretched = moved;
  stretched.vertices.row(2) *= 1.05;
  (*stretched.lattice).row(2) *= 1.05;
  CHECK_THROWS_AS(ght::cross_validate(stretched, cell.mesh, screw.axis_point), ght::IncomparableError);
}
