#include <doctest.h>

#include <random>

#include "ght/immersion.hpp"

using ght::cd;
using ght::Vec3;

namespace {
const double pi = std::numbers::pi;

const ght::WeierstrassData& mid_member() {
  static const ght::WeierstrassData d = ght::WeierstrassData::on_curve(0.5);
  return d;
}

ght::WeierstrassData catenoid_data() {
  ght::WeierstrassData d;
  d.tau = cd(0, 0.8);
  d.theta = pi / 2;
  return d;
}
}  // namespace

TEST_CASE("immerse: base point anchors the origin on both sheets") {
  const auto& d = mid_member();
  CHECK(ght::immerse(0.0, 0, d).norm() < 1e-14);
  CHECK(ght::immerse(0.0, 1, d).norm() < 1e-14);
  CHECK_THROWS_AS(ght::immerse(0.1, 2, d), ght::DomainError);
  ght::WeierstrassData shifted = d;
  shifted.base_point = 0.1 + 0.2 * d.tau;
  CHECK(ght::immerse(shifted.base_point, 0, shifted).norm() < 1e-12);
  const Vec3 diff = ght::immerse(0.2 + 0.5 * d.tau, 1, shifted) - ght::immerse(0.2 + 0.5 * d.tau, 1, d);
  CHECK((diff + ght::immerse(shifted.base_point, 0, d)).norm() < 1e-12);
}

TEST_CASE("immerse: period condition aligns X(0) and X(tau/3) vertically") {
  const auto& d = mid_member();
  const Vec3 x = ght::immerse(d.tau / 3.0, 0, d);
  CHECK(x.head<2>().norm() < 1e-6 * d.scale);
  // Height bookkeeping: Re(e^{-i theta} * 1) = 3 Re(e^{-i theta} tau / 3).
  const cd rot = std::exp(cd(0, -d.theta));
  CHECK(std::abs(rot.real() - 3 * (rot * d.tau / 3.0).real()) < 1e-9);
  CHECK(std::abs(3 * x.z() - std::cos(d.theta)) < 1e-9);
}

TEST_CASE("immerse: horizontal normal at the order-2 center tau/6") {
  const auto& d = mid_member();
  const auto p = ght::immerse_sample(d.tau / 6.0, 0, d);
  CHECK(std::abs(p.gauss_map_value - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(p.gauss_map_value) - 1) < 1e-12);
}

TEST_CASE("screw symmetry: X(z + 1/3, sheet 1) = S X(z, sheet 0)") {
  const auto& d = mid_member();
  const auto s = ght::screw_symmetry(d);
  const auto S = s.motion();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> us(0.02, 0.31), ut(0.02, 0.98);
  for (int k = 0; k < 20; ++k) {
    const cd z = us(rng) + ut(rng) * d.tau;
    const Vec3 lhs = ght::immerse(z + 1.0 / 3, 1, d), rhs = S(ght::immerse(z, 0, d));
    CHECK((lhs - rhs).norm() < 1e-9);
  }
  const auto lat = ght::lattice_from_data(d);
  CHECK(std::abs(s.shift - lat.c / 3) < 1e-9);
  // S^6 is the translation by 2c.
  const auto S6 = S.pow(6);
  CHECK((S6.R - ght::Mat3::Identity()).norm() < 1e-12);
  CHECK((S6.t - Vec3(0, 0, 2 * lat.c)).norm() < 1e-9);
}

TEST_CASE("lattice: hexagonal cell of the Re tau = 0.5 member") {
  const auto& d = mid_member();
  const auto lat = ght::lattice_from_data(d);
  CHECK(lat.closure_error < 1e-8);
  CHECK(std::abs(lat.a - 0.6964) < 2e-4);
  CHECK(std::abs(lat.c - 0.7311) < 2e-4);
  CHECK(std::abs(lat.c_over_a() - 1.0498) < 5e-4);
  CHECK(std::abs(lat.vectors.col(0).dot(lat.vectors.col(1)) + 0.5 * lat.a * lat.a) < 1e-12);
  ght::WeierstrassData off = d;
  off.theta += 0.05;
  CHECK_THROWS_AS(ght::lattice_from_data(off), ght::AssemblyError);
}

TEST_CASE("twisted catenoid: triangle boundaries in horizontal planes, hexagon with order-6 symmetry") {
  const auto d = catenoid_data();
  const Vec3 v0 = ght::immerse(0.0, 0, d), v1 = ght::immerse(1.0 / 3, 0, d), v2 = ght::immerse(2.0 / 3, 0, d);
  // Bottom triangle at height 0 closes and is equilateral.
  CHECK(std::abs((v1 - v0).norm() - (v2 - v1).norm()) < 1e-9);
  CHECK(std::abs((v2 - v0).norm() - (v2 - v1).norm()) < 1e-9);
  for (int k = 0; k <= 12; ++k) {
    const double s = k / 12.0;
    const Vec3 lo = ght::immerse(s, 0, d), hi = ght::immerse(s + d.tau / 3.0, 0, d);
    CHECK(std::abs(lo.z()) < 1e-12);
    CHECK(std::abs(hi.z() - d.tau.imag() / 3) < 1e-12);
    // The two boundary triangles are congruent.
    CHECK((hi - lo - Vec3(0, 0, d.tau.imag() / 3)).norm() < 1e-9);
  }
  // Hexagon: across the cut s = 1/3 (t > 1/3) the patch continues as its image under a +60 deg
  // rotation T about a vertical axis; along t < 1/3 it continues under a -120 deg rotation (triangle).
  const auto patch = ght::build_patch(d, 32, 32);
  const auto grid = ght::patch_grid(d, 32, 32);
  const int ns = int(grid.s.size()) - 1, nt = int(grid.t.size()) - 1;
  auto rotation_taking = [](const Vec3& p, const Vec3& q, double angle) {
    const ght::Mat3 R = ght::rotation_z(angle);
    const Eigen::Matrix2d A = Eigen::Matrix2d::Identity() - R.topLeftCorner<2, 2>();
    const Eigen::Vector2d c = A.lu().solve(q.head<2>() - R.topLeftCorner<2, 2>() * p.head<2>());
    return ght::RigidMotion::rotation(Vec3(c.x(), c.y(), 0), Vec3::UnitZ(), angle);
  };
  auto vert = [&](int i, int j) -> Vec3 { return patch.vertices.col(j * (ns + 1) + i); };
  const auto T6 = rotation_taking(vert(0, nt), vert(ns, nt), pi / 3);
  const auto T3 = rotation_taking(vert(0, 0), vert(ns, 0), -2 * pi / 3);
  double hex = 0, tri = 0;
  for (int j = 0; j <= nt; ++j) {
    const double t = grid.t[j];
    if (t >= 1.0 / 3) hex = std::max(hex, (T6(vert(0, j)) - vert(ns, j)).norm());
    if (t <= 1.0 / 3) tri = std::max(tri, (T3(vert(0, j)) - vert(ns, j)).norm());
  }
  CHECK(hex < 1e-5);
  CHECK(tri < 1e-5);
  CHECK((T6.pow(6)(vert(3, nt)) - vert(3, nt)).norm() < 1e-12);
  for (int i = 0; i <= ns; ++i) CHECK(std::abs(vert(i, nt).z() - d.tau.imag()) < 1e-9);
}

TEST_CASE("graded_nodes: symmetric geometric grading with midpoint node") {
  const auto x = ght::graded_nodes(0, 1.0 / 3, 10);
  REQUIRE(x.size() == 23);
  CHECK(x.front() == 0);
  CHECK(x.back() == 1.0 / 3);
  CHECK(x[11] == 1.0 / 6);
  for (size_t k = 1; k < x.size(); ++k) CHECK(x[k] > x[k - 1]);
  for (int k = 1; k < 6; ++k) CHECK(std::abs((x[k + 1] - x[k]) * 0.7 - (x[k] - x[k - 1])) < 1e-15);
  CHECK(std::abs(x[22] - x[21] - (x[1] - x[0])) < 1e-15);
  CHECK_THROWS_AS(ght::graded_nodes(0, 1, 3), ght::DomainError);
}

TEST_CASE("build_patch: counts, topology and tags") {
  const auto& d = mid_member();
  CHECK_THROWS_AS(ght::build_patch(d, 12, 32), ght::RefinementError);
  const auto grid = ght::patch_grid(d, 48, 48);
  const int ns = int(grid.s.size()) - 1, nt = int(grid.t.size()) - 1;
  const auto m = ght::build_patch(d, 48, 48);
  CHECK(m.num_vertices() == (ns + 1) * (nt + 1));
  CHECK(m.num_triangles() == 2 * ns * nt);
  const auto top = ght::mesh_topology(m);
  CHECK(top.euler == 1);
  CHECK(top.boundary_edges == 2 * (ns + nt));
  int flat = 0, branch = 0, center = 0;
  for (auto t : m.tags) {
    flat += (t & ght::kTagFlat) != 0;
    branch += (t & ght::kTagBranch) != 0;
    center += (t & ght::kTagCenter) != 0;
  }
  CHECK(flat == 2);
  CHECK(branch == 6);
  CHECK(center == 3);
  CHECK(ght::min_triangle_angle(m) > pi / 180);
}

TEST_CASE("build_patch: telescoped vertices agree with independent immerse paths") {
  const auto& d = mid_member();
  const auto m = ght::build_patch(d, 32, 32);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> pick(0, m.num_vertices() - 1);
  int checked = 0;
  for (int k = 0; k < 200 && checked < 60; ++k) {
    const int v = pick(rng);
    const cd z = m.param[v];
    const double t = z.imag() / d.tau.imag(), s = z.real() - t * d.tau.real();
    // The right cut column belongs to the next strip in immerse's convention.
    if (s > 1.0 / 3 - 1e-12 && t > 1.0 / 3) continue;
    if (t > 1 - 1e-12) continue;
    ++checked;
    CHECK((m.vertices.col(v) - ght::immerse(z, 0, d)).norm() < 1e-9);
  }
  CHECK(checked > 30);
}

TEST_CASE("build_patch: conformality of the discrete first fundamental form") {
  const auto& d = mid_member();
  auto deviation = [&](int res) {
    const auto m = ght::build_patch(d, res, res);
    const auto grid = ght::patch_grid(d, res, res);
    const int ns = int(grid.s.size()) - 1, nt = int(grid.t.size()) - 1;
    const ght::BranchedTorus bt(d.tau);
    double worst = 0;
    for (int j = 1; j < nt; ++j)
      for (int i = 1; i < ns; ++i) {
        const int v = j * (ns + 1) + i;
        if (bt.distance_to_branch_points(m.param[v]) < 0.05) continue;
        const double ds = grid.s[i + 1] - grid.s[i - 1], dt = grid.t[j + 1] - grid.t[j - 1];
        const Vec3 Xs = (m.vertices.col(v + 1) - m.vertices.col(v - 1)) / ds;
        const Vec3 Xt = (m.vertices.col(v + ns + 1) - m.vertices.col(v - ns - 1)) / dt;
        // X_t = Re(tau) X_x + Im(tau) X_y.
        const Vec3 Xy = (Xt - d.tau.real() * Xs) / d.tau.imag();
        const double E = Xs.squaredNorm(), G = Xy.squaredNorm(), F = Xs.dot(Xy);
        worst = std::max({worst, std::abs(E - G) / E, std::abs(F) / E});
      }
    return worst;
  };
  const double d64 = deviation(64), d128 = deviation(128);
  CHECK(d64 < 5e-2);
  CHECK(d128 < d64);
}

TEST_CASE("associate family: intrinsic edge lengths do not depend on theta") {
  const auto& d = mid_member();
  ght::WeierstrassData d2 = d;
  d2.theta += 0.7;
  const auto m1 = ght::build_patch(d, 32, 32), m2 = ght::build_patch(d2, 32, 32);
  double worst_chord = 0;
  for (int t = 0; t < m1.num_triangles(); t += 7) {
    const int a = m1.triangles[t][0], b = m1.triangles[t][1];
    const double l1 = (m1.vertices.col(a) - m1.vertices.col(b)).norm();
    const double l2 = (m2.vertices.col(a) - m2.vertices.col(b)).norm();
    worst_chord = std::max(worst_chord, std::abs(l1 - l2) / l1);
  }
  CHECK(worst_chord < 2e-2);
  // Intrinsic lengths of interior edges: identical across theta, and close to the chord.
  const cd a = 0.1 + 0.6 * d.tau, b = 0.11 + 0.61 * d.tau;
  const cd ga = ght::gauss_sheet0(a, d.tau);
  const double i1 = ght::intrinsic_length(d, a, b, ga), i2 = ght::intrinsic_length(d2, a, b, ga);
  CHECK(std::abs(i1 - i2) < 1e-6 * i1);
  const double chord = (ght::immerse(a, 0, d) - ght::immerse(b, 0, d)).norm();
  CHECK(chord <= i1 * (1 + 1e-12));
  CHECK((i1 - chord) / i1 < 1e-3);
}
