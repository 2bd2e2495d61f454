#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ght/assembly.hpp"

namespace ght {

namespace {
const double pi = std::numbers::pi;

double cot(const Vec3& u, const Vec3& v) { return u.dot(v) / u.cross(v).norm(); }
}  // namespace

void check_triangle_quality(const PeriodicMesh& mesh, double min_angle_deg) {
  const double lim = min_angle_deg * pi / 180;
  std::vector<int> bad;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.triangle_points(t);
    for (int c = 0; c < 3; ++c) {
      const Vec3 u = p[(c + 1) % 3] - p[c], v = p[(c + 2) % 3] - p[c];
      if (std::atan2(u.cross(v).norm(), u.dot(v)) < lim) {
        bad.push_back(t);
        break;
      }
    }
  }
  if (!bad.empty()) throw QualityError("degenerate triangles (angle below threshold)", bad);
}

std::vector<double> mixed_areas(const PeriodicMesh& mesh) {
  std::vector<double> A(mesh.num_vertices(), 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.triangle_points(t);
    const double area = 0.5 * (p[1] - p[0]).cross(p[2] - p[0]).norm();
    int obtuse = -1;
    for (int c = 0; c < 3; ++c)
      if ((p[(c + 1) % 3] - p[c]).dot(p[(c + 2) % 3] - p[c]) < 0) obtuse = c;
    for (int c = 0; c < 3; ++c) {
      const int v = mesh.triangles[t][c];
      if (obtuse < 0) {
        const Vec3 &a = p[c], &b = p[(c + 1) % 3], &d = p[(c + 2) % 3];
        // Voronoi region: |ab|^2 cot(angle at d) + |ad|^2 cot(angle at b), over 8.
        A[v] += ((b - a).squaredNorm() * cot(a - d, b - d) + (d - a).squaredNorm() * cot(a - b, d - b)) / 8;
      } else {
        A[v] += obtuse == c ? area / 2 : area / 4;
      }
    }
  }
  return A;
}

Eigen::Matrix3Xd vertex_normals(const PeriodicMesh& mesh) {
  Eigen::Matrix3Xd n = Eigen::Matrix3Xd::Zero(3, mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.triangle_points(t);
    const Vec3 fn = (p[1] - p[0]).cross(p[2] - p[0]);
    for (int c = 0; c < 3; ++c) n.col(mesh.triangles[t][c]) += fn;
  }
  n.colwise().normalize();
  return n;
}

Eigen::Matrix3Xd laplace_beltrami(const PeriodicMesh& mesh) {
  Eigen::Matrix3Xd L = Eigen::Matrix3Xd::Zero(3, mesh.num_vertices());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.triangle_points(t);
    for (int c = 0; c < 3; ++c) {
      const int i = (c + 1) % 3, j = (c + 2) % 3;
      const double w = 0.5 * cot(p[i] - p[c], p[j] - p[c]);
      const Vec3 e = p[j] - p[i];
      L.col(mesh.triangles[t][i]) += w * e;
      L.col(mesh.triangles[t][j]) -= w * e;
    }
  }
  const auto A = mixed_areas(mesh);
  for (int v = 0; v < mesh.num_vertices(); ++v) L.col(v) /= A[v];
  return L;
}

std::vector<double> angle_defects(const PeriodicMesh& mesh) {
  std::vector<double> d(mesh.num_vertices(), 2 * pi);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.triangle_points(t);
    for (int c = 0; c < 3; ++c) {
      const Vec3 u = p[(c + 1) % 3] - p[c], v = p[(c + 2) % 3] - p[c];
      d[mesh.triangles[t][c]] -= std::atan2(u.cross(v).norm(), u.dot(v));
    }
  }
  return d;
}

std::vector<double> mean_curvature_field(const PeriodicMesh& mesh) {
  check_triangle_quality(mesh);
  const Eigen::Matrix3Xd L = laplace_beltrami(mesh), n = vertex_normals(mesh);
  std::vector<double> H(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double mag = 0.5 * L.col(v).norm();
    H[v] = L.col(v).dot(n.col(v)) > 0 ? -mag : mag;
  }
  return H;
}

std::vector<double> gauss_curvature_field(const PeriodicMesh& mesh) {
  check_triangle_quality(mesh);
  const auto d = angle_defects(mesh);
  const auto A = mixed_areas(mesh);
  std::vector<double> K(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) K[v] = d[v] / A[v];
  return K;
}

double symmetry_residual(const TriangleGrid& grid, const RigidMotion& op) {
  const PeriodicMesh& m = grid.mesh();
  double worst = 0;
  for (int v = 0; v < m.num_vertices(); ++v) worst = std::max(worst, grid.distance(op(Vec3(m.vertices.col(v)))));
  return worst;
}

double symmetry_residual(const PeriodicMesh& mesh, const RigidMotion& op) {
  const TriangleGrid grid(mesh);
  return symmetry_residual(grid, op);
}

namespace {

bool lex_positive(const Offset& s) {
  for (int i = 0; i < 3; ++i)
    if (s[i] != 0) return s[i] > 0;
  return false;
}

bool share_vertex(const PeriodicMesh& m, int t, int u, const Offset& shift) {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (m.triangles[t][a] == m.triangles[u][b] && m.offsets[t][a] == m.offsets[u][b] + shift) return true;
  return false;
}

}  // namespace

IntersectionReport self_intersection_check(const PeriodicMesh& mesh) {
  const TriangleGrid grid(mesh, 1);
  IntersectionReport rep;
  std::vector<int> stamp(grid.entries().size(), -1);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.triangle_points(t);
    const Vec3 lo = p[0].cwiseMin(p[1]).cwiseMin(p[2]), hi = p[0].cwiseMax(p[1]).cwiseMax(p[2]);
    grid.query_box(lo, hi, [&](int e) {
      if (stamp[e] == t) return;
      stamp[e] = t;
      const auto& en = grid.entries()[e];
      if (en.tri < t || (en.tri == t && !lex_positive(en.shift))) return;
      if (share_vertex(mesh, t, en.tri, en.shift)) return;
      const auto q = grid.points(en);
      const Vec3 qlo = q[0].cwiseMin(q[1]).cwiseMin(q[2]), qhi = q[0].cwiseMax(q[1]).cwiseMax(q[2]);
      if ((qlo.array() > hi.array()).any() || (qhi.array() < lo.array()).any()) return;
      ++rep.tested;
      if (triangles_intersect(p, q)) rep.pairs.push_back({t, en.tri, en.shift});
    });
  }
  return rep;
}

VolumeFractions volume_fractions(const PeriodicMesh& mesh, int samples, unsigned seed) {
  if (!mesh.lattice) throw DomainError("volume_fractions: mesh has no lattice");
  const TriangleGrid grid(mesh, 1);
  const Mat3 L = *mesh.lattice;
  const Vec3 center = mesh.vertices.rowwise().mean();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  auto sample = [&] { return Vec3(center + L * Vec3(u(rng), u(rng), u(rng))); };
  const double step = 2 * mean_edge_length(mesh);
  std::vector<int> stamp(grid.entries().size(), -1);
  int query = 0;
  auto crossings = [&](const Vec3& a, const Vec3& b) {
    ++query;
    int n = 0;
    const int pieces = std::max(1, int(std::ceil((b - a).norm() / step)));
    for (int k = 0; k < pieces; ++k) {
      const Vec3 p = a + (b - a) * (double(k) / pieces), q = a + (b - a) * (double(k + 1) / pieces);
      grid.query_box(p.cwiseMin(q), p.cwiseMax(q), [&](int e) {
        if (stamp[e] == query) return;
        stamp[e] = query;
        const auto t = grid.points(grid.entries()[e]);
        if (segment_hits_triangle(a, b, t[0], t[1], t[2])) ++n;
      });
    }
    return n;
  };
  const Vec3 ref = sample();
  VolumeFractions out;
  int even = 0;
  for (int k = 0; k < samples; ++k)
    if (crossings(ref, sample()) % 2 == 0) ++even;
  out.samples = samples;
  out.side0 = double(even) / samples;
  out.side1 = 1 - out.side0;
  out.unbalanced = std::abs(out.side0 - out.side1) > 0.05;
  return out;
}

}  // namespace ght
