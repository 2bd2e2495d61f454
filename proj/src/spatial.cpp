#include "ght/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ght {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + d1 / (d1 - d3) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + d2 / (d2 - d6) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && d4 - d3 >= 0 && d5 - d6 >= 0) return b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b);
  const double denom = 1 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c,
                           double* param) {
  const Vec3 dir = q - p, e1 = b - a, e2 = c - a;
  const Vec3 pv = dir.cross(e2);
  const double det = e1.dot(pv);
  if (std::abs(det) < 1e-300) return false;
  const double inv = 1 / det;
  const Vec3 tv = p - a;
  const double u = tv.dot(pv) * inv;
  if (u < 0 || u > 1) return false;
  const Vec3 qv = tv.cross(e1);
  const double v = dir.dot(qv) * inv;
  if (v < 0 || u + v > 1) return false;
  const double t = e2.dot(qv) * inv;
  if (t < 0 || t > 1) return false;
  if (param) *param = t;
  return true;
}

bool triangles_intersect(const std::array<Vec3, 3>& t, const std::array<Vec3, 3>& u) {
  for (int k = 0; k < 3; ++k) {
    if (segment_hits_triangle(t[k], t[(k + 1) % 3], u[0], u[1], u[2])) return true;
    if (segment_hits_triangle(u[k], u[(k + 1) % 3], t[0], t[1], t[2])) return true;
  }
  return false;
}

TriangleGrid::TriangleGrid(const PeriodicMesh& mesh, int shell, double cell_size) : mesh_(mesh) {
  const double inf = std::numeric_limits<double>::infinity();
  Vec3 lo = Vec3::Constant(inf), hi = Vec3::Constant(-inf);
  double max_edge = 0, sum_edge = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.triangle_points(t);
    for (int c = 0; c < 3; ++c) {
      lo = lo.cwiseMin(p[c]);
      hi = hi.cwiseMax(p[c]);
      const double e = (p[(c + 1) % 3] - p[c]).norm();
      max_edge = std::max(max_edge, e);
      sum_edge += e;
    }
  }
  center_ = 0.5 * (lo + hi);
  const double mean_edge = sum_edge / std::max(1, 3 * mesh.num_triangles());
  std::vector<Offset> shifts{Offset::Zero()};
  double margin = 2 * max_edge;
  if (mesh.lattice && shell > 0) {
    margin += 0.5 * mesh.lattice->colwise().norm().maxCoeff();
    for (int i = -shell; i <= shell; ++i)
      for (int j = -shell; j <= shell; ++j)
        for (int k = -shell; k <= shell; ++k)
          if (i || j || k) shifts.emplace_back(i, j, k);
  }
  const Vec3 blo = lo - Vec3::Constant(margin), bhi = hi + Vec3::Constant(margin);
  Vec3 glo = Vec3::Constant(inf), ghi = Vec3::Constant(-inf);
  for (const Offset& s : shifts) {
    const Vec3 d = mesh.lattice_shift(s);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const auto p = mesh.triangle_points(t);
      const Vec3 tlo = p[0].cwiseMin(p[1]).cwiseMin(p[2]) + d, thi = p[0].cwiseMax(p[1]).cwiseMax(p[2]) + d;
      if ((tlo.array() > bhi.array()).any() || (thi.array() < blo.array()).any()) continue;
      entries_.push_back({t, s});
      glo = glo.cwiseMin(tlo);
      ghi = ghi.cwiseMax(thi);
    }
  }
  if (entries_.empty()) return;
  const Vec3 extent = (ghi - glo).cwiseMax(1e-12);
  h_ = cell_size > 0 ? cell_size : 2 * mean_edge;
  h_ = std::max(h_, extent.maxCoeff() / 160);
  origin_ = glo;
  for (int i = 0; i < 3; ++i) dims_[i] = std::max(1, int(std::ceil(extent[i] / h_)));
  cells_.assign(size_t(dims_.prod()), {});
  for (int e = 0; e < int(entries_.size()); ++e) {
    const auto p = points(entries_[e]);
    const Eigen::Vector3i a = cell_of(p[0].cwiseMin(p[1]).cwiseMin(p[2]));
    const Eigen::Vector3i b = cell_of(p[0].cwiseMax(p[1]).cwiseMax(p[2]));
    for (int i = a.x(); i <= b.x(); ++i)
      for (int j = a.y(); j <= b.y(); ++j)
        for (int k = a.z(); k <= b.z(); ++k) cells_[size_t((k * dims_.y() + j) * dims_.x() + i)].push_back(e);
  }
}

std::array<Vec3, 3> TriangleGrid::points(const Entry& e) const {
  auto p = mesh_.triangle_points(e.tri);
  const Vec3 d = mesh_.lattice_shift(e.shift);
  for (auto& x : p) x += d;
  return p;
}

Eigen::Vector3i TriangleGrid::cell_of(const Vec3& p) const {
  Eigen::Vector3i c;
  for (int i = 0; i < 3; ++i) c[i] = std::clamp(int(std::floor((p[i] - origin_[i]) / h_)), 0, dims_[i] - 1);
  return c;
}

void TriangleGrid::query_box(const Vec3& lo, const Vec3& hi, const std::function<void(int)>& visit) const {
  if (entries_.empty()) return;
  const Eigen::Vector3i a = cell_of(lo), b = cell_of(hi);
  for (int i = a.x(); i <= b.x(); ++i)
    for (int j = a.y(); j <= b.y(); ++j)
      for (int k = a.z(); k <= b.z(); ++k)
        for (int e : cells_[size_t((k * dims_.y() + j) * dims_.x() + i)]) visit(e);
}

double TriangleGrid::distance(const Vec3& p0) const {
  if (entries_.empty()) return std::numeric_limits<double>::infinity();
  Vec3 p = p0;
  if (mesh_.lattice) {
    const Vec3 f = mesh_.lattice->lu().solve(p - center_);
    p -= *mesh_.lattice * f.array().round().matrix();
  }
  const Vec3 gmax = origin_ + h_ * dims_.cast<double>();
  const double outside = (p - p.cwiseMax(origin_).cwiseMin(gmax)).norm();
  const Eigen::Vector3i c = cell_of(p);
  double best = std::numeric_limits<double>::infinity();
  const int rmax = dims_.maxCoeff();
  for (int r = 0; r <= rmax; ++r) {
    for (int i = c.x() - r; i <= c.x() + r; ++i)
      for (int j = c.y() - r; j <= c.y() + r; ++j)
        for (int k = c.z() - r; k <= c.z() + r; ++k) {
          if (std::max({std::abs(i - c.x()), std::abs(j - c.y()), std::abs(k - c.z())}) != r) continue;
          if (i < 0 || j < 0 || k < 0 || i >= dims_.x() || j >= dims_.y() || k >= dims_.z()) continue;
          for (int e : cells_[size_t((k * dims_.y() + j) * dims_.x() + i)]) {
            const auto t = points(entries_[e]);
            best = std::min(best, (closest_point_on_triangle(p, t[0], t[1], t[2]) - p).norm());
          }
        }
    if (best <= outside + r * h_) break;
  }
  return best;
}

}  // namespace ght
