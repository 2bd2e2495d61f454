#ifndef GHT_SPATIAL_HPP
#define GHT_SPATIAL_HPP

#include <functional>
#include <vector>

#include "ght/mesh.hpp"

namespace ght {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Segment p -> q against triangle (a, b, c); parameter along the segment in (0, 1) when hit.
bool segment_hits_triangle(const Vec3& p, const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c,
                           double* param = nullptr);

// Non-coplanar triangle-triangle intersection (edge-against-face tests both ways).
bool triangles_intersect(const std::array<Vec3, 3>& t, const std::array<Vec3, 3>& u);

// Uniform grid over the triangles of a mesh and, for a periodic mesh, the translates by
// lattice offsets in [-shell, shell]^3 that come near the base cell.
class TriangleGrid {
 public:
  struct Entry {
    int tri;
    Offset shift;
  };

  TriangleGrid(const PeriodicMesh& mesh, int shell = 1, double cell_size = 0);

  std::array<Vec3, 3> points(const Entry& e) const;
  const PeriodicMesh& mesh() const { return mesh_; }
  const std::vector<Entry>& entries() const { return entries_; }

  // Distance from p to the surface; p is first moved by a lattice vector next to the base cell.
  double distance(const Vec3& p) const;
  void query_box(const Vec3& lo, const Vec3& hi, const std::function<void(int entry)>& visit) const;

 private:
  const PeriodicMesh& mesh_;
  std::vector<Entry> entries_;
  Vec3 origin_ = Vec3::Zero(), center_ = Vec3::Zero();
  double h_ = 1;
  Eigen::Vector3i dims_ = Eigen::Vector3i::Ones();
  std::vector<std::vector<int>> cells_;
  Eigen::Vector3i cell_of(const Vec3& p) const;
};

}  // namespace ght

#endif
