#ifndef GHT_ASSEMBLY_HPP
#define GHT_ASSEMBLY_HPP

#include <vector>

#include "ght/immersion.hpp"
#include "ght/spatial.hpp"

namespace ght {

struct UnitCell {
  PeriodicMesh mesh;
  CellLattice lattice;
  double worst_weld = 0;  // largest distance between welded vertex instances
  int welded = 0;         // seam vertex instances merged into another vertex
};

// Welds the six screw images S^k(patch), k = 0..5, into a mesh closed modulo patch.lattice.
UnitCell assemble_unit_cell(const PeriodicMesh& patch, const ScrewSymmetry& s, double tol = 1e-5);

// Patch, screw and assembly for one member at resolution res x res.
UnitCell build_unit_cell(const WeierstrassData& data, int res);

// Throws QualityError when a triangle has an angle below min_angle_deg.
void check_triangle_quality(const PeriodicMesh& mesh, double min_angle_deg = 1.0);

std::vector<double> mixed_areas(const PeriodicMesh& mesh);
Eigen::Matrix3Xd vertex_normals(const PeriodicMesh& mesh);
// Cotangent Laplacian of the embedding, divided by the mixed area: approximately -2 H n.
Eigen::Matrix3Xd laplace_beltrami(const PeriodicMesh& mesh);
std::vector<double> angle_defects(const PeriodicMesh& mesh);

// Signed so that an outward-oriented round sphere of radius R gives +1/R.
std::vector<double> mean_curvature_field(const PeriodicMesh& mesh);
std::vector<double> gauss_curvature_field(const PeriodicMesh& mesh);

// Max over vertices of the distance from op(vertex) to the surface (modulo the lattice).
double symmetry_residual(const PeriodicMesh& mesh, const RigidMotion& op);
double symmetry_residual(const TriangleGrid& grid, const RigidMotion& op);

struct IntersectionPair {
  int tri_a, tri_b;
  Offset shift_b;  // lattice translate of tri_b
};

struct IntersectionReport {
  std::vector<IntersectionPair> pairs;
  long long tested = 0;
  bool empty() const { return pairs.empty(); }
};

// All intersecting pairs of non-adjacent triangles among the cell and one shell of translates.
IntersectionReport self_intersection_check(const PeriodicMesh& mesh);

struct VolumeFractions {
  double side0 = 0, side1 = 0;
  int samples = 0;
  bool unbalanced = false;  // |side0 - side1| > 0.05, diagnostic only
};

// Parity of crossings along segments from a reference point, at random points of the cell.
VolumeFractions volume_fractions(const PeriodicMesh& mesh, int samples = 4000, unsigned seed = 1);

}  // namespace ght

#endif
