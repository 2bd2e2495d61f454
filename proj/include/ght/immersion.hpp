#ifndef GHT_IMMERSION_HPP
#define GHT_IMMERSION_HPP

#include <vector>

#include "ght/mesh.hpp"
#include "ght/period_solver.hpp"

namespace ght {

// dh = scale * exp(-i theta) dz on the branched torus; X(base_point) = 0 on sheet 0.
struct WeierstrassData {
  cd tau{0.5, 0.5};
  double theta = 0;
  double scale = 1;
  cd base_point{0};

  // Member of the gyrating family: Im tau solved for the given Re tau, theta = theta_v(tau).
  static WeierstrassData on_curve(double re_tau, double tol = 1e-10);
};

struct PatchSample {
  cd z{0};
  int sheet = 0;
  Vec3 position = Vec3::Zero();
  cd gauss_map_value{0};
};

// Re of (1/2 (1/G - G), i/2 (1/G + G), 1) dh over a segment whose G and 1/G integrals are given.
Vec3 weierstrass_increment(const WeierstrassData& data, cd int_g, cd int_ginv, cd dz);

PatchSample immerse_sample(cd z, int sheet, const WeierstrassData& data);
Vec3 immerse(cd z, int sheet, const WeierstrassData& data);

// 6_2 screw: X(z + 1/3) = S(X(z)) with S a +60 deg rotation about a vertical axis and a
// vertical shift; shift equals c/3 for a solved member.
struct ScrewSymmetry {
  Vec3 axis_point = Vec3::Zero();  // any point on the (vertical) axis
  double angle = 0;
  double shift = 0;
  RigidMotion motion() const;
};

ScrewSymmetry screw_symmetry(const WeierstrassData& data);

struct CellLattice {
  Mat3 vectors = Mat3::Zero();  // columns a1, a2 (horizontal, 120 deg apart), c (vertical)
  double a = 0;
  double c = 0;
  double c_over_a() const { return c / a; }
  double closure_error = 0;  // vertical component of a1 before correction
};

// Lattice of the unit cell; throws AssemblyError when the periods do not close.
CellLattice lattice_from_data(const WeierstrassData& data, double tol = 1e-7);

// Order-2 horizontal rotation axes through images of the symmetry centers of the torus.
struct RotationAxis {
  cd z{0};
  Vec3 point = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  RigidMotion motion() const;
};
std::vector<RotationAxis> order2_axes(const WeierstrassData& data);

// Graded nodes on [lo, hi]: geometric refinement with the given ratio and levels at both ends,
// an even number of uniform cells in between.
std::vector<double> graded_nodes(double lo, double hi, int uniform_cells, double ratio = 0.7, int levels = 6);

// Tensor grid over the strip: node (i, j) at z = s[i] + t[j] tau.
struct PatchGrid {
  std::vector<double> s, t;
  int ns = 0, nt = 0, j_third = 0;  // t[j_third] = 1/3
  std::vector<cd> z;
  cd node(int i, int j) const { return z[size_t(j) * (ns + 1) + i]; }
};

// Grid over the strip s in [0, 1/3], t in [0, 1] for torus resolution n_u x n_v.
PatchGrid patch_grid(const WeierstrassData& data, int n_u, int n_v);

// Triangulated screw-fundamental patch (strip 0 on sheet 0) with z, sheet and tags per vertex.
PeriodicMesh build_patch(const WeierstrassData& data, int n_u, int n_v);

// Intrinsic length of a straight torus segment: integral of (|G| + 1/|G|)/2 |dh|.
double intrinsic_length(const WeierstrassData& data, cd a, cd b, cd g_a);

}  // namespace ght

#endif
