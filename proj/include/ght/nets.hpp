#ifndef GHT_NETS_HPP
#define GHT_NETS_HPP

#include <string>
#include <vector>

#include "ght/mesh.hpp"

namespace ght {

// Space-group operator in fractional coordinates of the hexagonal cell: x -> W x + w.
struct FracOp {
  Eigen::Matrix3i W = Eigen::Matrix3i::Identity();
  Vec3 w = Vec3::Zero();
  Vec3 operator()(const Vec3& x) const { return W.cast<double>() * x + w; }
  FracOp operator*(const FracOp& o) const;
};

// The 12 operators of P6_2 22 (hexagonal axes), generated by closure from the 6_2 screw
// (x - y, x, z + 1/3) and the 2-fold (x - y, -y, -z). Throws GenerationError if the closure does not
// have order 12.
std::vector<FracOp> p6222_operators();

// Hexagonal cell: a1 = (a, 0, 0), a2 = (-a/2, a sqrt(3)/2, 0), c = (0, 0, c).
Mat3 hexagonal_lattice(double a, double c);

struct CrystalNet {
  struct Edge {
    int u = 0, v = 0;
    Offset offset = Offset::Zero();  // the edge runs from vertex u to vertex v + offset
    int orbit = 0;
  };
  std::string name;
  double a = 1, c = 1;
  std::vector<Vec3> vertices;  // fractional, in [0, 1)
  std::vector<Edge> edges;
  std::vector<FracOp> ops;
  std::vector<std::string> warnings;

  Mat3 lattice() const { return hexagonal_lattice(a, c); }
  Vec3 cartesian(const Vec3& frac) const { return lattice() * frac; }
  Vec3 edge_start(int e) const;
  Vec3 edge_end(int e) const;
  std::vector<int> degrees() const;
  int edge_orbit_count() const;
  RigidMotion cartesian_op(const FracOp& op) const;
};

// Quartz net: vertices on Wyckoff 3c, edges the orbit of the shortest vertex-vertex link.
CrystalNet generate_qtz(double c_over_a);
// Dual net: vertices on the screw axis (3b, i.e. 3a shifted by c/2, so that the horizontal edges clear
// the qtz vertices), vertical edges along the screw axis and horizontal edges along 2-fold axes.
CrystalNet generate_qzd(double c_over_a);

// Checks that the vertex and edge sets are closed under the operators (modulo the lattice).
bool symmetry_closed(const CrystalNet& net, double tol = 1e-9);

// Minimum distance between edges of two nets, or between non-adjacent edges of one net.
double net_distance(const CrystalNet& a, const CrystalNet& b);
double min_nonadjacent_distance(const CrystalNet& net);

// Angle between the two edge orbits at a qzd vertex (radians).
double qzd_edge_angle(const CrystalNet& net);

// Closed periodic tube of the given radius around every edge with convex-hull junctions at the vertices.
// Throws GeometryError when the radius is too large for the net.
PeriodicMesh tubular_mesh(const CrystalNet& net, double radius, int segments);

}  // namespace ght

#endif
