#ifndef GHT_MESH_HPP
#define GHT_MESH_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ght {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Offset = Eigen::Vector3i;

enum VertexTag : std::uint8_t {
  kTagFlat = 1,    // Gauss-map branch point (K = 0)
  kTagSeam = 2,    // patch boundary, welded during assembly
  kTagAxis = 4,    // on a symmetry axis
  kTagBranch = 8,  // image of a branch point of the torus double cover
  kTagCenter = 16  // image of an order-2 symmetry center
};

// Triangle mesh closed modulo a lattice. Corner c of triangle t sits at
// vertices.col(triangles[t][c]) + lattice * offsets[t][c].
struct PeriodicMesh {
  Eigen::Matrix3Xd vertices;
  std::vector<Eigen::Vector3i> triangles;
  std::vector<std::array<Offset, 3>> offsets;
  std::optional<Mat3> lattice;  // columns are the lattice vectors
  std::vector<std::uint8_t> tags;
  std::vector<std::complex<double>> param;  // torus coordinate, when known
  std::vector<int> sheet;

  int num_vertices() const { return int(vertices.cols()); }
  int num_triangles() const { return int(triangles.size()); }
  Vec3 lattice_shift(const Offset& o) const;
  Vec3 corner(int t, int c) const;
  std::array<Vec3, 3> triangle_points(int t) const;
  void add_triangle(int a, int b, int c);
  void add_triangle(int a, int b, int c, const Offset& oa, const Offset& ob, const Offset& oc);
};

struct RigidMotion {
  Mat3 R = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Vec3 operator()(const Vec3& p) const { return R * p + t; }
  RigidMotion operator*(const RigidMotion& o) const { return {R * o.R, R * o.t + t}; }
  RigidMotion inverse() const { return {R.transpose(), -(R.transpose() * t)}; }
  RigidMotion pow(int n) const;

  static RigidMotion identity() { return {}; }
  static RigidMotion translation(const Vec3& v) { return {Mat3::Identity(), v}; }
  static RigidMotion rotation(const Vec3& point, const Vec3& axis, double angle);
};

Mat3 rotation_z(double angle);

struct MeshTopology {
  int vertices = 0;
  int edges = 0;
  int faces = 0;
  int euler = 0;
  bool closed = false;    // every edge has exactly two incident triangles
  bool oriented = false;  // and they traverse it in opposite directions
  int boundary_edges = 0;
  int max_valence = 0;
};

MeshTopology mesh_topology(const PeriodicMesh& mesh);
std::vector<int> vertex_valences(const PeriodicMesh& mesh);
double mean_edge_length(const PeriodicMesh& mesh);
double min_triangle_angle(const PeriodicMesh& mesh, int* worst = nullptr);

// Finite copy of a x b x c lattice cells with every vertex instance made explicit.
// `source`, if given, receives the original vertex of every copy.
PeriodicMesh replicate(const PeriodicMesh& mesh, int a, int b, int c, std::vector<int>* source = nullptr);

void write_obj(std::ostream& out, const PeriodicMesh& mesh);
void write_ply(std::ostream& out, const PeriodicMesh& mesh, const std::vector<double>* H = nullptr,
               const std::vector<double>* K = nullptr);
void save_mesh(const std::string& path, const PeriodicMesh& mesh, const std::vector<double>* H = nullptr,
               const std::vector<double>* K = nullptr);
PeriodicMesh load_obj(std::istream& in);

// Text format that keeps the lattice, the corner offsets and the tags:
//   L <9 numbers, lattice columns> (absent without a lattice)
//   v x y z tag
//   f i j k  oi(3) oj(3) ok(3)   (0-based indices)
void write_periodic(std::ostream& out, const PeriodicMesh& mesh);
PeriodicMesh read_periodic(std::istream& in);

}  // namespace ght

#endif
