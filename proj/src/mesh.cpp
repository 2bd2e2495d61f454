#include "ght/mesh.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "ght/errors.hpp"

namespace ght {

Vec3 PeriodicMesh::lattice_shift(const Offset& o) const {
  if (o.isZero() || !lattice) return Vec3::Zero();
  return *lattice * o.cast<double>();
}

Vec3 PeriodicMesh::corner(int t, int c) const {
  return vertices.col(triangles[t][c]) + lattice_shift(offsets[t][c]);
}

std::array<Vec3, 3> PeriodicMesh::triangle_points(int t) const { return {corner(t, 0), corner(t, 1), corner(t, 2)}; }

void PeriodicMesh::add_triangle(int a, int b, int c) {
  triangles.emplace_back(a, b, c);
  offsets.push_back({Offset::Zero(), Offset::Zero(), Offset::Zero()});
}

void PeriodicMesh::add_triangle(int a, int b, int c, const Offset& oa, const Offset& ob, const Offset& oc) {
  triangles.emplace_back(a, b, c);
  offsets.push_back({oa, ob, oc});
}

RigidMotion RigidMotion::pow(int n) const {
  RigidMotion base = n >= 0 ? *this : inverse(), out;
  for (int k = 0; k < std::abs(n); ++k) out = base * out;
  return out;
}

RigidMotion RigidMotion::rotation(const Vec3& point, const Vec3& axis, double angle) {
  const Mat3 R = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return {R, point - R * point};
}

Mat3 rotation_z(double angle) { return Eigen::AngleAxisd(angle, Vec3::UnitZ()).toRotationMatrix(); }

namespace {

struct EdgeKey {
  int a, b;
  Offset d;
  bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b && d == o.d; }
};

struct EdgeKeyHash {
  size_t operator()(const EdgeKey& k) const {
    size_t h = std::hash<long long>()((long long)k.a << 32 | unsigned(k.b));
    for (int i = 0; i < 3; ++i) h = h * 1000003u ^ std::hash<int>()(k.d[i]);
    return h;
  }
};

}  // namespace

MeshTopology mesh_topology(const PeriodicMesh& mesh) {
  std::unordered_map<EdgeKey, int, EdgeKeyHash> directed;
  directed.reserve(3 * mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t)
    for (int c = 0; c < 3; ++c) {
      const int n = (c + 1) % 3;
      ++directed[{mesh.triangles[t][c], mesh.triangles[t][n], mesh.offsets[t][n] - mesh.offsets[t][c]}];
    }
  MeshTopology top;
  top.vertices = mesh.num_vertices();
  top.faces = mesh.num_triangles();
  top.closed = true;
  top.oriented = true;
  int half = 0;
  for (const auto& [k, n] : directed) {
    const auto it = directed.find({k.b, k.a, -k.d});
    const int m = it == directed.end() ? 0 : it->second;
    if (n > 1) top.oriented = false;
    if (m == 0) {
      ++top.boundary_edges;
      top.closed = false;
      half += 2;
    } else {
      ++half;
      if (n + m != 2) top.closed = false;
    }
  }
  top.edges = half / 2;
  top.euler = top.vertices - top.edges + top.faces;
  for (int v : vertex_valences(mesh)) top.max_valence = std::max(top.max_valence, v);
  return top;
}

std::vector<int> vertex_valences(const PeriodicMesh& mesh) {
  std::vector<int> val(mesh.num_vertices(), 0);
  for (const auto& t : mesh.triangles)
    for (int c = 0; c < 3; ++c) ++val[t[c]];
  return val;
}

double mean_edge_length(const PeriodicMesh& mesh) {
  double sum = 0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.triangle_points(t);
    for (int c = 0; c < 3; ++c) sum += (p[(c + 1) % 3] - p[c]).norm();
  }
  return mesh.triangles.empty() ? 0.0 : sum / (3.0 * mesh.num_triangles());
}

double min_triangle_angle(const PeriodicMesh& mesh, int* worst) {
  double best = std::numbers::pi;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto p = mesh.triangle_points(t);
    for (int c = 0; c < 3; ++c) {
      const Vec3 u = p[(c + 1) % 3] - p[c], v = p[(c + 2) % 3] - p[c];
      const double ang = std::atan2(u.cross(v).norm(), u.dot(v));
      if (ang < best) {
        best = ang;
        if (worst) *worst = t;
      }
    }
  }
  return best;
}

PeriodicMesh replicate(const PeriodicMesh& mesh, int a, int b, int c, std::vector<int>* source) {
  if (a < 1 || b < 1 || c < 1) throw DomainError("replicate: cell counts must be positive");
  if (source) source->clear();
  PeriodicMesh out;
  std::map<std::tuple<int, int, int, int>, int> index;
  std::vector<Vec3> pts;
  auto instance = [&](int v, const Offset& o) {
    const auto key = std::make_tuple(v, o[0], o[1], o[2]);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    const int id = int(pts.size());
    index.emplace(key, id);
    pts.push_back(mesh.vertices.col(v) + mesh.lattice_shift(o));
    out.tags.push_back(mesh.tags.empty() ? 0 : mesh.tags[v]);
    if (source) source->push_back(v);
    return id;
  };
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j)
      for (int k = 0; k < c; ++k) {
        const Offset cell(i, j, k);
        for (int t = 0; t < mesh.num_triangles(); ++t) {
          const auto& tri = mesh.triangles[t];
          const auto& off = mesh.offsets[t];
          out.add_triangle(instance(tri[0], off[0] + cell), instance(tri[1], off[1] + cell),
                           instance(tri[2], off[2] + cell));
        }
      }
  out.vertices.resize(3, Eigen::Index(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) out.vertices.col(Eigen::Index(i)) = pts[i];
  return out;
}

namespace {

const PeriodicMesh& explicit_mesh(const PeriodicMesh& mesh, PeriodicMesh& storage) {
  for (const auto& o : mesh.offsets)
    for (const auto& c : o)
      if (!c.isZero()) {
        storage = replicate(mesh, 1, 1, 1);
        return storage;
      }
  return mesh;
}

template <typename T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

}  // namespace

void write_obj(std::ostream& out, const PeriodicMesh& mesh) {
  PeriodicMesh storage;
  const PeriodicMesh& m = explicit_mesh(mesh, storage);
  char buf[128];
  for (int v = 0; v < m.num_vertices(); ++v) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", m.vertices(0, v), m.vertices(1, v), m.vertices(2, v));
    out << buf;
  }
  for (const auto& t : m.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

void write_ply(std::ostream& out, const PeriodicMesh& mesh, const std::vector<double>* H,
               const std::vector<double>* K) {
  PeriodicMesh storage;
  const PeriodicMesh& m = explicit_mesh(mesh, storage);
  // Per-vertex fields follow the original vertex order; replicated copies are not supported.
  if (&m != &mesh && (H || K)) throw DomainError("write_ply: scalar fields need a mesh without lattice offsets");
  if ((H && int(H->size()) != m.num_vertices()) || (K && int(K->size()) != m.num_vertices()))
    throw DomainError("write_ply: field size does not match vertex count");
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << m.num_vertices() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (H) out << "property double H\n";
  if (K) out << "property double K\n";
  out << "element face " << m.num_triangles() << "\n";
  out << "property list uchar int vertex_indices\nend_header\n";
  for (int v = 0; v < m.num_vertices(); ++v) {
    for (int i = 0; i < 3; ++i) put<double>(out, m.vertices(i, v));
    if (H) put<double>(out, (*H)[v]);
    if (K) put<double>(out, (*K)[v]);
  }
  for (const auto& t : m.triangles) {
    put<unsigned char>(out, 3);
    for (int c = 0; c < 3; ++c) put<std::int32_t>(out, t[c]);
  }
}

void save_mesh(const std::string& path, const PeriodicMesh& mesh, const std::vector<double>* H,
               const std::vector<double>* K) {
  const bool ply = path.size() >= 4 && path.substr(path.size() - 4) == ".ply";
  std::ofstream out(path, ply ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot open " + path);
  if (ply)
    write_ply(out, mesh, H, K);
  else
    write_obj(out, mesh);
}

PeriodicMesh load_obj(std::istream& in) {
  PeriodicMesh m;
  std::vector<Vec3> pts;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "v") {
      Vec3 p;
      ls >> p[0] >> p[1] >> p[2];
      pts.push_back(p);
    } else if (kind == "f") {
      int idx[3];
      for (int& i : idx) {
        std::string tok;
        ls >> tok;
        i = std::stoi(tok.substr(0, tok.find('/'))) - 1;
      }
      m.add_triangle(idx[0], idx[1], idx[2]);
    }
  }
  m.vertices.resize(3, Eigen::Index(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) m.vertices.col(Eigen::Index(i)) = pts[i];
  m.tags.assign(pts.size(), 0);
  return m;
}

void write_periodic(std::ostream& out, const PeriodicMesh& mesh) {
  char buf[160];
  out << "# ght periodic mesh\n";
  if (mesh.lattice) {
    out << 'L';
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        std::snprintf(buf, sizeof buf, " %.17g", (*mesh.lattice)(i, j));
        out << buf;
      }
    out << '\n';
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g %d\n", mesh.vertices(0, v), mesh.vertices(1, v),
                  mesh.vertices(2, v), v < int(mesh.tags.size()) ? int(mesh.tags[v]) : 0);
    out << buf;
  }
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    out << "f " << tri[0] << ' ' << tri[1] << ' ' << tri[2];
    for (int c = 0; c < 3; ++c) {
      const Offset o = mesh.offsets.empty() ? Offset::Zero() : mesh.offsets[t][c];
      out << ' ' << o[0] << ' ' << o[1] << ' ' << o[2];
    }
    out << '\n';
  }
}

PeriodicMesh read_periodic(std::istream& in) {
  PeriodicMesh m;
  std::vector<Vec3> pts;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "L") {
      Mat3 L;
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) ls >> L(i, j);
      m.lattice = L;
    } else if (kind == "v") {
      Vec3 p;
      int tag = 0;
      ls >> p[0] >> p[1] >> p[2] >> tag;
      pts.push_back(p);
      m.tags.push_back(std::uint8_t(tag));
    } else if (kind == "f") {
      int a, b, c;
      Offset o[3];
      ls >> a >> b >> c;
      for (auto& x : o) ls >> x[0] >> x[1] >> x[2];
      m.add_triangle(a, b, c, o[0], o[1], o[2]);
    }
    if (!kind.empty() && kind[0] != '#' && ls.fail()) throw DomainError("read_periodic: malformed line: " + line);
  }
  m.vertices.resize(3, Eigen::Index(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) m.vertices.col(Eigen::Index(i)) = pts[i];
  return m;
}

}  // namespace ght
