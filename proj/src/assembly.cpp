#include <algorithm>
#include <cmath>
#include <numeric>

#include "ght/assembly.hpp"

namespace ght {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

UnitCell assemble_unit_cell(const PeriodicMesh& patch, const ScrewSymmetry& s, double tol) {
  if (!patch.lattice) throw AssemblyError("assemble_unit_cell: patch has no lattice (periods do not close)", 0);
  const Mat3 L = *patch.lattice, Linv = L.inverse();
  const int nv = patch.num_vertices(), copies = 6;
  const RigidMotion S = s.motion();
  std::vector<Vec3> pos(size_t(nv) * copies);
  RigidMotion Sk;
  for (int k = 0; k < copies; ++k, Sk = S * Sk)
    for (int v = 0; v < nv; ++v) pos[size_t(k) * nv + v] = Sk(Vec3(patch.vertices.col(v)));

  std::vector<int> seam;
  for (int k = 0; k < copies; ++k)
    for (int v = 0; v < nv; ++v)
      if (patch.tags[v] & kTagSeam) seam.push_back(k * nv + v);
  auto min_image = [&](const Vec3& d) -> Vec3 {
    Vec3 f = Linv * d;
    f -= f.array().round().matrix();
    return L * f;
  };
  UnionFind uf(nv * copies);
  UnitCell out;
  double worst_unmatched = 0;
  bool unmatched = false;
  for (size_t i = 0; i < seam.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    bool matched = false;
    for (size_t j = 0; j < seam.size(); ++j) {
      if (i == j) continue;
      const double dist = min_image(pos[seam[i]] - pos[seam[j]]).norm();
      nearest = std::min(nearest, dist);
      if (dist < tol) {
        matched = true;
        uf.unite(seam[i], seam[j]);
        out.worst_weld = std::max(out.worst_weld, dist);
      }
    }
    if (!matched) {
      unmatched = true;
      worst_unmatched = std::max(worst_unmatched, nearest);
    }
  }
  if (unmatched) throw AssemblyError("assemble_unit_cell: seam vertex without a partner within tolerance", worst_unmatched);

  std::vector<int> index(size_t(nv) * copies, -1);
  PeriodicMesh& m = out.mesh;
  std::vector<Vec3> pts;
  for (int g = 0; g < nv * copies; ++g) {
    const int r = uf.find(g);
    if (r == g) {
      index[g] = int(pts.size());
      pts.push_back(pos[g]);
      const int k = g / nv, v = g % nv;
      m.tags.push_back(patch.tags[v]);
      const cd z = patch.param.empty() ? cd(0) : patch.param[v] + double(k) / 3;
      m.param.push_back(z);
      m.sheet.push_back(k % 2);
    } else {
      ++out.welded;
    }
  }
  for (int g = 0; g < nv * copies; ++g) m.tags[index[uf.find(g)]] |= patch.tags[g % nv];
  m.vertices.resize(3, Eigen::Index(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) m.vertices.col(Eigen::Index(i)) = pts[i];
  m.lattice = L;
  auto corner = [&](int g) -> std::pair<int, Offset> {
    const int r = uf.find(g);
    const Vec3 f = Linv * (pos[g] - pos[r]);
    return {index[r], f.array().round().cast<int>().matrix()};
  };
  for (int k = 0; k < copies; ++k)
    for (const auto& t : patch.triangles) {
      const auto a = corner(k * nv + t[0]), b = corner(k * nv + t[1]), c = corner(k * nv + t[2]);
      m.add_triangle(a.first, b.first, c.first, a.second, b.second, c.second);
    }
  const MeshTopology top = mesh_topology(m);
  if (!top.closed || !top.oriented)
    throw AssemblyError("assemble_unit_cell: welded cell is not a closed oriented complex", out.worst_weld);
  const double a = L.col(0).norm(), c = L.col(2).norm();
  out.lattice.vectors = L;
  out.lattice.a = a;
  out.lattice.c = c;
  return out;
}

UnitCell build_unit_cell(const WeierstrassData& data, int res) {
  const CellLattice lat = lattice_from_data(data);
  PeriodicMesh patch = build_patch(data, res, res);
  patch.lattice = lat.vectors;
  UnitCell cell = assemble_unit_cell(patch, screw_symmetry(data), 1e-5 * data.scale);
  cell.lattice.closure_error = lat.closure_error;
  return cell;
}

}  // namespace ght
