#include <algorithm>
#include <array>
#include <functional>
#include <tuple>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ght/errors.hpp"
#include "ght/nets.hpp"

namespace ght {

namespace {

const double pi = std::numbers::pi;

Vec3 wrap(const Vec3& x) { return x - x.array().floor().matrix(); }

bool integral(const Vec3& d, double tol = 1e-9) { return (d - d.array().round().matrix()).norm() < tol; }

Offset rounded(const Vec3& d) { return d.array().round().cast<int>().matrix(); }

// Closest distance between segments p0-p1 and q0-q1 (either may be degenerate).
double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  const Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
  const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
  double s = 0, t = 0;
  if (a <= 1e-300 && e <= 1e-300) return r.norm();
  if (a <= 1e-300) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= 1e-300) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2), den = a * e - b * b;
      s = den > 1e-14 * a * e ? std::clamp((b * f - c * e) / den, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return (p0 + s * d1 - q0 - t * d2).norm();
}

int find_vertex(const std::vector<Vec3>& verts, const Vec3& x, Offset* shift) {
  for (size_t i = 0; i < verts.size(); ++i)
    if (integral(x - verts[i])) {
      if (shift) *shift = rounded(x - verts[i]);
      return int(i);
    }
  return -1;
}

// Image of an edge under op as (u, v, offset); false if an endpoint is not a vertex.
bool map_edge(const CrystalNet& net, const FracOp& op, const CrystalNet::Edge& e, CrystalNet::Edge* out) {
  Offset su, sv;
  const int u = find_vertex(net.vertices, op(net.vertices[e.u]), &su);
  const int v = find_vertex(net.vertices, op(net.vertices[e.v] + e.offset.cast<double>()), &sv);
  if (u < 0 || v < 0) return false;
  *out = {u, v, sv - su, e.orbit};
  return true;
}

bool same_edge(const CrystalNet::Edge& a, const CrystalNet::Edge& b) {
  return (a.u == b.u && a.v == b.v && a.offset == b.offset) || (a.u == b.v && a.v == b.u && a.offset == -b.offset);
}

void add_orbit(CrystalNet& net, const CrystalNet::Edge& seed) {
  for (const auto& op : net.ops) {
    CrystalNet::Edge img;
    if (!map_edge(net, op, seed, &img)) throw GenerationError("generate: edge image leaves the vertex orbit");
    bool known = false;
    for (const auto& e : net.edges) known = known || same_edge(e, img);
    if (!known) net.edges.push_back(img);
  }
}

std::vector<Vec3> vertex_orbit(const std::vector<FracOp>& ops, const Vec3& seed) {
  std::vector<Vec3> out;
  for (const auto& op : ops) {
    const Vec3 x = wrap(op(seed));
    if (find_vertex(out, x, nullptr) < 0) out.push_back(x);
  }
  for (auto& x : out)
    for (int k = 0; k < 3; ++k)
      if (std::abs(x[k] - 1) < 1e-12 || std::abs(x[k]) < 1e-12) x[k] = 0;
  return out;
}

CrystalNet start_net(const std::string& name, double c_over_a, const Vec3& seed, int orbit_size) {
  if (!(c_over_a > 0) || !std::isfinite(c_over_a)) throw DomainError("generate: c/a must be positive");
  CrystalNet net;
  net.name = name;
  net.a = 1;
  net.c = c_over_a;
  net.ops = p6222_operators();
  if (c_over_a < 0.4 || c_over_a > 2.9)
    net.warnings.push_back("c/a = " + std::to_string(c_over_a) + " is outside the validated range [0.4, 2.9]");
  net.vertices = vertex_orbit(net.ops, seed);
  if (int(net.vertices.size()) != orbit_size)
    throw GenerationError("generate: seed orbit has " + std::to_string(net.vertices.size()) + " points, expected " +
                          std::to_string(orbit_size));
  std::sort(net.vertices.begin(), net.vertices.end(), [](const Vec3& a, const Vec3& b) {
    return std::tie(a.z(), a.y(), a.x()) < std::tie(b.z(), b.y(), b.x());
  });
  return net;
}

}  // namespace

FracOp FracOp::operator*(const FracOp& o) const {
  FracOp r;
  r.W = W * o.W;
  r.w = wrap(W.cast<double>() * o.w + w);
  return r;
}

std::vector<FracOp> p6222_operators() {
  FracOp screw, two;
  screw.W << 1, -1, 0, 1, 0, 0, 0, 0, 1;
  screw.w = Vec3(0, 0, 1.0 / 3);
  two.W << 1, -1, 0, 0, -1, 0, 0, 0, -1;
  std::vector<FracOp> ops = {FracOp{}};
  auto known = [&](const FracOp& g) {
    for (const auto& h : ops)
      if (h.W == g.W && integral(h.w - g.w)) return true;
    return false;
  };
  for (size_t i = 0; i < ops.size(); ++i) {
    for (const FracOp& gen : {screw, two}) {
      const FracOp g = gen * ops[i];
      if (!known(g)) ops.push_back(g);
    }
    if (ops.size() > 12) break;
  }
  if (ops.size() != 12) throw GenerationError("p6222_operators: closure does not have order 12");
  return ops;
}

Mat3 hexagonal_lattice(double a, double c) {
  Mat3 L;
  L << a, -a / 2, 0, 0, a * std::sqrt(3.0) / 2, 0, 0, 0, c;
  return L;
}

Vec3 CrystalNet::edge_start(int e) const { return cartesian(vertices[edges[e].u]); }

Vec3 CrystalNet::edge_end(int e) const { return cartesian(vertices[edges[e].v] + edges[e].offset.cast<double>()); }

std::vector<int> CrystalNet::degrees() const {
  std::vector<int> d(vertices.size(), 0);
  for (const auto& e : edges) {
    ++d[e.u];
    ++d[e.v];
  }
  return d;
}

int CrystalNet::edge_orbit_count() const {
  std::vector<int> parent(edges.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (size_t e = 0; e < edges.size(); ++e)
    for (const auto& op : ops) {
      Edge img;
      if (!map_edge(*this, op, edges[e], &img)) continue;
      for (size_t f = 0; f < edges.size(); ++f)
        if (same_edge(edges[f], img)) parent[find(int(f))] = find(int(e));
    }
  int n = 0;
  for (size_t e = 0; e < edges.size(); ++e) n += find(int(e)) == int(e);
  return n;
}

RigidMotion CrystalNet::cartesian_op(const FracOp& op) const {
  const Mat3 L = lattice();
  return {L * op.W.cast<double>() * L.inverse(), L * op.w};
}

CrystalNet generate_qtz(double c_over_a) {
  CrystalNet net = start_net("qtz", c_over_a, Vec3(0.5, 0, 0), 3);
  // Shortest link from vertex 0 to any other vertex instance.
  const Vec3 p0 = net.cartesian(net.vertices[0]);
  double best = 1e300;
  CrystalNet::Edge seed;
  for (size_t v = 0; v < net.vertices.size(); ++v)
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        for (int k = -1; k <= 1; ++k) {
          const Offset o(i, j, k);
          if (v == 0 && o == Offset::Zero()) continue;
          const double d = (net.cartesian(net.vertices[v] + o.cast<double>()) - p0).norm();
          if (d < best - 1e-12) {
            best = d;
            seed = {0, int(v), o, 0};
          }
        }
  add_orbit(net, seed);
  return net;
}

CrystalNet generate_qzd(double c_over_a) {
  CrystalNet net = start_net("qzd", c_over_a, Vec3(0, 0, 0.5), 3);
  int seed = -1;
  for (size_t v = 0; v < net.vertices.size(); ++v)
    if (std::abs(net.vertices[v].z() - 0.5) < 1e-12) seed = int(v);
  Offset s;
  const int up = find_vertex(net.vertices, net.vertices[seed] + Vec3(0, 0, 1.0 / 3), &s);
  add_orbit(net, {seed, up, s, 0});
  add_orbit(net, {seed, seed, Offset(1, 0, 0), 1});
  return net;
}

bool symmetry_closed(const CrystalNet& net, double tol) {
  for (const auto& op : net.ops) {
    for (const auto& v : net.vertices) {
      bool hit = false;
      for (const auto& w : net.vertices) hit = hit || integral(op(v) - w, tol);
      if (!hit) return false;
    }
    for (const auto& e : net.edges) {
      CrystalNet::Edge img;
      if (!map_edge(net, op, e, &img)) return false;
      bool hit = false;
      for (const auto& f : net.edges) hit = hit || same_edge(f, img);
      if (!hit) return false;
    }
  }
  return true;
}

namespace {

template <class Skip>
double edge_pair_min(const CrystalNet& a, const CrystalNet& b, Skip skip) {
  const Mat3 L = a.lattice();
  double best = 1e300;
  for (size_t e = 0; e < a.edges.size(); ++e)
    for (size_t f = 0; f < b.edges.size(); ++f)
      for (int i = -2; i <= 2; ++i)
        for (int j = -2; j <= 2; ++j)
          for (int k = -2; k <= 2; ++k) {
            const Offset s(i, j, k);
            if (skip(int(e), int(f), s)) continue;
            const Vec3 sh = L * s.cast<double>();
            best = std::min(best, segment_distance(a.edge_start(int(e)), a.edge_end(int(e)), b.edge_start(int(f)) + sh,
                                                   b.edge_end(int(f)) + sh));
          }
  return best;
}

}  // namespace

double net_distance(const CrystalNet& a, const CrystalNet& b) {
  return edge_pair_min(a, b, [](int, int, const Offset&) { return false; });
}

double min_nonadjacent_distance(const CrystalNet& net) {
  return edge_pair_min(net, net, [&](int e, int f, const Offset& s) {
    const auto &x = net.edges[e], &y = net.edges[f];
    const std::pair<int, Offset> ex[2] = {{x.u, Offset::Zero()}, {x.v, x.offset}};
    const std::pair<int, Offset> ey[2] = {{y.u, s}, {y.v, Offset(y.offset + s)}};
    for (const auto& p : ex)
      for (const auto& q : ey)
        if (p.first == q.first && p.second == q.second) return true;
    return false;
  });
}

double qzd_edge_angle(const CrystalNet& net) {
  Vec3 dir[2] = {Vec3::Zero(), Vec3::Zero()};
  for (size_t e = 0; e < net.edges.size(); ++e) {
    const auto& ed = net.edges[e];
    if (ed.u != 0 || ed.orbit > 1) continue;
    dir[ed.orbit] = (net.edge_end(int(e)) - net.edge_start(int(e))).normalized();
  }
  return std::acos(std::clamp(dir[0].dot(dir[1]), -1.0, 1.0));
}

namespace {

struct RingRef {
  std::vector<int> ids;
  Offset offset = Offset::Zero();
};

struct Hull {
  std::vector<Eigen::Vector3i> triangles;  // indices past the input refer to `apexes`
  std::vector<Vec3> apexes;
};

// Convex hull of points on a sphere around `center`, without the faces whose corners all carry the same
// group label. A face with more than three coplanar corners becomes a star around an apex on the sphere
// above its centroid, which keeps the triangulation invariant under the symmetries of the point set.
Hull sphere_hull(const std::vector<Vec3>& p, const std::vector<int>& group, const Vec3& center) {
  const int n = int(p.size());
  double scale = 0;
  for (const auto& x : p) scale = std::max(scale, (x - center).norm());
  const double eps = 1e-9 * scale;
  Hull out;
  std::map<std::vector<int>, bool> polygons;
  auto push = [&](int a, int b, int c, const Vec3& pa, const Vec3& pb, const Vec3& pc) {
    Eigen::Vector3i t(a, b, c);
    if ((pb - pa).cross(pc - pa).dot((pa + pb + pc) / 3 - center) < 0) std::swap(t[1], t[2]);
    out.triangles.push_back(t);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Vec3 nrm = (p[j] - p[i]).cross(p[k] - p[i]);
        if (nrm.norm() < 1e-12 * scale * scale) continue;
        nrm.normalize();
        bool pos = false, neg = false;
        std::vector<int> plane;
        for (int l = 0; l < n; ++l) {
          const double s = nrm.dot(p[l] - p[i]);
          if (s > eps) pos = true;
          else if (s < -eps) neg = true;
          else plane.push_back(l);
          if (pos && neg) break;
        }
        if (pos && neg) continue;
        if (group[i] == group[j] && group[j] == group[k]) continue;
        if (plane.size() == 3) {
          push(i, j, k, p[i], p[j], p[k]);
          continue;
        }
        if (polygons.count(plane)) continue;
        polygons[plane] = true;
        Vec3 c = Vec3::Zero();
        for (int l : plane) c += p[l];
        c /= double(plane.size());
        const Vec3 e1 = (p[plane[0]] - c).normalized(), e2 = nrm.cross(e1);
        std::sort(plane.begin(), plane.end(), [&](int a, int b) {
          return std::atan2((p[a] - c).dot(e2), (p[a] - c).dot(e1)) < std::atan2((p[b] - c).dot(e2), (p[b] - c).dot(e1));
        });
        const Vec3 apex = center + scale * (c - center).normalized();
        const int id = n + int(out.apexes.size());
        out.apexes.push_back(apex);
        for (size_t m = 0; m < plane.size(); ++m) {
          const int a = plane[m], b = plane[(m + 1) % plane.size()];
          push(id, a, b, apex, p[a], p[b]);
        }
      }
  return out;
}

}  // namespace

PeriodicMesh tubular_mesh(const CrystalNet& net, double radius, int segments) {
  if (segments < 3) throw DomainError("tubular_mesh: need at least 3 segments");
  if (!(radius > 0)) throw DomainError("tubular_mesh: radius must be positive");
  const double limit = 0.5 * min_nonadjacent_distance(net);
  if (radius >= limit)
    throw GeometryError("tubular_mesh: radius " + std::to_string(radius) + " exceeds half the distance between non-adjacent edges (" +
                        std::to_string(limit) + ")");
  const Mat3 L = net.lattice();
  const int nv = int(net.vertices.size()), ne = int(net.edges.size());
  std::vector<Vec3> P(nv);
  for (int v = 0; v < nv; ++v) P[v] = net.cartesian(net.vertices[v]);

  // Directions of the edge ends leaving each vertex.
  struct End {
    int edge, side;
    Vec3 dir;
  };
  std::vector<std::vector<End>> ends(nv);
  std::vector<Vec3> udir(ne);
  std::vector<double> len(ne);
  for (int e = 0; e < ne; ++e) {
    const Vec3 d = net.edge_end(e) - net.edge_start(e);
    len[e] = d.norm();
    udir[e] = d / len[e];
    ends[net.edges[e].u].push_back({e, 0, udir[e]});
    ends[net.edges[e].v].push_back({e, 1, -udir[e]});
  }
  // Rings sit at distance dist[v] from the vertex so that neighbouring rings stay apart on the sphere.
  std::vector<double> dist(nv, 0.5 * radius);
  for (int v = 0; v < nv; ++v)
    for (size_t i = 0; i < ends[v].size(); ++i)
      for (size_t j = i + 1; j < ends[v].size(); ++j) {
        const double ang = std::acos(std::clamp(ends[v][i].dir.dot(ends[v][j].dir), -1.0, 1.0));
        if (ang < 1e-6) throw GeometryError("tubular_mesh: coincident edge directions");
        dist[v] = std::max(dist[v], 1.25 * radius / std::tan(ang / 2));
      }
  for (int e = 0; e < ne; ++e)
    if (dist[net.edges[e].u] + dist[net.edges[e].v] > len[e] - 0.5 * radius)
      throw GeometryError("tubular_mesh: radius too large for the junction spacing along an edge");

  // Ring frame: the axis of the 2-fold that reverses the edge, when there is one.
  std::vector<Vec3> e1(ne), e2(ne);
  for (int e = 0; e < ne; ++e) {
    Vec3 axis = Vec3::Zero();
    for (const auto& op : net.ops) {
      CrystalNet::Edge img;
      const auto& ed = net.edges[e];
      if (!map_edge(net, op, ed, &img)) continue;
      if (img.u == ed.v && img.v == ed.u && img.offset == -ed.offset && ed.u != ed.v) {
        const Mat3 R = net.cartesian_op(op).R;
        Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (R + R.transpose()));
        axis = es.eigenvectors().col(2);
        break;
      }
    }
    axis -= axis.dot(udir[e]) * udir[e];
    if (axis.norm() < 1e-6) {
      axis = udir[e].cross(std::abs(udir[e].z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX());
      axis -= axis.dot(udir[e]) * udir[e];
    }
    e1[e] = axis.normalized();
    e2[e] = udir[e].cross(e1[e]);
  }

  PeriodicMesh m;
  std::vector<Vec3> pts;
  auto ring = [&](int e, const Vec3& center, double phase) {
    RingRef r;
    for (int k = 0; k < segments; ++k) {
      const double phi = 2 * pi * (k + phase) / segments;
      r.ids.push_back(int(pts.size()));
      pts.push_back(center + radius * (std::cos(phi) * e1[e] + std::sin(phi) * e2[e]));
    }
    return r;
  };
  std::vector<std::array<RingRef, 2>> end_ring(ne);
  for (int e = 0; e < ne; ++e) {
    const auto& ed = net.edges[e];
    end_ring[e][0] = ring(e, P[ed.u] + dist[ed.u] * udir[e], 0);
    end_ring[e][1] = ring(e, P[ed.v] - dist[ed.v] * udir[e], 0);
  }

  std::vector<Eigen::Vector3i> tris;
  std::vector<std::array<Offset, 3>> offs;
  auto push = [&](int a, int b, int c, const Offset& oa, const Offset& ob, const Offset& oc, const Vec3& inside) {
    const Vec3 pa = pts[a] + L * oa.cast<double>(), pb = pts[b] + L * ob.cast<double>(), pc = pts[c] + L * oc.cast<double>();
    const Vec3 nrm = (pb - pa).cross(pc - pa);
    if (nrm.dot((pa + pb + pc) / 3 - inside) < 0) {
      tris.emplace_back(a, c, b);
      offs.push_back({oa, oc, ob});
    } else {
      tris.emplace_back(a, b, c);
      offs.push_back({oa, ob, oc});
    }
  };

  // Sleeves: an odd number of intermediate rings, alternately rotated by half a step.
  const double spacing = 2 * pi * radius / segments * std::sqrt(3.0) / 2;
  for (int e = 0; e < ne; ++e) {
    const auto& ed = net.edges[e];
    const Vec3 a = P[ed.u] + dist[ed.u] * udir[e];
    const double sleeve = len[e] - dist[ed.u] - dist[ed.v];
    int gaps = std::max(2, int(std::lround(sleeve / spacing)));
    if (gaps % 2) ++gaps;
    std::vector<RingRef> rings = {end_ring[e][0]};
    for (int g = 1; g < gaps; ++g) rings.push_back(ring(e, a + sleeve * g / gaps * udir[e], 0.5 * (g % 2)));
    RingRef last = end_ring[e][1];
    last.offset = ed.offset;
    rings.push_back(last);
    for (int g = 0; g < gaps; ++g) {
      const RingRef &r0 = rings[g], &r1 = rings[g + 1];
      const Vec3 mid = a + sleeve * (g + 0.5) / gaps * udir[e];
      for (int k = 0; k < segments; ++k) {
        const int k1 = (k + 1) % segments;
        // Lower ring unrotated: triangles (r0[k], r0[k1], r1[k]) and (r1[k], r0[k1], r1[k1]); otherwise mirrored.
        if (g % 2 == 0) {
          push(r0.ids[k], r0.ids[k1], r1.ids[k], r0.offset, r0.offset, r1.offset, mid);
          push(r1.ids[k], r0.ids[k1], r1.ids[k1], r1.offset, r0.offset, r1.offset, mid);
        } else {
          push(r0.ids[k], r1.ids[k1], r1.ids[k], r0.offset, r1.offset, r1.offset, mid);
          push(r0.ids[k], r0.ids[k1], r1.ids[k1], r0.offset, r0.offset, r1.offset, mid);
        }
      }
    }
  }
  // Junctions.
  for (int v = 0; v < nv; ++v) {
    std::vector<Vec3> hp;
    std::vector<int> group, id;
    for (size_t i = 0; i < ends[v].size(); ++i) {
      const RingRef& r = end_ring[ends[v][i].edge][ends[v][i].side];
      for (int k : r.ids) {
        hp.push_back(pts[k]);
        group.push_back(int(i));
        id.push_back(k);
      }
    }
    const Hull hull = sphere_hull(hp, group, P[v]);
    for (const auto& x : hull.apexes) {
      id.push_back(int(pts.size()));
      pts.push_back(x);
    }
    for (const auto& t : hull.triangles) {
      tris.emplace_back(id[t[0]], id[t[1]], id[t[2]]);
      offs.push_back({Offset::Zero(), Offset::Zero(), Offset::Zero()});
    }
  }
  m.vertices.resize(3, Eigen::Index(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) m.vertices.col(Eigen::Index(i)) = pts[i];
  for (size_t t = 0; t < tris.size(); ++t) m.add_triangle(tris[t][0], tris[t][1], tris[t][2], offs[t][0], offs[t][1], offs[t][2]);
  m.lattice = L;
  m.tags.assign(pts.size(), 0);
  return m;
}

}  // namespace ght
