#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/AutoDiff>

#include "ght/errors.hpp"
#include "ght/evolver.hpp"

namespace ght {

namespace {

using AD = Eigen::AutoDiffScalar<Eigen::Matrix<double, 9, 1>>;
template <class T>
using V3 = Eigen::Matrix<T, 3, 1>;

// Corner of the obtuse angle (or -1), decided on the double values.
int obtuse_corner(const std::array<Vec3, 3>& p) {
  int obtuse = -1;
  for (int c = 0; c < 3; ++c)
    if ((p[(c + 1) % 3] - p[c]).dot(p[(c + 2) % 3] - p[c]) < 0) obtuse = c;
  return obtuse;
}

// Per-triangle contributions to the cotangent sums D (half-cotangent weights), the mixed areas A and the
// area-weighted normals N (the same for all corners).
template <class T>
void triangle_terms(const std::array<V3<T>, 3>& p, int obtuse, std::array<V3<T>, 3>& D, std::array<T, 3>& A, V3<T>& N) {
  T cot[3];
  N = (p[1] - p[0]).cross(p[2] - p[0]);
  const T twice_area = sqrt(N.squaredNorm());
  for (int c = 0; c < 3; ++c) {
    const V3<T> u = p[(c + 1) % 3] - p[c], v = p[(c + 2) % 3] - p[c];
    cot[c] = u.dot(v) / twice_area;
  }
  for (int c = 0; c < 3; ++c) D[c].setZero();
  for (int c = 0; c < 3; ++c) {
    const int i = (c + 1) % 3, j = (c + 2) % 3;
    const V3<T> e = (p[i] - p[j]) * (T(0.5) * cot[c]);
    D[i] += e;
    D[j] -= e;
  }
  for (int c = 0; c < 3; ++c) {
    if (obtuse < 0) {
      const int b = (c + 1) % 3, d = (c + 2) % 3;
      A[c] = ((p[b] - p[c]).squaredNorm() * cot[d] + (p[d] - p[c]).squaredNorm() * cot[b]) / T(8);
    } else {
      A[c] = twice_area * T(obtuse == c ? 0.25 : 0.125);
    }
  }
}

struct Sums {
  Eigen::Matrix3Xd D, N;
  Eigen::VectorXd A;
};

Sums cotan_sums(const PeriodicMesh& m) {
  const int n = m.num_vertices();
  Sums s{Eigen::Matrix3Xd::Zero(3, n), Eigen::Matrix3Xd::Zero(3, n), Eigen::VectorXd::Zero(n)};
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto p = m.triangle_points(t);
    std::array<Vec3, 3> D;
    std::array<double, 3> A;
    Vec3 N;
    triangle_terms<double>(p, obtuse_corner(p), D, A, N);
    for (int c = 0; c < 3; ++c) {
      s.D.col(m.triangles[t][c]) += D[c];
      s.A[m.triangles[t][c]] += A[c];
      s.N.col(m.triangles[t][c]) += N;
    }
  }
  return s;
}

double scale_of(const PeriodicMesh& m) {
  if (m.lattice) return m.lattice->col(0).norm();
  const Vec3 lo = m.vertices.rowwise().minCoeff(), hi = m.vertices.rowwise().maxCoeff();
  return std::max((hi - lo).maxCoeff(), 1e-300);
}

double min_edge(const PeriodicMesh& m) {
  double e = 1e300;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto p = m.triangle_points(t);
    for (int c = 0; c < 3; ++c) e = std::min(e, (p[(c + 1) % 3] - p[c]).norm());
  }
  return e;
}

struct Subdivision {
  PeriodicMesh mesh;
  std::vector<std::pair<int, int>> parents;  // for each new vertex
};

Subdivision subdivide_impl(const PeriodicMesh& m) {
  Subdivision out;
  PeriodicMesh& s = out.mesh;
  s.lattice = m.lattice;
  std::vector<Vec3> pts;
  for (int v = 0; v < m.num_vertices(); ++v) pts.push_back(m.vertices.col(v));
  std::vector<std::uint8_t> tags = m.tags;
  tags.resize(m.num_vertices(), 0);
  // Edge key: (u, v, offset of v relative to u) with u < v, or u == v and a positive offset.
  std::map<std::tuple<int, int, int, int, int>, int> mid;
  auto midpoint = [&](int u, const Offset& ou, int v, const Offset& ov, Offset* corner_offset) {
    Offset rel = ov - ou;
    int a = u, b = v;
    Offset base = ou;
    const bool swap = u > v || (u == v && std::tie(rel[0], rel[1], rel[2]) < std::make_tuple(0, 0, 0));
    if (swap) {
      std::swap(a, b);
      rel = -rel;
      base = ov;
    }
    *corner_offset = base;
    const auto key = std::make_tuple(a, b, rel[0], rel[1], rel[2]);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    pts.push_back(0.5 * (pts[a] + pts[b] + m.lattice_shift(rel)));
    tags.push_back(tags[a] & tags[b]);
    out.parents.emplace_back(a, b);
    return mid[key] = int(pts.size()) - 1;
  };
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles[t];
    std::array<Offset, 3> o = m.offsets.empty() ? std::array<Offset, 3>{Offset::Zero(), Offset::Zero(), Offset::Zero()}
                                                : m.offsets[t];
    int e[3];
    Offset eo[3];
    for (int c = 0; c < 3; ++c) e[c] = midpoint(tri[c], o[c], tri[(c + 1) % 3], o[(c + 1) % 3], &eo[c]);
    s.add_triangle(tri[0], e[0], e[2], o[0], eo[0], eo[2]);
    s.add_triangle(tri[1], e[1], e[0], o[1], eo[1], eo[0]);
    s.add_triangle(tri[2], e[2], e[1], o[2], eo[2], eo[1]);
    s.add_triangle(e[0], e[1], e[2], eo[0], eo[1], eo[2]);
  }
  s.vertices.resize(3, Eigen::Index(pts.size()));
  for (size_t i = 0; i < pts.size(); ++i) s.vertices.col(Eigen::Index(i)) = pts[i];
  s.tags = tags;
  return out;
}

bool is_fixed(const std::vector<bool>* fixed, int v) { return fixed && !fixed->empty() && (*fixed)[v]; }

}  // namespace

double willmore_energy(const PeriodicMesh& mesh, const std::vector<bool>* fixed) {
  const Sums s = cotan_sums(mesh);
  double f = 0;
  for (int v = 0; v < mesh.num_vertices(); ++v)
    if (!is_fixed(fixed, v)) {
      const double h = s.D.col(v).dot(s.N.col(v).normalized());
      f += h * h / (4 * s.A[v]);
    }
  return f;
}

Eigen::Matrix3Xd willmore_gradient(const PeriodicMesh& mesh, const std::vector<bool>* fixed) {
  const Sums s = cotan_sums(mesh);
  const int n = mesh.num_vertices();
  // df/dD_v, df/dA_v and df/dN_v.
  Eigen::Matrix3Xd wD(3, n), wN(3, n);
  Eigen::VectorXd wA(n);
  for (int v = 0; v < n; ++v) {
    if (is_fixed(fixed, v)) {
      wD.col(v).setZero();
      wN.col(v).setZero();
      wA[v] = 0;
      continue;
    }
    const double len = s.N.col(v).norm();
    const Vec3 nv = s.N.col(v) / len, D = s.D.col(v);
    const double h = D.dot(nv);
    wD.col(v) = h / (2 * s.A[v]) * nv;
    wA[v] = -h * h / (4 * s.A[v] * s.A[v]);
    wN.col(v) = h / (2 * s.A[v] * len) * (D - h * nv);
  }
  Eigen::Matrix3Xd g = Eigen::Matrix3Xd::Zero(3, n);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto pd = mesh.triangle_points(t);
    std::array<V3<AD>, 3> p;
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 3; ++k) p[c][k] = AD(pd[c][k], 9, 3 * c + k);
    std::array<V3<AD>, 3> D;
    std::array<AD, 3> A;
    V3<AD> N;
    triangle_terms<AD>(p, obtuse_corner(pd), D, A, N);
    AD local(0.0);
    local.derivatives().setZero();
    for (int c = 0; c < 3; ++c) {
      const int v = mesh.triangles[t][c];
      for (int k = 0; k < 3; ++k) local += D[c][k] * wD(k, v) + N[k] * wN(k, v);
      local += A[c] * wA[v];
    }
    for (int c = 0; c < 3; ++c) g.col(mesh.triangles[t][c]) += local.derivatives().segment<3>(3 * c);
  }
  return g;
}

Eigen::Matrix3Xd willmore_gradient_fd(const PeriodicMesh& mesh, double step, const std::vector<int>& vertices,
                                      const std::vector<bool>* fixed) {
  std::vector<int> list = vertices;
  if (list.empty())
    for (int v = 0; v < mesh.num_vertices(); ++v) list.push_back(v);
  Eigen::Matrix3Xd g = Eigen::Matrix3Xd::Zero(3, mesh.num_vertices());
  PeriodicMesh m = mesh;
  for (int v : list)
    for (int k = 0; k < 3; ++k) {
      const double x = m.vertices(k, v);
      m.vertices(k, v) = x + step;
      const double fp = willmore_energy(m, fixed);
      m.vertices(k, v) = x - step;
      const double fm = willmore_energy(m, fixed);
      m.vertices(k, v) = x;
      g(k, v) = (fp - fm) / (2 * step);
    }
  return g;
}

PeriodicMesh subdivide(const PeriodicMesh& mesh) { return subdivide_impl(mesh).mesh; }

namespace {

class Relaxer {
 public:
  Relaxer(PeriodicMesh mesh, const RelaxConfig& cfg) : m_(std::move(mesh)), cfg_(cfg) {
    fixed_ = cfg.fixed;
    fixed_.resize(m_.num_vertices(), false);
  }

  RelaxState run() {
    RelaxState st;
    double f = energy();
    st.trace.push_back(f);
    Eigen::Matrix3Xd g = gradient(), z, d, g_old, z_old;
    int since_restart = 0;
    double alpha = 1;
    bool restart = true;
    for (int it = 0; it < cfg_.max_iters; ++it) {
      if (f < cfg_.energy_tol || g.norm() < cfg_.grad_tol) {
        st.converged = true;
        break;
      }
      if (restart) {
        if (cfg_.improve_mesh && it > 0 && tangential_smoothing(f)) {
          st.trace.push_back(f);
          g = gradient();
        }
        if (cfg_.precondition) factor();
        since_restart = 0;
      }
      z = precondition(g);
      if (restart) {
        d = -z;
      } else {
        const double beta = std::max(0.0, (g.cwiseProduct(z - z_old)).sum() / (g_old.cwiseProduct(z_old)).sum());
        d = -z + beta * d;
        if ((d.cwiseProduct(g)).sum() >= 0) d = -z;
      }
      double f_new = 0;
      if (!line_search(f, g, d, alpha, &f_new)) {
        if (!restart) {
          restart = true;
          --it;
          continue;
        }
        std::ostringstream msg;
        msg.precision(17);
        msg << "relax: line search failed at iteration " << st.iteration << " with energy " << f << " and gradient norm "
            << g.norm();
        throw StalledError(msg.str());
      }
      f = f_new;
      st.trace.push_back(f);
      ++st.iteration;
      g_old = g;
      z_old = z;
      g = gradient();
      restart = ++since_restart >= cfg_.restart;
    }
    if (f < cfg_.energy_tol || g.norm() < cfg_.grad_tol) st.converged = true;
    st.energy = f;
    st.grad_norm = g.norm();
    st.mesh = std::move(m_);
    return st;
  }

 private:
  PeriodicMesh m_;
  RelaxConfig cfg_;
  std::vector<bool> fixed_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool factored_ = false;

  double energy() const { return willmore_energy(m_, &fixed_); }

  Eigen::Matrix3Xd gradient() const {
    Eigen::Matrix3Xd g = cfg_.finite_difference ? willmore_gradient_fd(m_, cfg_.fd_step * scale_of(m_), {}, &fixed_)
                                                : willmore_gradient(m_, &fixed_);
    for (int v = 0; v < m_.num_vertices(); ++v)
      if (fixed_[v]) g.col(v).setZero();
    return g;
  }

  // (K M^-1 K + eps M) with the current cotangent weights; fixed vertices decoupled.
  void factor() {
    const int n = m_.num_vertices();
    std::vector<Eigen::Triplet<double>> trip;
    for (int t = 0; t < m_.num_triangles(); ++t) {
      const auto p = m_.triangle_points(t);
      for (int c = 0; c < 3; ++c) {
        const int i = (c + 1) % 3, j = (c + 2) % 3;
        const Vec3 u = p[i] - p[c], v = p[j] - p[c];
        const double w = 0.5 * u.dot(v) / u.cross(v).norm();
        const int a = m_.triangles[t][i], b = m_.triangles[t][j];
        trip.emplace_back(a, a, w);
        trip.emplace_back(b, b, w);
        trip.emplace_back(a, b, -w);
        trip.emplace_back(b, a, -w);
      }
    }
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(trip.begin(), trip.end());
    const Sums s = cotan_sums(m_);
    Eigen::VectorXd M = s.A.cwiseMax(1e-3 * s.A.mean());
    const double eps = 1.0 / (M.sum() * M.sum());
    Eigen::SparseMatrix<double> P = K * M.cwiseInverse().asDiagonal() * K;
    Eigen::SparseMatrix<double> Md(n, n);
    Md.reserve(Eigen::VectorXi::Constant(n, 1));
    for (int v = 0; v < n; ++v) Md.insert(v, v) = eps * M[v];
    P += Md;
    for (int k = 0; k < P.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(P, k); it; ++it)
        if (fixed_[it.row()] || fixed_[it.col()]) it.valueRef() = it.row() == it.col() ? 1.0 : 0.0;
    P.prune(0.0);
    ldlt_.compute(P);
    factored_ = ldlt_.info() == Eigen::Success;
  }

  Eigen::Matrix3Xd precondition(const Eigen::Matrix3Xd& g) const {
    if (!cfg_.precondition || !factored_) return g;
    Eigen::MatrixXd z = ldlt_.solve(Eigen::MatrixXd(g.transpose()));
    Eigen::Matrix3Xd out = z.transpose();
    for (int v = 0; v < m_.num_vertices(); ++v)
      if (fixed_[v]) out.col(v).setZero();
    // The energy is translation invariant; drop the rigid drift the eps M term introduces.
    if (std::none_of(fixed_.begin(), fixed_.end(), [](bool b) { return b; }))
      out.colwise() -= out.rowwise().mean();
    return out;
  }

  // Armijo backtracking along d, with the first trial capped so no vertex moves more than a quarter of
  // the shortest edge.
  bool line_search(double f, const Eigen::Matrix3Xd& g, const Eigen::Matrix3Xd& d, double& alpha, double* f_new) {
    const double slope = (g.cwiseProduct(d)).sum();
    if (!(slope < 0)) return false;
    const double dmax = d.colwise().norm().maxCoeff();
    const double cap = 0.25 * min_edge(m_) / std::max(dmax, 1e-300);
    double a = std::min(2 * alpha, cap);
    const Eigen::Matrix3Xd x0 = m_.vertices;
    for (int k = 0; k < 60; ++k) {
      m_.vertices = x0 + a * d;
      const double ft = energy();
      if (std::isfinite(ft) && ft <= f + 1e-4 * a * slope && ft <= f) {
        alpha = a;
        *f_new = ft;
        return true;
      }
      a *= 0.5;
    }
    m_.vertices = x0;
    alpha = std::max(alpha * 1e-3, 1e-12);
    return false;
  }

  // Moves free vertices halfway to the tangential projection of their neighbour average; kept only if
  // the energy does not increase.
  bool tangential_smoothing(double& f) {
    const int n = m_.num_vertices();
    Eigen::Matrix3Xd sum = Eigen::Matrix3Xd::Zero(3, n), nrm = Eigen::Matrix3Xd::Zero(3, n);
    Eigen::VectorXd cnt = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < m_.num_triangles(); ++t) {
      const auto p = m_.triangle_points(t);
      const Vec3 fn = (p[1] - p[0]).cross(p[2] - p[0]);
      for (int c = 0; c < 3; ++c) {
        const int v = m_.triangles[t][c];
        nrm.col(v) += fn;
        sum.col(v) += p[(c + 1) % 3] - p[c] + p[(c + 2) % 3] - p[c];
        cnt[v] += 2;
      }
    }
    const Eigen::Matrix3Xd x0 = m_.vertices;
    for (int v = 0; v < n; ++v) {
      if (fixed_[v] || cnt[v] == 0) continue;
      const Vec3 nv = nrm.col(v).normalized();
      const Vec3 delta = sum.col(v) / cnt[v];
      m_.vertices.col(v) += 0.5 * (delta - nv.dot(delta) * nv);
    }
    const double ft = energy();
    if (std::isfinite(ft) && ft <= f) {
      f = ft;
      return true;
    }
    m_.vertices = x0;
    return false;
  }
};

}  // namespace

RelaxState relax(PeriodicMesh mesh, const RelaxConfig& config) { return Relaxer(std::move(mesh), config).run(); }

RelaxState relax_multilevel(PeriodicMesh mesh, const RelaxConfig& config) {
  RelaxConfig cfg = config;
  cfg.fixed.resize(mesh.num_vertices(), false);
  RelaxState total;
  for (int level = 0;; ++level) {
    total.level_starts.push_back(int(total.trace.size()));
    RelaxState st = relax(std::move(mesh), cfg);
    total.trace.insert(total.trace.end(), st.trace.begin(), st.trace.end());
    total.iteration += st.iteration;
    total.energy = st.energy;
    total.grad_norm = st.grad_norm;
    total.converged = st.converged;
    if (st.mesh.num_vertices() >= config.target_vertices || level + 1 >= config.max_levels) {
      total.mesh = std::move(st.mesh);
      break;
    }
    Subdivision sub = subdivide_impl(st.mesh);
    for (const auto& [a, b] : sub.parents) cfg.fixed.push_back(cfg.fixed[a] && cfg.fixed[b]);
    mesh = std::move(sub.mesh);
  }
  return total;
}

double hausdorff_distance(const PeriodicMesh& a, const PeriodicMesh& b) {
  const TriangleGrid ga(a), gb(b);
  double h = 0;
  for (int v = 0; v < a.num_vertices(); ++v) h = std::max(h, gb.distance(a.vertices.col(v)));
  for (int v = 0; v < b.num_vertices(); ++v) h = std::max(h, ga.distance(b.vertices.col(v)));
  return h;
}

CrossValidation cross_validate(const PeriodicMesh& relaxed, const PeriodicMesh& analytic, const Vec3& analytic_axis) {
  if (!relaxed.lattice || !analytic.lattice) throw DomainError("cross_validate: both meshes need a lattice");
  const Mat3 &Lr = *relaxed.lattice, &La = *analytic.lattice;
  CrossValidation out;
  const double ar = Lr.col(0).norm(), aa = La.col(0).norm();
  out.c_over_a_relaxed = Lr.col(2).norm() / ar;
  out.c_over_a_analytic = La.col(2).norm() / aa;
  if (std::abs(out.c_over_a_relaxed / out.c_over_a_analytic - 1) > 0.02) {
    std::ostringstream msg;
    msg << "cross_validate: c/a " << out.c_over_a_relaxed << " vs " << out.c_over_a_analytic << " differ by more than 2%";
    throw IncomparableError(msg.str());
  }
  const double s = ar / aa, c = Lr.col(2).norm();
  const Vec3 axis(analytic_axis.x(), analytic_axis.y(), 0);
  // Relaxed screw axis: the vertical line through the lattice origin.
  const TriangleGrid grid(relaxed);
  std::vector<int> sample;
  const int stride = std::max(1, analytic.num_vertices() / 400);
  for (int v = 0; v < analytic.num_vertices(); v += stride) sample.push_back(v);

  double best_cost = 1e300;
  for (int flip = 0; flip < 2; ++flip) {
    // Base alignment: scale, axis to the origin, a1 onto a1; the flip is the half-turn about a1, which
    // preserves the screw direction up to orientation of c.
    Mat3 F = Mat3::Identity();
    if (flip) F = Eigen::Vector3d(1, -1, -1).asDiagonal();
    const Mat3 R = rotation_z(std::atan2(Lr(1, 0), Lr(0, 0))) * F * rotation_z(-std::atan2(La(1, 0), La(0, 0)));
    RigidMotion base{s * R, -s * R * axis};
    auto cost = [&](double dz) {
      double sum = 0;
      for (int v : sample) sum += grid.distance(base(Vec3(analytic.vertices.col(v))) + Vec3(0, 0, dz));
      return sum / double(sample.size());
    };
    const int steps = 90;
    double bz = 0, bc = 1e300;
    for (int k = 0; k < steps; ++k) {
      const double dz = c * k / steps, v = cost(dz);
      if (v < bc) {
        bc = v;
        bz = dz;
      }
    }
    double lo = bz - c / steps, hi = bz + c / steps;
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo), f1 = cost(x1), f2 = cost(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = cost(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = cost(x2);
      }
    }
    const double z = 0.5 * (lo + hi), fz = cost(z);
    if (fz < best_cost) {
      best_cost = fz;
      out.z_shift = z;
      out.alignment = RigidMotion{base.R, base.t + Vec3(0, 0, z)};
    }
  }
  PeriodicMesh moved = analytic;
  for (int v = 0; v < moved.num_vertices(); ++v) moved.vertices.col(v) = out.alignment(Vec3(analytic.vertices.col(v)));
  moved.lattice = out.alignment.R * La;
  out.hausdorff = hausdorff_distance(relaxed, moved) / ar;
  return out;
}

int unseparated_pairs(const PeriodicMesh& mesh, const CrystalNet& inner, const CrystalNet& outer) {
  const TriangleGrid grid(mesh, 2);
  const Mat3 L = outer.lattice();
  int bad = 0;
  for (const auto& fi : inner.vertices)
    for (const auto& fo : outer.vertices) {
      const Vec3 p = inner.cartesian(fi);
      Vec3 q = outer.cartesian(fo);
      double best = 1e300;
      for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
          for (int k = -1; k <= 1; ++k) {
            const Vec3 x = outer.cartesian(fo) + L * Vec3(i, j, k);
            if ((x - p).norm() < best) {
              best = (x - p).norm();
              q = x;
            }
          }
      std::vector<int> near;
      grid.query_box(p.cwiseMin(q), p.cwiseMax(q), [&](int e) { near.push_back(e); });
      std::sort(near.begin(), near.end());
      near.erase(std::unique(near.begin(), near.end()), near.end());
      int hits = 0;
      for (int e : near) {
        const auto t = grid.points(grid.entries()[e]);
        hits += segment_hits_triangle(p, q, t[0], t[1], t[2]);
      }
      bad += hits % 2 == 0;
    }
  return bad;
}

}  // namespace ght
