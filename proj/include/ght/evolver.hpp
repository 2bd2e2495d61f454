#ifndef GHT_EVOLVER_HPP
#define GHT_EVOLVER_HPP

#include <vector>

#include "ght/assembly.hpp"
#include "ght/nets.hpp"

namespace ght {

// f = sum_v H_v^2 A_v with H_v the component of the cotangent-Laplacian mean-curvature vector along the
// area-weighted vertex normal and A_v the mixed Voronoi area. Vertices flagged in `fixed` (if given) are
// excluded from the sum.
double willmore_energy(const PeriodicMesh& mesh, const std::vector<bool>* fixed = nullptr);

// Gradient of willmore_energy with respect to the vertex positions (3 x n), by forward-mode automatic
// differentiation of each triangle's contributions.
Eigen::Matrix3Xd willmore_gradient(const PeriodicMesh& mesh, const std::vector<bool>* fixed = nullptr);

// Central differences of willmore_energy with the given step for the listed vertices (all if empty).
Eigen::Matrix3Xd willmore_gradient_fd(const PeriodicMesh& mesh, double step, const std::vector<int>& vertices = {},
                                      const std::vector<bool>* fixed = nullptr);

// Midpoint 1-to-4 subdivision; new vertices carry the tags common to both edge ends.
PeriodicMesh subdivide(const PeriodicMesh& mesh);

struct RelaxConfig {
  int max_iters = 2000;           // per level
  double energy_tol = 1e-10;      // stop when f < energy_tol
  double grad_tol = 1e-12;        // stop when |grad| < grad_tol
  bool finite_difference = false; // central-difference gradient instead of the analytic one
  double fd_step = 1e-6;          // relative to the lattice length a (or the mesh size without a lattice)
  int restart = 40;               // CG restart period; the preconditioner is rebuilt at restarts
  bool precondition = true;       // scale directions by (K M^-1 K + eps M)^-1 with frozen cotangent weights
  bool improve_mesh = true;       // tangential vertex averaging between restarts when it lowers f
  std::vector<bool> fixed;        // vertices held in place (boundary conditions)
  int target_vertices = 0;        // multilevel: subdivide until at least this many vertices
  int max_levels = 6;
};

struct RelaxState {
  PeriodicMesh mesh;
  double energy = 0;
  double grad_norm = 0;
  int iteration = 0;          // accepted iterations, all levels
  std::vector<double> trace;  // energy after every accepted iteration
  std::vector<int> level_starts;  // index into trace where each level begins
  bool converged = false;
};

// Nonlinear conjugate gradient on the vertex positions with the lattice held fixed. Throws StalledError
// (with the last state in its message) if the line search cannot decrease f before convergence.
RelaxState relax(PeriodicMesh mesh, const RelaxConfig& config);

// Relax, subdivide and relax again until config.target_vertices is reached.
RelaxState relax_multilevel(PeriodicMesh mesh, const RelaxConfig& config);

struct CrossValidation {
  double hausdorff = 0;  // symmetric, divided by a
  double c_over_a_relaxed = 0, c_over_a_analytic = 0;
  RigidMotion alignment;  // applied to the analytic mesh
  double z_shift = 0;
};

// Aligns the analytic mesh to the relaxed one (rescale to equal a, screw axes on the z axis, best rotation
// about it and vertical shift) and measures the symmetric Hausdorff distance modulo the lattice.
// Throws IncomparableError when c/a differs by more than 2%.
CrossValidation cross_validate(const PeriodicMesh& relaxed, const PeriodicMesh& analytic, const Vec3& analytic_axis);

// Symmetric Hausdorff distance between two meshes (vertex-to-surface, both directions), no alignment.
double hausdorff_distance(const PeriodicMesh& a, const PeriodicMesh& b);

// Number of segments from a vertex of `inner` to the nearest instance of a vertex of `outer` that cross
// the surface an even number of times; zero when the surface separates the two nets.
int unseparated_pairs(const PeriodicMesh& mesh, const CrystalNet& inner, const CrystalNet& outer);

}  // namespace ght

#endif
