#ifndef GHT_QUADRATURE_HPP
#define GHT_QUADRATURE_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ght/gauss_map.hpp"

namespace ght {

// n-point Gauss-Legendre rule mapped to [0, 1], nodes ascending.
template <typename Real>
struct GaussLegendre {
  std::vector<Real> nodes, weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    const Real pi = std::numbers::pi_v<Real>;
    for (int i = 0; i < n; ++i) {
      Real x = std::cos(pi * (i + Real(0.75)) / (n + Real(0.5)));
      Real dp = 0;
      for (int it = 0; it < 100; ++it) {
        Real p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const Real dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < std::numeric_limits<Real>::epsilon()) break;
      }
      nodes[n - 1 - i] = (1 + x) / 2;
      weights[n - 1 - i] = 1 / ((1 - x * x) * dp * dp);
    }
  }

  template <typename F>
  auto integrate(F&& f, Real a, Real b) const {
    auto sum = f(a + (b - a) * nodes[0]) * weights[0];
    for (size_t i = 1; i < nodes.size(); ++i) sum += f(a + (b - a) * nodes[i]) * weights[i];
    return sum * (b - a);
  }
};

const GaussLegendre<double>& gauss_legendre_20();

enum class SeedAt { start, midpoint };

struct GIntegrals {
  cd int_g{0};     // integral of G dz
  cd int_ginv{0};  // integral of dz / G
  cd g_mid{0};
  cd g_end{0};     // G at b (0 or infinity at branch points)
  int panels = 0;
};

// Integrals of G and 1/G along the straight segment a -> b with G continued from g_seed (given at a
// or at the midpoint). Each half is mapped by z = e + (m - e) u^2 from its endpoint e; at a branch
// endpoint G is carried as F u^{+-1} so the square-root singularity disappears.
GIntegrals integrate_g_segment(cd tau, cd a, cd b, cd g_seed, SeedAt where, double rel_tol = 1e-13);

}  // namespace ght

#endif
