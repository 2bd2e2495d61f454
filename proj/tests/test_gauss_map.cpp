#include <doctest.h>

#include <random>

#include "ght/gauss_map.hpp"

using ght::cd;

namespace {

const double pi = std::numbers::pi;

cd random_tau_in_domain(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(0.02, 0.98), im(0.1, 2.0);
  for (;;) {
    const cd t(re(rng), im(rng));
    if (std::abs(t - 1.0 / 3) > 1.0 / 3 && std::abs(t - 2.0 / 3) > 1.0 / 3) return t;
  }
}

}  // namespace

TEST_CASE("gsq: normalization and zeros") {
  const cd tau(0.5, 0.9);
  CHECK(std::abs(ght::gsq(tau / 6.0, tau) - 1.0) < 1e-12);
  CHECK(std::abs(ght::gsq(cd(0), tau)) < 1e-14);
  CHECK(std::abs(ght::gsq(cd(1.0 / 3), tau)) < 1e-13);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const cd t = random_tau_in_domain(rng);
    CHECK(std::abs(ght::gsq(t / 6.0, t) - 1.0) < 1e-10);
  }
}

TEST_CASE("gsq: one-third shift multiplier is exp(2 i pi/3)") {
  const cd tau(0.4, 0.8), z(0.11, 0.21);
  const cd w = std::exp(cd(0, 2 * pi / 3));
  const cd ratio = ght::gsq(z + 1.0 / 3, tau) / ght::gsq(z, tau);
  CHECK(std::abs(ratio - w) < 1e-10);
  // The sign-flipped multiplier cannot hold: its cube is -1 while the ratio's cube is 1.
  CHECK(std::abs(ratio + w) > 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 300; ++k) {
    const cd t = random_tau_in_domain(rng);
    const cd zz = u(rng) + u(rng) * t;
    const cd g = ght::gsq(zz, t);
    if (std::abs(g) < 1e-6 || std::abs(g) > 1e6) continue;
    CHECK(std::abs(ght::gsq(zz + 1.0 / 3, t) - w * g) < 1e-10 * std::abs(g));
  }
}

TEST_CASE("gsq: product form agrees on 500 samples") {
  const cd tau(0.5, 0.9);
  CHECK(std::abs(ght::gsq_product_form(tau / 6.0, tau) - 1.0) < 1e-12);
  CHECK(std::abs(ght::gsq_product_form(cd(1.0 / 3), tau)) < 1e-13);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  int n = 0;
  while (n < 500) {
    const cd t = random_tau_in_domain(rng);
    const cd z = u(rng) + u(rng) * t;
    const cd a = ght::gsq(z, t);
    if (std::abs(a) < 1e-8) continue;
    const cd b = ght::gsq_product_form(z, t);
    CHECK(std::abs(a - b) < 1e-9 * std::abs(a));
    ++n;
  }
}

TEST_CASE("gsq: pole error carries location") {
  const cd tau(0.5, 0.9);
  CHECK_THROWS_AS(ght::gsq(tau / 3.0, tau), ght::PoleError);
  try {
    ght::gsq(tau / 3.0 + 2.0 / 3 + 1.0, tau);
  } catch (const ght::PoleError& e) {
    CHECK(std::abs(e.pole - (tau / 3.0 + 2.0 / 3)) < 1e-14);
  }
  CHECK_NOTHROW(ght::gsq(tau / 3.0 + 1e-6, tau));
}

TEST_CASE("gsq: winding numbers at zeros and poles") {
  const cd tau(0.45, 0.7);
  for (const cd& z : ght::gsq_zeros(tau)) CHECK(ght::gsq_winding(z, 1e-2, tau) == 1);
  for (const cd& p : ght::gsq_poles(tau)) CHECK(ght::gsq_winding(p, 1e-2, tau) == -1);
  CHECK(ght::gsq_winding(tau / 6.0, 1e-2, tau) == 0);
}

TEST_CASE("BranchedTorus: layout invariants") {
  const ght::BranchedTorus bt(cd(0.3, 0.6));
  for (const cd& p : bt.branch_points()) CHECK(bt.is_three_division(p));
  CHECK_FALSE(bt.is_three_division(cd(0.25)));
  const auto cuts = bt.cuts();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      // Cuts are parallel segments at distinct s, hence disjoint.
      const auto [si, ti] = bt.strip_coords(cuts[i].first);
      const auto [sj, tj] = bt.strip_coords(cuts[j].first);
      CHECK(std::abs(si - sj) > 0.3);
    }
  CHECK(bt.branch_kind(cd(1.0 / 3)) == ght::BranchKind::zero);
  CHECK(bt.branch_kind(bt.tau / 3.0 + 1.0) == ght::BranchKind::pole);
  CHECK(bt.branch_kind(bt.tau / 6.0) == ght::BranchKind::none);
  // Horizontal segment at t = 1/2 crosses the three cuts; at t = 1/6 none.
  CHECK(bt.cut_crossings(bt.from_strip(-0.1, 0.5), bt.from_strip(0.9, 0.5)) == 3);
  CHECK(bt.cut_crossings(bt.from_strip(-0.1, 1.0 / 6), bt.from_strip(0.9, 1.0 / 6)) == 0);
}

TEST_CASE("TorusPath: sheet flips exactly at cut crossings") {
  const ght::BranchedTorus bt(cd(0.3, 0.6));
  const auto path = ght::TorusPath::polyline(bt, {bt.from_strip(0.05, 0.6), bt.from_strip(0.95, 0.6)}, 0, 0.01);
  int flips = 0;
  for (size_t i = 1; i < path.samples.size(); ++i) {
    CHECK(std::abs(path.samples[i].z - path.samples[i - 1].z) <= 0.01 + 1e-12);
    if (path.samples[i].sheet != path.samples[i - 1].sheet) ++flips;
  }
  CHECK(flips == 2);
  CHECK(path.samples.back().sheet == 0);
}

TEST_CASE("continue_G: monodromy around loops") {
  const cd tau(0.5, 0.9);
  const ght::BranchedTorus bt(tau);
  const cd c0 = tau / 6.0;
  const auto loop0 = ght::TorusPath::circle(bt, c0, 0.05, 64, 0);
  const cd seed = std::sqrt(ght::gsq(loop0.samples.front().z, tau));
  auto g = ght::continue_G(loop0, tau, seed);
  CHECK(std::abs(g.back() - seed) < 1e-8 * std::abs(seed));
  const auto loop1 = ght::TorusPath::circle(bt, cd(1.0 / 3), 0.05, 64, 0);
  const cd seed1 = std::sqrt(ght::gsq(loop1.samples.front().z, tau));
  g = ght::continue_G(loop1, tau, seed1);
  CHECK(std::abs(g.back() + seed1) < 1e-8 * std::abs(seed1));
  // The oracle: winding of G^2 around the enclosed point is 1, so G changes sign.
  CHECK(ght::gsq_winding(cd(1.0 / 3), 0.05, tau) == 1);
  const auto loop_pole = ght::TorusPath::circle(bt, tau / 3.0, 0.05, 64, 0);
  const cd seed2 = std::sqrt(ght::gsq(loop_pole.samples.front().z, tau));
  g = ght::continue_G(loop_pole, tau, seed2);
  CHECK(std::abs(g.back() + seed2) < 1e-8 * std::abs(seed2));
}

TEST_CASE("continue_G: real positive on 0 -> tau/3 for tau on the first arc") {
  for (double ang : {1.2, 1.7, 2.0, 2.5}) {
    const cd tau = 1.0 / 3 + std::exp(cd(0, ang)) / 3.0;
    const ght::BranchedTorus bt(tau);
    const auto path = ght::TorusPath::polyline(bt, {1e-2 * tau / 3.0, (1 - 1e-2) * tau / 3.0}, 0, 1e-3);
    const cd g0 = ght::gauss_sheet0(path.samples.front().z, tau);
    const auto g = ght::continue_G(path, tau, g0);
    double worst = 0;
    for (const cd& v : g) {
      CHECK(v.real() > 0);
      worst = std::max(worst, std::abs(v.imag()) / std::abs(v));
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("continue_G: errors near branch points") {
  const cd tau(0.5, 0.9);
  const ght::BranchedTorus bt(tau);
  const auto path = ght::TorusPath::polyline(bt, {cd(0.1, 0.0), cd(1.0 / 3 + 1e-5, 0.0)}, 0, 0.01);
  CHECK_THROWS_AS(ght::continue_G(path, tau, std::sqrt(ght::gsq(path.samples.front().z, tau))),
                  ght::ContinuationError);
}

TEST_CASE("gauss_sheet0: consistent with path continuation and sheet bookkeeping") {
  const cd tau(0.5, 0.5357937467);
  const ght::BranchedTorus bt(tau);
  CHECK(std::abs(ght::gauss_sheet0(tau / 6.0, tau) - 1.0) < 1e-14);
  // Horizontal line at t = 0.6 crosses cuts; sheet-0 values times (-1)^sheet follow continuous G.
  const auto path = ght::TorusPath::polyline(bt, {bt.from_strip(0.1, 0.6), bt.from_strip(1.6, 0.6)}, 0, 0.005);
  const auto g = ght::continue_G(path, tau, ght::gauss_sheet0(path.samples.front().z, tau));
  for (size_t i = 0; i < g.size(); i += 17) {
    const auto& s = path.samples[i];
    const cd expect = (s.sheet ? -1.0 : 1.0) * ght::gauss_sheet0(s.z, tau);
    CHECK(std::abs(g[i] - expect) < 1e-9 * std::abs(expect));
  }
  // Sheet 0 is doubly periodic.
  const cd z = bt.from_strip(0.2, 0.7);
  CHECK(std::abs(ght::gauss_sheet0(z + 1.0, tau) - ght::gauss_sheet0(z, tau)) < 1e-12);
  CHECK(std::abs(ght::gauss_sheet0(z + tau, tau) - ght::gauss_sheet0(z, tau)) < 1e-12);
  // Order-2 centers.
  CHECK(std::abs(ght::gauss_sheet0(tau / 6.0 + 1.0 / 6, tau) - std::exp(cd(0, -pi / 3))) < 1e-9);
  CHECK(std::abs(std::abs(ght::gauss_sheet0(2.0 * tau / 3.0, tau)) - 1.0) < 1e-9);
}

TEST_CASE("Second arc: segment claims for arg G and |G|") {
  for (double ang : {1.0, 1.5, 2.0}) {
    const cd tau = 2.0 / 3 + std::exp(cd(0, ang)) / 3.0;
    auto G = [&](cd z) { return ght::continue_G_segment(tau / 6.0, z, tau, 1.0); };
    struct Seg {
      cd a, b;
      double arg;  // NaN on |G| = 1 segments
      int mod;     // -1: |G| < 1, +1: |G| > 1, 0: |G| = 1
      double arg_a, arg_b;
    };
    const double nan = std::nan("");
    const std::vector<Seg> segs = {
        {0.0, (1.0 - tau) / 3.0, -pi / 6, -1, 0, 0},
        {(1.0 - tau) / 3.0, (1.0 + tau) / 6.0, nan, 0, -pi / 6, -pi / 3},
        {(1.0 + tau) / 6.0, tau / 3.0, -pi / 3, 1, 0, 0},
        {tau / 3.0, (2.0 * tau - 1.0) / 3.0, pi / 6, 1, 0, 0},
        {(2.0 * tau - 1.0) / 3.0, -(1.0 - tau) / 6.0, nan, 0, pi / 6, pi / 3},
        {-(1.0 - tau) / 6.0, 0.0, pi / 3, -1, 0, 0},
    };
    for (const auto& s : segs) {
      for (int k = 1; k <= 20; ++k) {
        const cd z = s.a + (s.b - s.a) * (k / 21.0);
        const cd g = G(z);
        if (s.mod == 0) {
          CHECK(std::abs(std::abs(g) - 1.0) < 1e-6);
        } else {
          CHECK(std::abs(std::arg(g) - s.arg) < 1e-6);
          CHECK((s.mod < 0 ? std::abs(g) < 1.0 : std::abs(g) > 1.0));
        }
      }
      if (s.mod == 0) {
        CHECK(std::abs(std::arg(G(s.a + (s.b - s.a) * 1e-7)) - s.arg_a) < 1e-5);
        CHECK(std::abs(std::arg(G(s.b + (s.a - s.b) * 1e-7)) - s.arg_b) < 1e-5);
      }
    }
  }
}

TEST_CASE("gauss_flat_points: six critical points of G^2") {
  const cd tau(0.5, 0.5357937467);
  const auto f = ght::gauss_flat_points(tau);
  REQUIRE(f.size() == 6);
  const ght::BranchedTorus bt(tau);
  bool found = false;
  for (const cd& z : f) {
    CHECK(std::abs(ght::gsq_log_derivative(z, tau)) < 1e-9);
    const auto [s, t] = bt.strip_coords(z);
    if (std::abs(s - 0.128111) < 1e-5 && std::abs(t - 0.410445) < 1e-5) found = true;
  }
  CHECK(found);
}
