#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "aztac/kernels.hpp"

using namespace aztac;

namespace {
KernelContext& ctx82() {
  static KernelContext ctx(ModelShape{0.5, 8, 2});
  return ctx;
}
}  // namespace

TEST_CASE("psi values and semigroup") {
  KernelContext& ctx = ctx82();
  const double a = 0.5;
  CHECK(ctx.psi(0, 3, 3) == 1.0);
  CHECK(ctx.psi(0, 3, 4) == 0.0);
  CHECK(ctx.psi(1, 0, 0) == doctest::Approx(1.0 + a * a));
  CHECK(ctx.psi(1, 0, 1) == doctest::Approx(a));
  CHECK(ctx.psi(1, 0, -1) == doctest::Approx(a * (1.0 + a * a)));
  CHECK(ctx.psi(1, 0, 2) == 0.0);
  // psi_2 * psi_2 = psi_4 pointwise on x-y in [-6, 2]
  for (int d = -6; d <= 2; ++d) {
    double conv = 0.0;
    for (int t = -40; t <= 40; ++t) conv += ctx.psi(1, 0, t) * ctx.psi(1, t, d);
    CHECK(conv == doctest::Approx(ctx.psi(2, 0, d)).epsilon(1e-10));
  }
}

TEST_CASE("psi half-step semigroup and Toeplitz symbol") {
  KernelContext& ctx = ctx82();
  const int n = 8;
  // psi_{0,0} is a Kronecker delta
  CHECK(ctx.psi_from_zero(0, 2, 2) == 1.0);
  CHECK(ctx.psi_from_zero(0, 2, 3) == 0.0);
  // psi_{0,2} * psi_{2,2n+1} = psi_{0,2n+1}
  for (int u : {-2, 0, 1})
    for (int v : {-2, 0, 2}) {
      double conv = 0.0;
      for (int t = -40; t <= 40; ++t)
        conv += ctx.psi_from_zero(2, u, t) * ctx.psi_to_end(2, t, v);
      CHECK(conv == doctest::Approx(ctx.psi_to_end(0, u, v)).epsilon(1e-10));
    }
  // psi_{0,2n+1}(u,v) equals the Toeplitz symbol moment of rho_a
  for (int u : {-1, 0, 2})
    for (int v : {-2, 1, 3})
      CHECK(ctx.psi_to_end(0, u, v) ==
            doctest::Approx(ctx.moment(u - v)).epsilon(1e-10));
  (void)n;
}

TEST_CASE("varphi and the saddle function F") {
  KernelContext& ctx = ctx82();
  const double a = 0.5;
  KernelContext ctx0(ModelShape{1e-4, 8, 2});
  CHECK(std::abs(ctx0.varphi(cplx(0.7, 0.2)) - 1.0) < 1e-2);
  CHECK(std::abs(ctx.varphi(cplx(-2.0, 0.0))) < 1e-12);  // root at -1/a
  // n Phi(z) = 2t F(z) + sigma~ rho (2t)^{1/3} log(-z) exactly, checked at
  // the saddle z = v0 (with the sigma implied by this (n, m))
  const int n = 8, m = 2, t = n / 2;
  double v0 = -(1.0 - a) / (1.0 + a);
  double F = std::log(1.0 + a * v0) + std::log(1.0 - a / v0) +
             2.0 / (a + 1.0 / a) * std::log(-v0);
  double lhs = 2.0 * m * std::log(-v0) +
               n * (std::log(1.0 + a * v0) + std::log(1.0 - a / v0));
  double rhs = 2.0 * t * F + (2.0 * m - 4.0 * t / (a + 1.0 / a)) * std::log(-v0);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
}

TEST_CASE("g function support and closed values") {
  KernelContext& ctx = ctx82();
  const double a = 0.5;
  const int n = 8;
  for (int l = n + 1; l < n + 6; ++l) CHECK(ctx.g1(l) == 0.0);
  CHECK(ctx.g1(n) == doctest::Approx(std::pow(a, n + 1)).epsilon(1e-13));
  // residue-sum oracle: g^(2)_2(n=2) = 136/625 at a = 1/2 (computed by hand
  // from the poles at 0 and a)
  KernelContext c2(ModelShape{0.5, 2, 0});
  CHECK(c2.g2(2) == doctest::Approx(136.0 / 625.0).epsilon(1e-12));
}

TEST_CASE("h functions: contour vs series routes and the residue split") {
  KernelContext ctx(ModelShape{0.5, 4, 1});
  const cplx z(-0.2, 0.0);
  const int k = 3;
  cplx contour = ctx.h1_bar_contour(k, z);
  cplx series = ctx.h1_bar_series(k, z);
  CHECK(std::abs(contour - series) < 1e-10);
  // h1 - h1_bar = 1/((-z)^{k+1} phi(2n, z))
  cplx split = ctx.h1(k, cplx(1.2, 0.4)) - ctx.h1_bar_contour(k, cplx(1.2, 0.4));
  cplx expect = 1.0 / (neg_pow(cplx(1.2, 0.4), k + 1) * ctx.varphi(cplx(1.2, 0.4)));
  CHECK(std::abs(split - expect) < 1e-10);
  // h2_bar series route terminates on the g1 support and matches the contour
  cplx w(0.7, -0.3);
  CHECK(std::abs(ctx.h2_bar_contour(2, w) - ctx.h2_bar_series(2, w)) < 1e-10);
}

TEST_CASE("window operator routes and transpose symmetry") {
  KernelContext& ctx = ctx82();
  const int M = ctx.M();
  double worst = 0.0, worst_t = 0.0;
  for (auto [k, l] : std::vector<std::pair<int, int>>{
           {M, M}, {M + 1, M}, {M, M + 2}, {M + 3, M + 1}}) {
    worst = std::max(worst,
                     std::abs(ctx.K1_contour(k, l, 1e12).real() - ctx.K1_entry(k, l)));
    // K^(1)(0)^T = K^(2)(0): the w -> 0 contour of K2 matches the transpose
    worst_t = std::max(
        worst_t, std::abs(ctx.K2_contour(k, l, 1e-12).real() - ctx.K1_entry(l, k)));
  }
  CHECK(worst < 1e-10);
  CHECK(worst_t < 1e-10);
  // columns with l > n vanish
  for (int l = 9; l < 12; ++l) CHECK(ctx.K1_entry(M, l) == 0.0);
}

TEST_CASE("K3 contour equals its rank-structure at sample points") {
  KernelContext& ctx = ctx82();
  const int M = ctx.M();
  cplx z(1.15, 0.1), w(0.8, -0.05);
  for (auto [k, l] :
       std::vector<std::pair<int, int>>{{M, M}, {M + 1, M + 2}}) {
    cplx lhs = ctx.K3_contour(k, l, z, w);
    cplx rhs = ctx.K1_entry(k + 1, l + 1) +
               (z / w - 1.0) * ctx.h1(k + 1, z) * ctx.h2(l + 1, w);
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
}

TEST_CASE("Fredholm determinant identities") {
  KernelContext& ctx = ctx82();
  const int M = ctx.M();
  // rank-one update identity (38): H1_M(z^{-1}) = H_M(0)(1 - R1(z^{-1}))
  for (cplx z : {cplx(1.2, 0.3), cplx(0.9, 0.0), cplx(-1.1, 0.1)}) {
    cplx lhs = ctx.fredholm_H1(M, z);
    cplx rhs = ctx.H_M0() * (1.0 - ctx.R1(z));
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
  for (cplx w : {cplx(0.8, 0.2), cplx(-0.6, 0.0)}) {
    cplx lhs = ctx.fredholm_H2(M, w);
    cplx rhs = ctx.H_M0() * (1.0 - ctx.R2(w));
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }
  // p > n: the operator vanishes beyond the g1 support
  CHECK(ctx.fredholm_H0(9) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(ctx.fredholm_H1(10, cplx(1.2, 0.0)) - 1.0) < 1e-12);
}

TEST_CASE("Toeplitz equals Z times the Fredholm determinant") {
  KernelContext& ctx = ctx82();
  CHECK(ctx.toeplitz_tau_direct(0) == 1.0);
  double Z = ctx.toeplitz_Z();
  CHECK(Z == doctest::Approx(std::pow(1.25, 72)));
  for (int p : {2, 5}) {
    double td = ctx.toeplitz_tau_direct(p);
    double tf = ctx.toeplitz_tau_fredholm(p);
    CHECK(td == doctest::Approx(tf).epsilon(1e-10));
  }
}

TEST_CASE("R/S/T/Q structure") {
  KernelContext& ctx = ctx82();
  // decomposition (39): R = S + T e^{-n Phi}/(a-z) at three z values
  for (cplx z : {cplx(1.1, 0.2), cplx(0.95, -0.1), cplx(-0.9, 0.3)}) {
    cplx direct = ctx.R1_direct(z);
    CHECK(std::abs(direct - ctx.R1(z)) < 1e-9);
  }
  for (cplx w : {cplx(0.9, 0.1), cplx(-0.7, 0.2)}) {
    cplx direct = ctx.R2_direct(w);
    CHECK(std::abs(direct - ctx.R2(w)) < 1e-9);
  }
  CHECK(ctx.norm_identity_residual() < 1e-8);
  // Q1 is supported on [2m+1, n]
  CHECK(ctx.Q1(ctx.M() - 1) == 0.0);
  CHECK(ctx.Q1(9) == 0.0);
  CHECK(ctx.Q1(ctx.M()) != 0.0);
}

TEST_CASE("one-Aztec kernel") {
  const double a = 0.5;
  QuadratureConfig quad;
  // rewrite identity: K^OneAztec_{n+1}(2(n-r+1), m-x+1; 2(n-s+1), m-y+1)
  //   = -1_{s<r} (-1)^{x-y} psi_{2(s-r)}(x,y) + S(2r,x;2s,y)
  KernelContext ctx(ModelShape{a, 8, 2});
  const int n = 8, m = 2;
  std::vector<std::array<int, 4>> pts = {
      {4, 0, 4, 0}, {3, 1, 5, -2}, {6, -1, 2, 2}, {5, 2, 5, -1}, {2, -2, 7, 1}};
  for (auto [r, x, s, y] : pts) {
    double lhs = one_aztec_kernel(a, n + 1, n - r + 1, m - x + 1, n - s + 1,
                                  m - y + 1, quad);
    double rhs = ctx.S_func(r, x, s, y);
    if (s < r) rhs += -parity_sign(x - y) * ctx.psi(s - r, x, y);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
  // the 1_{s>r} term vanishes for s <= r: the kernel is the bare double
  // integral there, which is the s = r value continued
  double bare = one_aztec_kernel(a, 4, 2, 0, 2, 0, quad);
  CHECK(std::isfinite(bare));
}

TEST_CASE("one-Aztec kernel vs single-diamond enumeration") {
  // The order-(n+1) kernel at line 2(n-k+1) and position -j reproduces the
  // dot occupancies of the order-n diamond's k-th black anti-diagonal
  // (e = 2k-n-2), the same shift-and-reflect dictionary as the rewrite
  // identity. The diag-k trace equals its dot count k.
  const int n = 2;
  const double a = 0.5;
  Region az = Region::single_diamond(n);
  std::map<int, std::map<int, double>> occ;  // e -> j -> weight
  std::map<int, std::map<int, int>> count_hist;
  double z = 0.0;
  enumerate_tilings(az, [&](const Tiling& t) {
    double w = tiling_weight(t, a);
    z += w;
    for (auto& [e, dots] : single_diamond_blue_dots(t)) {
      count_hist[e][static_cast<int>(dots.size())]++;
      for (int j : dots) occ[e][j] += w;
    }
  });
  QuadratureConfig quad;
  for (int k = 1; k <= n; ++k) {
    int e = 2 * k - n - 2;
    // the dot count per diag is deterministic and equals k
    CHECK(count_hist[e].size() == 1);
    CHECK(count_hist[e].count(k) == 1);
    int r = n - k + 1;
    double tr = 0.0, worst = 0.0;
    for (int j = -n; j <= n; ++j) {
      double ker = one_aztec_kernel(a, n + 1, r, -j, r, -j, quad);
      double emp = occ[e].count(j) ? occ[e][j] / z : 0.0;
      // positions outside the diag carry the frozen sea (1 below, 0 above)
      bool on_diag = occ[e].count(j) || (count_hist[e].count(k) && false);
      if (occ[e].count(j)) {
        worst = std::max(worst, std::abs(ker - emp));
        tr += ker;
      }
      (void)on_diag;
      (void)emp;
    }
    CHECK(worst < 1e-8);
    CHECK(tr == doctest::Approx(static_cast<double>(k)).epsilon(1e-8));
  }
}

TEST_CASE("extended kernel representations agree (unit points)") {
  KernelContext& ctx = ctx82();
  std::vector<std::array<int, 4>> pts = {
      {4, 0, 4, 0}, {4, 1, 4, -1}, {3, 2, 5, 1}, {5, -1, 3, 2}, {2, 0, 6, 0}};
  for (auto [r, x, s, y] : pts) {
    double em = ctx.ext_kernel(KernelRep::EM, r, x, s, y);
    double k1 = ctx.ext_kernel(KernelRep::K1, r, x, s, y);
    double k2 = ctx.ext_kernel(KernelRep::K2, r, x, s, y);
    double sd = ctx.ext_kernel(KernelRep::Saddle, r, x, s, y);
    CHECK(k1 == doctest::Approx(em).epsilon(1e-9));
    CHECK(k2 == doctest::Approx(em).epsilon(1e-9));
    CHECK(sd == doctest::Approx(em).epsilon(1e-9));
  }
}

TEST_CASE("kernel vs enumeration at (2,0): two-point determinants") {
  ModelShape shape{0.5, 2, 0};
  Region rg = Region::double_diamond(shape);
  KernelContext ctx(shape);
  const int r = 1;
  double z = 0.0;
  std::map<std::pair<int, int>, double> gap2;
  std::map<int, double> gap1;
  enumerate_tilings(rg, [&](const Tiling& t) {
    double w = tiling_weight(t, shape.a);
    z += w;
    ParticleConfig pc = particles(t);
    const auto& dots = pc.blue_dots[r];
    auto has = [&](int p) {
      return std::binary_search(dots.begin(), dots.end(), p);
    };
    for (int x = -2; x <= 2; ++x)
      if (!has(x)) gap1[x] += w;
    for (int x = -2; x <= 2; ++x)
      for (int y = x + 1; y <= 2; ++y)
        if (!has(x) && !has(y)) gap2[{x, y}] += w;
  });
  for (int x = -2; x <= 2; ++x) {
    double det = 1.0 - ctx.ext_kernel(KernelRep::EM, r, x, r, x);
    CHECK(det == doctest::Approx(gap1[x] / z).epsilon(1e-9));
  }
  for (auto& [xy, wgt] : gap2) {
    auto [x, y] = xy;
    double kxx = ctx.ext_kernel(KernelRep::EM, r, x, r, x);
    double kxy = ctx.ext_kernel(KernelRep::EM, r, x, r, y);
    double kyx = ctx.ext_kernel(KernelRep::EM, r, y, r, x);
    double kyy = ctx.ext_kernel(KernelRep::EM, r, y, r, y);
    double det = (1.0 - kxx) * (1.0 - kyy) - kxy * kyx;
    CHECK(det == doctest::Approx(wgt / z).epsilon(1e-9));
  }
}

TEST_CASE("gap probabilities: basics, monotonicity, conjugation invariance") {
  KernelContext& ctx = ctx82();
  CHECK(ctx.gap_probability({}, {}) == 1.0);
  CHECK(ctx.gap_probability({4}, {{2, 1}}) == 1.0);  // empty window
  double g1 = ctx.gap_probability({4}, {{0, 0}});
  double g2 = ctx.gap_probability({4}, {{0, 1}});
  double g3 = ctx.gap_probability({4}, {{-1, 1}});
  CHECK(g1 > g2);
  CHECK(g2 > g3);
  CHECK(g1 <= 1.0);
  CHECK(g3 >= 0.0);
  // conjugating the kernel by lambda^{x-y+r-s} leaves determinants unchanged
  const double lam = 1.3;
  std::vector<std::pair<int, int>> sites = {{4, -1}, {4, 0}, {6, 1}};
  Eigen::MatrixXd B(3, 3), Bc(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double v = ctx.ext_kernel(KernelRep::EM, sites[i].first, sites[i].second,
                                sites[j].first, sites[j].second);
      B(i, j) = v;
      double expo = sites[i].second - sites[j].second + sites[i].first -
                    sites[j].first;
      Bc(i, j) = v * std::pow(lam, expo);
    }
  double d1 = (Eigen::MatrixXd::Identity(3, 3) - B).determinant();
  double d2 = (Eigen::MatrixXd::Identity(3, 3) - Bc).determinant();
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-10));
}

TEST_CASE("two-line gap at (4,1) matches enumeration") {
  ModelShape shape{0.5, 4, 1};
  Region rg = Region::double_diamond(shape);
  KernelContext ctx(shape);
  double z = 0.0, hit = 0.0;
  enumerate_tilings(rg, [&](const Tiling& t) {
    double w = tiling_weight(t, shape.a);
    z += w;
    ParticleConfig pc = particles(t);
    const auto& d2 = pc.blue_dots[2];
    const auto& d3 = pc.blue_dots[3];
    bool ok = !std::binary_search(d2.begin(), d2.end(), 0) &&
              !std::binary_search(d3.begin(), d3.end(), 1);
    if (ok) hit += w;
  });
  double det = ctx.gap_probability({2, 3}, {{0, 0}, {1, 1}});
  CHECK(det == doctest::Approx(hit / z).epsilon(1e-8));
}

TEST_CASE("C function identities") {
  KernelContext& ctx = ctx82();
  // integral vs resolvent-sum routes at u = 0
  for (int x : {0, 1, -1, 2, -2}) {
    double ci = ctx.C_function_integral(0, x);
    double cs = (x == 0) ? ctx.C_function_sum(0) : ctx.C_function_sum(x);
    CHECK(ci == doctest::Approx(cs).epsilon(1e-9));
  }
  // exchange identity (both sides of the alpha/beta resummation) at x = 1
  const int M = ctx.M(), n = 8, x = 1;
  double lhs = 0.0;
  for (int k = M; k <= n; ++k)
    for (int l = M; l <= ctx.k_max(); ++l) {
      double q = ctx.Q1(k) * ctx.Q2(l);
      if (q == 0.0) continue;
      for (int beta = 0; l + beta <= n; ++beta)
        lhs -= q * ctx.g2(k + beta + x) * ctx.g1(l + beta);
    }
  for (int k = M; k <= n; ++k)
    if (k + x <= ctx.k_max()) lhs += ctx.Q1(k) * ctx.Q2(k + x);
  double rhs = 0.0;  // x > 0: only the first sum contributes
  for (int k = M; k <= n; ++k) rhs += ctx.Q1(k) * ctx.g2(k + x);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
}

TEST_CASE("tail stability under window and quadrature refinement") {
  ModelShape shape{0.5, 8, 2};
  KernelContext base(shape);
  QuadratureConfig fine;
  fine.initial_nodes = 256;
  fine.rel_tol = 1e-13;
  KernelContext refined(shape, fine);
  for (auto [r, x, s, y] :
       std::vector<std::array<int, 4>>{{4, 0, 4, 0}, {3, 1, 5, -2}}) {
    double v0 = base.ext_kernel(KernelRep::K1, r, x, s, y);
    double v1 = refined.ext_kernel(KernelRep::K1, r, x, s, y);
    CHECK(std::abs(v0 - v1) < 1e-10);
  }
}
