#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "aztac/airy.hpp"

using namespace aztac;

TEST_CASE("Airy function: contour vs series oracle and landmarks") {
  const double ai0 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
  CHECK(airy_ai(0.0) == doctest::Approx(ai0).epsilon(1e-12));
  for (double x : {-2.0, -1.0, -0.3, 0.4, 1.1, 2.0})
    CHECK(airy_ai(x) == doctest::Approx(airy_ai_series(x)).epsilon(1e-10));
  // the first zero lies near -2.338107: detect the sign change
  CHECK(airy_ai(-2.33) > 0.0);
  CHECK(airy_ai(-2.35) < 0.0);
  double lo = -2.35, hi = -2.33;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    (airy_ai(mid) > 0 ? hi : lo) = mid;
  }
  CHECK(0.5 * (lo + hi) == doctest::Approx(-2.33810741).epsilon(1e-6));
  // decay envelope
  double v8 = airy_ai(8.0);
  CHECK(v8 > 0.0);
  CHECK(v8 < 1e-6);
  CHECK(v8 < std::exp(-2.0 / 3.0 * std::pow(8.0, 1.5)));
}

TEST_CASE("deformed Airy function routes agree") {
  CHECK(airy_s(0.0, 0.7) == doctest::Approx(airy_ai(0.7)).epsilon(1e-12));
  CHECK(airy_s(0.5, 1.0) == doctest::Approx(airy_s_contour(0.5, 1.0)).epsilon(1e-9));
  CHECK(airy_s(-0.4, 0.3) ==
        doctest::Approx(airy_s_contour(-0.4, 0.3)).epsilon(1e-9));
  // s -> -s via the closed form
  double s = 0.3, x = 0.8;
  double lhs = airy_s(-s, x);
  double rhs = std::exp(-s * x - 2.0 * s * s * s / 3.0 +
                        4.0 * s * s * s / 3.0 * 0.0) *
               airy_ai(x + s * s) * std::exp(0.0);
  CHECK(lhs == doctest::Approx(std::exp(-s * x + 2.0 * (-s) * (-s) * (-s) / 3.0) *
                               airy_ai(x + s * s)));
  (void)rhs;
}

TEST_CASE("deformed Airy kernel routes and symmetry") {
  CHECK(K_airy_ab(0.0, 0.0, 1.0, 1.0) > 0.0);
  CHECK(K_airy_ab(0.3, 0.2, 0.5, 1.0) ==
        doctest::Approx(K_airy_ab_closed(0.3, 0.2, 0.5, 1.0)).epsilon(1e-9));
  CHECK(K_airy_ab(0.0, 0.0, 0.4, 1.3) ==
        doctest::Approx(K_airy_ab(0.0, 0.0, 1.3, 0.4)).epsilon(1e-10));
}

TEST_CASE("heat kernel basics") {
  CHECK(heat_p(0.7, 0.3, 0.3) ==
        doctest::Approx(1.0 / std::sqrt(4.0 * 3.14159265358979 * 0.7)));
  CHECK(heat_p(0.7, 0.2, -0.4) == doctest::Approx(heat_p(0.7, -0.4, 0.2)));
  // Gaussian normalization by quadrature
  double tot = 0.0, h = 0.01;
  for (double x = -12.0; x <= 12.0; x += h) tot += heat_p(0.5, 0.0, x) * h;
  CHECK(tot == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("extended Airy process kernel conjugation identity") {
  double sg = 1.0;
  double t1 = 0.2, x1 = 0.1, t2 = -0.1, x2 = 0.3;
  double lhs = 0.0;
  if (t1 > t2) lhs -= heat_p(t1 - t2, x1, x2);
  lhs += K_airy_ab(t1, t2, sg - x1, sg - x2);
  double q1 = std::exp(t1 * (sg - x1) + 2.0 / 3.0 * t1 * t1 * t1);
  double q2 = std::exp(t2 * (sg - x2) + 2.0 / 3.0 * t2 * t2 * t2);
  double rhs = q1 / q2 *
               airy_process_kernel(t2, sg - x2 + t2 * t2, t1,
                                   sg - x1 + t1 * t1);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  // lambda-integral tail is stable: the [0,40] grid already carries it
  double again = airy_process_kernel(t2, sg - x2 + t2 * t2, t1,
                                     sg - x1 + t1 * t1);
  CHECK(again == doctest::Approx(rhs * q2 / q1).epsilon(1e-12));
}

TEST_CASE("Airy context resolvent") {
  AiryContext big(8.0 / std::pow(2.0, 2.0 / 3.0));  // sigma~ = 8
  CHECK(big.operator_norm() < 1e-6);
  const auto& Q = big.Q_grid();
  for (size_t i = 0; i < Q.size(); i += 17)
    CHECK(std::abs(Q[i] - airy_ai(big.nodes()[i])) < 1e-6);

  AiryContext ctx(1.0);
  CHECK(ctx.operator_norm() < 1.0);
  // defining equation Q = Ai + K w Q on the grid
  const auto& k = ctx.nodes();
  const auto& w = ctx.weights();
  const auto& q = ctx.Q_grid();
  double worst = 0.0;
  for (size_t i = 0; i < k.size(); ++i) {
    double acc = airy_ai(k[i]);
    for (size_t j = 0; j < k.size(); ++j)
      acc += ctx.K_airy()(i, j) * w[j] * q[j];
    worst = std::max(worst, std::abs(acc - q[i]));
  }
  CHECK(worst < 1e-9);
  // P_hat(0) equals the direct double quadrature in the other order
  cplx p0 = ctx.P_hat(0.0);
  double direct = 0.0;
  for (size_t i = 0; i < k.size(); ++i) {
    double inner = 0.0;
    double h = 0.02;
    for (double b = h / 2; b < 40.0; b += h) inner += airy_ai(k[i] + b) * h;
    direct -= w[i] * q[i] * inner;
  }
  CHECK(p0.real() == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("grid refinement stability of the resolvent data") {
  AiryContext base(1.0);
  AiryContext finer(1.0, 14.0, 48, 14);
  AiryContext longer(1.0, 22.0, 48, 12);
  cplx q1 = base.Q_hat(cplx(0.4, 0.3));
  CHECK(std::abs(q1 - finer.Q_hat(cplx(0.4, 0.3))) < 1e-8);
  CHECK(std::abs(q1 - longer.Q_hat(cplx(0.4, 0.3))) < 1e-8);
}

TEST_CASE("calA structure") {
  AiryContext big(8.0 / std::pow(2.0, 2.0 / 3.0));
  // at large sigma~ and very negative xi the integral term is negligible
  double tau = 0.3, xi = -6.0;
  auto A = big.calA(tau, xi);
  auto S = big.S_vec(tau, xi);
  double worst = 0.0;
  for (size_t i = 0; i < A.size(); ++i)
    worst = std::max(worst, std::abs(A[i] - S[i]));
  CHECK(worst < 1e-6);
}

TEST_CASE("calC symmetry and structure") {
  AiryContext ctx(1.0);
  CHECK(ctx.calC(0.4, 0.7) == doctest::Approx(ctx.calC(0.4, -0.7)).epsilon(1e-10));
  // xi = 0: the mirror doubles one term
  double direct = ctx.calC(0.2, 0.0);
  CHECK(std::isfinite(direct));
  AiryContext big(8.0 / std::pow(2.0, 2.0 / 3.0));
  // sigma~ large: dominated by the first (single-Q) term
  const auto& k = big.nodes();
  const auto& w = big.weights();
  const auto& q = big.Q_grid();
  double sp = 0.0, cb = std::pow(2.0, -1.0 / 3.0);
  double approx = 0.0;
  for (size_t i = 0; i < k.size(); ++i)
    approx += w[i] * q[i] * (airy_s(sp, k[i] + cb * 0.5) + airy_s(sp, k[i] - cb * 0.5));
  approx *= std::pow(2.0, -1.0 / 3.0);
  CHECK(big.calC(0.0, 0.5) == doctest::Approx(approx).epsilon(1e-6));
}

TEST_CASE("operator identity K_Ai = T^2 on the grid, refining") {
  // T^2 built on the [sigma~, sigma~+L] grid must reproduce the defining
  // u-integral of the Airy kernel, evaluated on the independent [0, 40]
  // auxiliary grid; the discrepancy shrinks under grid refinement
  double prev = 1e9;
  for (auto [panels, deg] : std::vector<std::pair<int, int>>{{14, 6}, {32, 12}}) {
    AiryContext ctx(1.0, 14.0, panels, deg);
    const auto& K = ctx.K_airy();
    double worst = 0.0;
    for (size_t i = 0; i < 4; ++i)
      for (size_t j = 0; j < 4; ++j) {
        size_t a = i * ctx.grid_size() / 4, b = j * ctx.grid_size() / 4;
        double direct = K_airy_ab(0.0, 0.0, ctx.nodes()[a], ctx.nodes()[b]);
        worst = std::max(worst, std::abs(K(a, b) - direct));
      }
    CHECK(worst < prev);
    prev = worst;
  }
  CHECK(prev < 1e-9);
}

TEST_CASE("tacnode forms agree and satisfy the symmetries") {
  AiryContext ctx(1.0);
  TacnodePoint p{0.3, 0.4, -0.2, -0.1, 0.5};
  double vi = ctx.tacnode(TacForm::I, p);
  double vii = ctx.tacnode(TacForm::II, p);
  double viii = ctx.tacnode(TacForm::III, p);
  double vbr = ctx.tacnode(TacForm::Brownian, p);
  CHECK(vii == doctest::Approx(vi).epsilon(1e-8));
  CHECK(vbr == doctest::Approx(vi).epsilon(1e-8));
  CHECK(viii == doctest::Approx(vi).epsilon(2e-7));
  // tau1 = tau2 removes the heat term: forms still agree
  TacnodePoint pe{0.1, -0.6, 0.1, 0.8, 0.5};
  CHECK(ctx.tacnode(TacForm::II, pe) ==
        doctest::Approx(ctx.tacnode(TacForm::I, pe)).epsilon(1e-8));
}

TEST_CASE("form (i) to (ii) rearrangement pieces") {
  // (K7): K_Ai^{(t1,-t2)}(s-x1, s-x2) = 2^{1/3} <S^{t1}_{-x1}, S^{-t2}_{-x2}>
  AiryContext ctx(1.0);
  double t1 = 0.2, x1 = 0.5, t2 = -0.1, x2 = -0.3;
  auto s1 = ctx.S_vec(t1, -x1);
  auto s2 = ctx.S_vec(-t2, -x2);
  double lhs = K_airy_ab(t1, t2, 1.0 - x1, 1.0 - x2);
  double rhs = std::pow(2.0, 1.0 / 3.0) * ctx.inner(s1, s2);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-7));
}

TEST_CASE("perturbation decay in sigma") {
  // the resolvent-correction term of form (i) decreases over sigma = 1,2,3
  double prev = 1e9;
  for (double sg : {1.0, 2.0, 3.0}) {
    AiryContext ctx(sg);
    TacnodePoint p{0.2, 0.1, -0.1, 0.3, 0.5};
    double full = ctx.tacnode(TacForm::I, p);
    double base = 0.0;
    if (p.tau1 > p.tau2) base -= heat_p(p.tau1 - p.tau2, p.xi1, p.xi2);
    base += K_airy_ab(p.tau1, p.tau2, sg - p.xi1, sg - p.xi2);
    double corr = std::abs(full - base);
    CHECK(corr < prev);
    prev = corr;
  }
}
