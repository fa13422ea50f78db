#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aztac/kernels.hpp"

using namespace aztac;

TEST_CASE("biorthonormality under the rho_a inner product") {
  KernelContext ctx(ModelShape{0.5, 8, 2});
  const int M = ctx.M();
  for (int k = 0; k <= M; ++k)
    for (int l = 0; l <= M; ++l) {
      double v = ctx.biorth_inner(k, l);
      CHECK(std::abs(v - (k == l ? 1.0 : 0.0)) < 1e-9);
    }
}

TEST_CASE("Fredholm and Gram routes agree") {
  KernelContext ctx(ModelShape{0.5, 8, 2});
  const int M = ctx.M();
  for (cplx z : {cplx(0.8, 0.3), cplx(-0.5, 0.6), cplx(1.1, 0.0)}) {
    cplx pf = ctx.biorth_P(M, z, KernelContext::PolyRoute::Fredholm);
    cplx pg = ctx.biorth_P(M, z, KernelContext::PolyRoute::Gram);
    CHECK(std::abs(pf - pg) < 1e-8);
    cplx qf = ctx.biorth_Phat(M, z, KernelContext::PolyRoute::Fredholm);
    cplx qg = ctx.biorth_Phat(M, z, KernelContext::PolyRoute::Gram);
    CHECK(std::abs(qf - qg) < 1e-8);
  }
}

TEST_CASE("a -> 0 limit gives monomials") {
  KernelContext ctx(ModelShape{1e-5, 8, 2});
  for (int k : {1, 3}) {
    cplx z(0.7, 0.4);
    CHECK(std::abs(ctx.biorth_P(k, z, KernelContext::PolyRoute::Gram) -
                   cpow_int(z, k)) < 1e-2);
    CHECK(std::abs(ctx.biorth_Phat(k, z, KernelContext::PolyRoute::Gram) -
                   cpow_int(z, -k)) < 1e-2);
  }
}

TEST_CASE("Christoffel-Darboux") {
  KernelContext ctx(ModelShape{0.5, 8, 2});
  cplx z = 0.8 * std::exp(cplx(0.0, 1.0471975511965976));
  cplx w(0.6, 0.0);
  CHECK(ctx.christoffel_darboux_residual(z, w) < 1e-9);
  // removable singularity at w -> z stays finite
  CHECK(ctx.christoffel_darboux_residual(z, z * (1.0 - 1e-6)) < 1e-3);
  // M = 1 case reduces to a single product
  KernelContext c0(ModelShape{0.5, 4, 0});
  CHECK(c0.christoffel_darboux_residual(cplx(0.9, 0.2), cplx(0.62, -0.1)) < 1e-9);
}
