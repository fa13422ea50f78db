#pragma once

// Finite-size kernel stack of the double Aztec diamond: psi/phi/g/h building
// blocks, the K^(i) window operators and their Fredholm determinants,
// biorthogonal polynomials on the circle, the R/S/T/Q resolvent functions,
// the extended kernel in its Eynard-Mehta, resolvent-perturbation (K1),
// double-integral (K2) and saddle representations, the C function, and gap
// probabilities.
//
// The l^2(2m+1,...) window algebra is carried in a balanced (diagonally
// conjugated) form with weights w_k = exp(-M_k), which keeps every matrix
// entry O(1) up to the n = 64 desk scale; kernel values are invariant under
// this conjugation.

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <optional>

#include "aztac/contour.hpp"
#include "aztac/geometry.hpp"

namespace aztac {

struct RadiiLadder {
  double r3, r2, s2, s1, r1, s3;  // a < r3 < r2 < s2 < s1 < r1 < s3 < 1/a
  double rho;                     // Fredholm circles at rho, 1/rho
  static RadiiLadder defaults(double a);
  void validate(double a) const;
};

enum class KernelRep { EM, K1, K2, Saddle };

class KernelContext {
 public:
  explicit KernelContext(ModelShape shape, QuadratureConfig quad = {},
                         std::optional<RadiiLadder> radii = std::nullopt,
                         double series_tol = 1e-14);

  const ModelShape& shape() const { return shape_; }
  const RadiiLadder& radii() const { return radii_; }
  const QuadratureConfig& quad() const { return quad_; }
  int M() const { return 2 * shape_.m + 1; }
  int k_max() const { return k_max_; }
  double series_tol() const { return series_tol_; }

  // ---- psi / phi building blocks (exact series) ----
  // psi_{2s}(x,y); for s < 0 the Gamma_0 realization (no pole at a).
  double psi(int s, int x, int y) const;
  // psi_{0,k}(u, x) and psi_{k,2n+1}(x, u), k even in [0, 2n].
  double psi_from_zero(int k, int u, int x) const;
  double psi_to_end(int k, int x, int u) const;
  cplx varphi(cplx z) const;       // phi_a(2n; z)
  cplx varphi_half(cplx z) const;  // phi_a(n; z)

  // ---- g functions ----
  double g1(int l) const;                  // g^(1)_l(n), exact; 0 for l > n
  double g2(int k) const;                  // g^(2)_k(n), cached quadrature
  double g1_ext(int l, int j) const;       // g^(1)_l(n/2; j), exact
  double g1_tilde(int l, int j) const;     // tilde g^(1)_l(n/2; j), exact
  double g2_ext(int l, int j) const;       // cached quadrature
  double g2_tilde(int l, int j) const;     // cached quadrature

  // ---- h functions (contour route) and series (bar) routes ----
  cplx h1(int k, cplx z) const;        // h^(1)_k(z^{-1})
  cplx h2(int l, cplx w) const;        // h^(2)_l(w)
  cplx h1_bar_series(int k, cplx z) const;
  cplx h2_bar_series(int l, cplx w) const;
  cplx h1_bar_contour(int k, cplx z) const;
  cplx h2_bar_contour(int l, cplx w) const;

  // ---- window operators ----
  // K^(1)_{k,l}(0) by the terminating g-series (exact given g arrays).
  double K1_entry(int k, int l) const;
  // Double-contour routes of K^(1)(z^{-1}), K^(2)(w), K^(3)(z^{-1},w).
  cplx K1_contour(int k, int l, cplx z) const;
  cplx K2_contour(int k, int l, cplx w) const;
  cplx K3_contour(int k, int l, cplx z, cplx w) const;

  // ---- Fredholm determinants on l^2(p, p+1, ...) ----
  double fredholm_H0(int p) const;          // H_p(0)
  cplx fredholm_H1(int p, cplx z) const;    // det(1 - K^(1)(z^{-1}))_p
  cplx fredholm_H2(int p, cplx w) const;
  cplx fredholm_H3(int p, cplx z, cplx w) const;
  double H_M0() const { return H_M0_; }     // H_{2m+1}(0)
  double H_M1() const { return H_M1_; }     // H_{2m+2}(0)

  // ---- Toeplitz / Borodin-Okounkov ----
  double moment(int d) const;               // symbol moments of rho_a
  double toeplitz_tau_direct(int p) const;
  double toeplitz_tau_fredholm(int p) const;
  double toeplitz_Z() const;                // (1+a^2)^{n(n+1)}

  // ---- R/S/T/Q ----
  double Q1(int k) const;  // support [2m+1, n]
  double Q2(int k) const;  // decaying tail beyond K_max treated as 0
  cplx S1(cplx z) const;
  cplx S2(cplx z) const;
  cplx T1(cplx z) const;
  cplx T2(cplx z) const;
  cplx R1(cplx z) const;   // R^(1)(z^{-1}) via (S,T) split
  cplx R2(cplx z) const;   // R^(2)(z)
  cplx R1_direct(cplx z) const;  // <Q^(1), h^(1)(z^{-1})> via contour h's
  cplx R2_direct(cplx z) const;
  // Norm identity residual: |Hr_inv * oint (1-R1)(1-R2) dz/(2 pi i z) - 1|.
  double norm_identity_residual() const;

  // ---- biorthogonal polynomials (both routes) ----
  enum class PolyRoute { Fredholm, Gram };
  cplx biorth_P(int k, cplx z, PolyRoute route) const;
  cplx biorth_Phat(int k, cplx w, PolyRoute route) const;  // evaluates at w^{-1}
  double biorth_inner(int k, int l) const;                 // <<P_k, Phat_l>>
  double christoffel_darboux_residual(cplx z, cplx w) const;

  // ---- kernels ----
  // S(2r,x;2s,y) of the one-Aztec split, by the terminating g-series.
  double S_func(int r, int x, int s, int y) const;
  // Extended kernel K~^ext_{n,m}(2r,x;2s,y); all representations share the
  // EM normalization.
  double ext_kernel(KernelRep rep, int r, int x, int s, int y) const;
  // Inlier (non-dual) kernel K^ext_{n,m}(2r,x;2s,y), EM route.
  double inlier_kernel(int r, int x, int s, int y) const;

  // C(u; x), integral route and the resolvent-sum route (u = 0).
  double C_function_integral(int u, int x) const;
  double C_function_sum(int x) const;

  // det(1 - blocked chi K chi) over the union of windows on lines Y_{2r_i}.
  double gap_probability(const std::vector<int>& rs,
                         const std::vector<std::pair<int, int>>& windows,
                         KernelRep rep = KernelRep::EM) const;

 private:
  ModelShape shape_;
  RadiiLadder radii_;
  QuadratureConfig quad_;
  double series_tol_;
  int k_max_ = 0;        // window cap for l^2 truncation
  int g2_cap_ = 0;       // g2 precomputed on [M, g2_cap]
  int a_cap_ = 0;        // alpha-series cap for S1/S2 coefficient arrays

  // balancing weights: logw(k) = -M_k = -(2 t F(v0) + (k-1-k0) log(-v0))
  double logw(int k) const;
  double wgt(int k) const { return std::exp(logw(k)); }

  std::vector<double> g1_;        // exact, size n+1
  std::vector<double> g2_win_;    // g2 on [M, g2_cap]
  mutable std::map<int, double> g2_small_;                 // k < M (lazy)
  mutable std::map<std::pair<int, int>, double> g2e_, g2t_;  // lazy caches

  Eigen::MatrixXd Khat_;          // balanced window operator, [M, k_max]
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;    // I - Khat
  Eigen::PartialPivLU<Eigen::MatrixXd> luT_;   // I - Khat^T
  Eigen::VectorXd Q1h_, Q2h_;     // balanced Q vectors
  double H_M0_ = 1.0, H_M1_ = 1.0;
  mutable std::vector<double> c_, d_;  // S1/S2 series coefficients (lazy)
  mutable bool have_cd_ = false;

  // EM internals
  mutable std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> em_lu_;
  mutable Eigen::MatrixXd em_A_;
  void ensure_em() const;
  void ensure_cd() const;

  double g2_quadrature(int k) const;
  double balanced_det(int p, int hi) const;  // det(I-K1)_{[p,hi]} balanced
  Eigen::VectorXd a_vec(int y, int s) const;   // balanced a_{-y,s} on window
  Eigen::VectorXd b_vec(int x, int r) const;   // balanced b_{-x,r} on window
  double ext_kernel_em(int r, int x, int s, int y) const;
  double ext_kernel_k1(int r, int x, int s, int y) const;
  double ext_kernel_k2(int r, int x, int s, int y) const;
  double ext_kernel_saddle(int r, int x, int s, int y) const;
};

// One-Aztec diamond extended kernel (standalone; order n1, weight a).
double one_aztec_kernel(double a, int n1, int r, int x, int s, int y,
                        const QuadratureConfig& quad = {});

// Lemma-A.1-type rank-one determinant identity residual on given matrices.
double rank_one_identity_residual(const Eigen::MatrixXd& A,
                                  const Eigen::VectorXd& a,
                                  const Eigen::VectorXd& b, double c);

}  // namespace aztac
