#pragma once

// Limiting-kernel stack: the Airy function (self-contained, via the ray
// contour), its s-deformation, deformed Airy kernels, the Airy-resolvent
// quantities Q, Q^, P^, C, and the tacnode kernel in all four published
// forms.

#include <Eigen/Dense>

#include "aztac/contour.hpp"

namespace aztac {

// Ai via the ray-contour representation (vertex adapted to the saddle).
double airy_ai(double x, const QuadratureConfig& cfg = {});
// Maclaurin-series oracle, adequate for |x| <= 6.
double airy_ai_series(double x);

// Ai^{(s)}(x) = e^{s x + 2 s^3/3} Ai(x + s^2); contour route for testing.
double airy_s(double s, double x);
double airy_s_contour(double s, double x, const QuadratureConfig& cfg = {});

// heat kernel p(tau; xi1, xi2)
double heat_p(double tau, double xi1, double xi2);

// K_Ai^{(alpha,-beta)}(x,y), u-integral route and the closed-form route.
double K_airy_ab(double alpha, double beta, double x, double y);
double K_airy_ab_closed(double alpha, double beta, double x, double y);

// Extended Airy process kernel (lambda-integral plus heat term).
double airy_process_kernel(double tau1, double xi1, double tau2, double xi2);

struct TacnodePoint {
  double tau1 = 0.0, xi1 = 0.0, tau2 = 0.0, xi2 = 0.0;
  double delta = 0.5;  // form-(iii) contour offset, > 0 arbitrary
};

enum class TacForm { I, II, III, Brownian };

// Nystrom discretization of [sigma~, sigma~+L] (Gauss-Legendre panels after
// an exponential substitution) with the Airy-kernel resolvent cached.
class AiryContext {
 public:
  explicit AiryContext(double sigma, double L = 14.0, int panels = 32,
                       int degree = 12, QuadratureConfig quad = {});

  double sigma() const { return sigma_; }
  double sigma_tilde() const { return st_; }
  double domain_length() const { return L_; }
  int grid_size() const { return static_cast<int>(k_.size()); }
  const std::vector<double>& nodes() const { return k_; }
  const std::vector<double>& weights() const { return w_; }
  const Eigen::MatrixXd& T_op() const { return T_; }    // T(k,l) = Ai(k+l-st)
  const Eigen::MatrixXd& K_airy() const { return K_; }  // K_Ai = T w T
  double operator_norm() const { return op_norm_; }

  std::vector<double> resolve(const std::vector<double>& f) const;
  double inner(const std::vector<double>& f, const std::vector<double>& g) const;

  const std::vector<double>& Q_grid() const { return Q_; }  // calQ on nodes
  cplx Q_hat(cplx zeta) const;
  cplx P_hat(cplx zeta) const;

  // A^tau_{xi - sigma}(kappa) on the grid.
  std::vector<double> calA(double tau, double xi) const;
  // S^tau_xi(kappa) = Ai^{(tau)}(xi - sigma + 2^{1/3} kappa) on the grid.
  std::vector<double> S_vec(double tau, double xi) const;
  double calC(double s, double xi) const;

  double tacnode(TacForm form, const TacnodePoint& p) const;

 private:
  double sigma_, st_, L_;
  QuadratureConfig quad_;
  std::vector<double> k_, w_;
  std::vector<double> aux_u_, aux_w_;  // [0, inf) auxiliary grid
  Eigen::MatrixXd T_, K_, IK_;         // IK_ = I - K diag(w)
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::vector<double> Q_;
  mutable std::vector<double> Sb_;  // int Q(k) Ai(k + beta_b) dk, lazy
  double op_norm_ = 0.0;

  double form_i(const TacnodePoint& p) const;
  double form_ii(const TacnodePoint& p) const;
  double form_iii(const TacnodePoint& p) const;
  double form_brownian(const TacnodePoint& p) const;
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace aztac
