#pragma once

// Bridge between finite size and the tacnode limit: scaling constants,
// the scaling map with rounding/clamping, the conjugated rescaled kernel,
// and convergence/limit diagnostics.

#include "aztac/airy.hpp"
#include "aztac/kernels.hpp"

namespace aztac {

struct ScalingConstants {
  double a = 0.5;
  double v0 = 0.0;     // -(1-a)/(1+a)
  double A = 0.0;      // A^3 = a(1+a)^5 / ((1-a)(1+a^2))
  double rho = 0.0;    // -A v0
  double theta = 0.0;  // sqrt(rho (a + 1/a))
  double F_v0 = 0.0;   // F at the saddle
  double G_v0 = 0.0;   // G at the saddle

  // worst residual of the four cross-identities
  double cross_identity_residual() const;
};

ScalingConstants scaling_constants(double a);

// M^tau_lambda(t) of the exponent ladder.
double m_exponent(const ScalingConstants& c, double tau, double lambda,
                  double t);
// residual of M^tau_{s-x+c b}(t/2) + M^{-tau}_{-s+x+c k}(t/2) = M_{k+b}(t)
double m_exponent_identity_residual(const ScalingConstants& c, double tau,
                                    double sigma, double xi, double beta,
                                    double kappa, double t);

struct ScalingPoint {
  int t = 8;
  double sigma = 1.0;
  double tau1 = 0.0, xi1 = 0.0, tau2 = 0.0, xi2 = 0.0;
  // rounded integers
  int n = 0, m = 0, r = 0, s = 0, x = 0, y = 0;
  // effective parameters recovered from the rounded integers
  double sigma_eff = 0.0, tau1_eff = 0.0, xi1_eff = 0.0, tau2_eff = 0.0,
         xi2_eff = 0.0;
  // rounding residuals (rounded minus exact, in integer units)
  double res_m = 0.0, res_r = 0.0, res_s = 0.0, res_x = 0.0, res_y = 0.0;
  bool m_clamped = false;
};

// Nearest-integer rounding of the scaling map; m is clamped into the valid
// shape range when the nearest integer falls outside it (the residual is
// recorded, and sigma_eff reflects the clamp). Throws invalid_shape when no
// valid m exists.
ScalingPoint scale_map(double a, int t, double sigma, double tau1, double xi1,
                       double tau2, double xi2);

// (-v0)^{y-x+r-s} (-1)^{y-x} Ktilde^ext(2r,x;2s,y) rho t^{1/3} by the
// balanced resolvent-perturbation representation.
double rescaled_kernel(const ScalingPoint& pt, const KernelContext& ctx);

struct ConvergenceRow {
  ScalingPoint pt;
  double finite_value = 0.0;   // rescaled finite-size kernel
  double tacnode_value = 0.0;  // form (i) at the effective parameters
  double abs_error = 0.0;
};

// One row per (point, t); kernel contexts are cached per (n, m) by the
// caller being sequential over t.
std::vector<ConvergenceRow> convergence_table(
    double a, double sigma, const std::vector<TacnodePoint>& points,
    const std::vector<int>& t_list);

struct GLimitRow {
  int t = 0;
  double lambda = 0.0;      // requested
  double lambda_eff = 0.0;  // from the rounded index
  int ell = 0;
  double lhs1 = 0.0, lhs2 = 0.0;  // scaled g^(1), g^(2)
  double target = 0.0;            // -Ai(lambda_eff)
  double err1 = 0.0, err2 = 0.0;
};

std::vector<GLimitRow> g_limit_diagnostic(double a, double sigma,
                                          const std::vector<double>& lambdas,
                                          const std::vector<int>& t_list);

}  // namespace aztac
