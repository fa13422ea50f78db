#include "aztac/scaling.hpp"

#include <cmath>
#include <map>

namespace aztac {

ScalingConstants scaling_constants(double a) {
  if (!(a > 0.0 && a < 1.0))
    throw invalid_shape("scaling constants need a in (0,1)");
  ScalingConstants c;
  c.a = a;
  c.v0 = -(1.0 - a) / (1.0 + a);
  c.A = std::cbrt(a * std::pow(1.0 + a, 5) / ((1.0 - a) * (1.0 + a * a)));
  c.rho = -c.A * c.v0;
  c.theta = std::sqrt(c.rho * (a + 1.0 / a));
  c.F_v0 = std::log(1.0 + a * c.v0) + std::log(1.0 - a / c.v0) +
           2.0 / (a + 1.0 / a) * std::log(-c.v0);
  c.G_v0 = (1.0 - a * a) * c.theta * std::log(-c.v0);
  return c;
}

double ScalingConstants::cross_identity_residual() const {
  double r1 = std::abs(v0 + (1.0 - a) / (1.0 + a));
  double r2 = std::abs(rho - std::pow(1.0 - a * a, 2.0 / 3.0) /
                                 std::cbrt(a + 1.0 / a));
  double r3 = std::abs(std::pow(theta, 3) - (1.0 - std::pow(a, 4)) / a);
  double r4 = std::abs(A * A - theta * a * std::pow(1.0 + a, 3) /
                                   ((1.0 - a) * (1.0 + a * a)));
  return std::max({r1, r2, r3, r4});
}

double m_exponent(const ScalingConstants& c, double tau, double lambda,
                  double t) {
  return 2.0 * t * c.F_v0 + tau * c.G_v0 * std::pow(2.0 * t, 2.0 / 3.0) +
         lambda * c.rho * std::log(-c.v0) * std::cbrt(2.0 * t);
}

double m_exponent_identity_residual(const ScalingConstants& c, double tau,
                                    double sigma, double xi, double beta,
                                    double kappa, double t) {
  const double cb = std::cbrt(2.0);
  double lhs = m_exponent(c, tau, sigma - xi + cb * beta, t / 2.0) +
               m_exponent(c, -tau, -sigma + xi + cb * kappa, t / 2.0);
  double rhs = m_exponent(c, 0.0, kappa + beta, t);
  return std::abs(lhs - rhs);
}

ScalingPoint scale_map(double a, int t, double sigma, double tau1, double xi1,
                       double tau2, double xi2) {
  ScalingConstants c = scaling_constants(a);
  ScalingPoint pt;
  pt.t = t;
  pt.sigma = sigma;
  pt.tau1 = tau1;
  pt.xi1 = xi1;
  pt.tau2 = tau2;
  pt.xi2 = xi2;
  pt.n = 2 * t;
  const double t13 = std::cbrt(static_cast<double>(t));
  const double t23 = t13 * t13;
  const double m_star = 2.0 * t / (a + 1.0 / a) + sigma * c.rho * t13;
  int m = static_cast<int>(std::lround(m_star));
  int m_hi = (pt.n - 2) / 2;
  if (m < 0 || m > m_hi) {
    pt.m_clamped = true;
    m = std::clamp(m, 0, m_hi);
  }
  if (m_hi < 0) throw invalid_shape("no valid m for this t");
  pt.m = m;
  pt.res_m = m - m_star;

  const double r_star = t + (1.0 + a * a) * c.theta * tau1 * t23;
  const double s_star = t + (1.0 + a * a) * c.theta * tau2 * t23;
  const double x_star = 2.0 * a * a * c.theta * tau1 * t23 + xi1 * c.rho * t13;
  const double y_star = 2.0 * a * a * c.theta * tau2 * t23 + xi2 * c.rho * t13;
  pt.r = static_cast<int>(std::lround(r_star));
  pt.s = static_cast<int>(std::lround(s_star));
  pt.x = static_cast<int>(std::lround(x_star));
  pt.y = static_cast<int>(std::lround(y_star));
  pt.res_r = pt.r - r_star;
  pt.res_s = pt.s - s_star;
  pt.res_x = pt.x - x_star;
  pt.res_y = pt.y - y_star;
  if (pt.r < 1 || pt.r > pt.n || pt.s < 1 || pt.s > pt.n)
    throw invalid_shape("scaled line index outside [1, n]");

  pt.sigma_eff = (pt.m - 2.0 * t / (a + 1.0 / a)) / (c.rho * t13);
  pt.tau1_eff = (pt.r - t) / ((1.0 + a * a) * c.theta * t23);
  pt.tau2_eff = (pt.s - t) / ((1.0 + a * a) * c.theta * t23);
  pt.xi1_eff = (pt.x - 2.0 * a * a * c.theta * pt.tau1_eff * t23) / (c.rho * t13);
  pt.xi2_eff = (pt.y - 2.0 * a * a * c.theta * pt.tau2_eff * t23) / (c.rho * t13);
  return pt;
}

double rescaled_kernel(const ScalingPoint& pt, const KernelContext& ctx) {
  ScalingConstants c = scaling_constants(ctx.shape().a);
  double val = ctx.ext_kernel(KernelRep::K1, pt.r, pt.x, pt.s, pt.y);
  double conj = std::pow(-c.v0, pt.y - pt.x + pt.r - pt.s) *
                parity_sign(pt.y - pt.x);
  return conj * val * c.rho * std::cbrt(static_cast<double>(pt.t));
}

std::vector<ConvergenceRow> convergence_table(
    double a, double sigma, const std::vector<TacnodePoint>& points,
    const std::vector<int>& t_list) {
  std::vector<ConvergenceRow> rows;
  std::map<std::pair<int, int>, std::shared_ptr<KernelContext>> kctx;
  std::map<long, std::shared_ptr<AiryContext>> actx;  // keyed by rounded sigma
  for (int t : t_list) {
    for (const TacnodePoint& p : points) {
      ConvergenceRow row;
      row.pt = scale_map(a, t, sigma, p.tau1, p.xi1, p.tau2, p.xi2);
      auto key = std::make_pair(row.pt.n, row.pt.m);
      auto it = kctx.find(key);
      if (it == kctx.end())
        it = kctx
                 .emplace(key, std::make_shared<KernelContext>(
                                   ModelShape{a, row.pt.n, row.pt.m}))
                 .first;
      row.finite_value = rescaled_kernel(row.pt, *it->second);
      long skey = std::lround(row.pt.sigma_eff * 1e9);
      auto at = actx.find(skey);
      if (at == actx.end())
        at = actx.emplace(skey, std::make_shared<AiryContext>(row.pt.sigma_eff))
                 .first;
      TacnodePoint pe{row.pt.tau1_eff, row.pt.xi1_eff, row.pt.tau2_eff,
                      row.pt.xi2_eff, p.delta};
      row.tacnode_value = at->second->tacnode(TacForm::I, pe);
      row.abs_error = std::abs(row.finite_value - row.tacnode_value);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<GLimitRow> g_limit_diagnostic(double a, double sigma,
                                          const std::vector<double>& lambdas,
                                          const std::vector<int>& t_list) {
  ScalingConstants c = scaling_constants(a);
  std::vector<GLimitRow> rows;
  for (int t : t_list) {
    const int n = 2 * t;
    const double m_star = 2.0 * t / (a + 1.0 / a) + sigma * c.rho * std::cbrt(t);
    int m = std::clamp(static_cast<int>(std::lround(m_star)), 0, (n - 2) / 2);
    KernelContext ctx(ModelShape{a, n, m});
    const double k0 = 4.0 * t / (a + 1.0 / a);
    const double c13 = std::cbrt(2.0 * t);
    for (double lam : lambdas) {
      GLimitRow row;
      row.t = t;
      row.lambda = lam;
      row.ell = static_cast<int>(std::lround(k0 + lam * c.rho * c13 + 1.0));
      row.lambda_eff = (row.ell - 1.0 - k0) / (c.rho * c13);
      double M = m_exponent(c, 0.0, row.lambda_eff, t);
      row.lhs1 = c13 * (c.A / (c.v0 - a)) * std::exp(-M) * ctx.g1(row.ell);
      row.lhs2 = c13 * c.A * (c.v0 - a) * c.v0 * c.v0 * std::exp(M) *
                 ctx.g2(row.ell);
      row.target = -airy_ai(row.lambda_eff);
      row.err1 = std::abs(row.lhs1 - row.target);
      row.err2 = std::abs(row.lhs2 - row.target);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace aztac
