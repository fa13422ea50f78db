#include "aztac/airy.hpp"

#include <algorithm>
#include <cmath>

namespace aztac {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kCbrt2 = 1.2599210498948731648;  // 2^{1/3}
}  // namespace

namespace {

// Gauss-Legendre panels mapped through kappa = lo - ln(1 - xi (1 - e^{-L})),
// concentrating nodes near lo.
void exp_panels(double lo, double L, int panels, int degree,
                std::vector<double>& nodes, std::vector<double>& wts) {
  std::vector<double> gx, gw;
  gauss_legendre(degree, gx, gw);
  nodes.clear();
  wts.clear();
  const double c = 1.0 - std::exp(-L);
  for (int p = 0; p < panels; ++p) {
    double x0 = static_cast<double>(p) / panels;
    double x1 = static_cast<double>(p + 1) / panels;
    for (int i = 0; i < degree; ++i) {
      double xi = 0.5 * (x1 - x0) * gx[i] + 0.5 * (x1 + x0);
      double jac = c / (1.0 - xi * c);
      nodes.push_back(lo - std::log(1.0 - xi * c));
      wts.push_back(0.5 * (x1 - x0) * gw[i] * jac);
    }
  }
}

// Table-backed Ai for the grid-heavy inner loops; built once from the ray
// contour and interpolated with an 8-point stencil (~1e-13). Outside the
// table the direct quadrature is used.
class AiTable {
 public:
  AiTable() : lo_(-14.0), h_(1.0 / 32.0) {
    int count = static_cast<int>((66.0 - lo_) / h_) + 1;
    vals_.resize(count);
    QuadratureConfig cfg;
    for (int i = 0; i < count; ++i) vals_[i] = airy_ai(lo_ + i * h_, cfg);
  }
  double operator()(double x) const {
    if (x < lo_ + 4.0 * h_ || x > lo_ + (vals_.size() - 5) * h_)
      return x > 60.0 ? 0.0 : airy_ai(x, QuadratureConfig{});
    int c = static_cast<int>(std::floor((x - lo_) / h_));
    c = std::clamp(c, 3, static_cast<int>(vals_.size()) - 5);
    double t = (x - (lo_ + c * h_)) / h_;
    // 8-point Lagrange stencil centered between c and c+1
    double acc = 0.0;
    for (int j = -3; j <= 4; ++j) {
      double lj = 1.0;
      for (int k = -3; k <= 4; ++k)
        if (k != j) lj *= (t - k) / static_cast<double>(j - k);
      acc += lj * vals_[c + j];
    }
    return acc;
  }

 private:
  double lo_, h_;
  std::vector<double> vals_;
};

const AiTable& ai_table() {
  static AiTable t;
  return t;
}

double fast_ai(double x) { return ai_table()(x); }

double fast_ai_s(double s, double x) {
  return std::exp(s * x + 2.0 * s * s * s / 3.0) * fast_ai(x + s * s);
}

struct AuxGrid {
  std::vector<double> u, w;
  AuxGrid() { exp_panels(0.0, 40.0, 26, 10, u, w); }
};
const AuxGrid& aux_grid() {
  static AuxGrid g;
  return g;
}

}  // namespace

double airy_ai(double x, const QuadratureConfig& cfg) {
  RayContour ray;
  ray.vertex = std::max(0.4, std::sqrt(std::max(x, 0.0)));
  ray.angle = kPi / 3.0;
  ray.length = 8.0 + 2.0 * std::sqrt(std::abs(x));
  auto f = [&](cplx v) { return std::exp(v * v * v / 3.0 - x * v); };
  return integrate_rays(f, ray, cfg).value.real();
}

double airy_ai_series(double x) {
  const double c1 = std::pow(3.0, -2.0 / 3.0) / std::tgamma(2.0 / 3.0);
  const double c2 = std::pow(3.0, -1.0 / 3.0) / std::tgamma(1.0 / 3.0);
  double f = 1.0, g = x, tf = 1.0, tg = x;
  for (int k = 1; k < 60; ++k) {
    tf *= x * x * x / ((3.0 * k) * (3.0 * k - 1.0));
    tg *= x * x * x / ((3.0 * k) * (3.0 * k + 1.0));
    f += tf;
    g += tg;
  }
  return c1 * f - c2 * g;
}

double airy_s(double s, double x) {
  return std::exp(s * x + 2.0 * s * s * s / 3.0) * airy_ai(x + s * s);
}

double airy_s_contour(double s, double x, const QuadratureConfig& cfg) {
  RayContour ray;
  ray.vertex = std::max(0.4, std::sqrt(std::max(x + s * s, 0.0))) - s;
  ray.angle = kPi / 3.0;
  ray.length = 10.0 + 2.0 * std::sqrt(std::abs(x)) + 2.0 * std::abs(s);
  auto f = [&](cplx z) { return std::exp(z * z * z / 3.0 + z * z * s - x * z); };
  return integrate_rays(f, ray, cfg).value.real();
}

double heat_p(double tau, double xi1, double xi2) {
  return std::exp(-(xi1 - xi2) * (xi1 - xi2) / (4.0 * tau)) /
         std::sqrt(4.0 * kPi * tau);
}

double K_airy_ab(double alpha, double beta, double x, double y) {
  const AuxGrid& g = aux_grid();
  double tot = 0.0;
  for (size_t i = 0; i < g.u.size(); ++i)
    tot += g.w[i] * fast_ai_s(alpha, x + g.u[i]) * fast_ai_s(-beta, y + g.u[i]);
  return tot;
}

double K_airy_ab_closed(double alpha, double beta, double x, double y) {
  const AuxGrid& g = aux_grid();
  double pref = std::exp(alpha * x + 2.0 / 3.0 * alpha * alpha * alpha) /
                std::exp(beta * y + 2.0 / 3.0 * beta * beta * beta);
  double tot = 0.0;
  for (size_t i = 0; i < g.u.size(); ++i)
    tot += g.w[i] * std::exp(-(beta - alpha) * g.u[i]) *
           fast_ai(x + alpha * alpha + g.u[i]) *
           fast_ai(y + beta * beta + g.u[i]);
  return pref * tot;
}

double airy_process_kernel(double tau1, double xi1, double tau2, double xi2) {
  // Extended Airy process kernel. The heat factor is the full-line Gaussian
  // integral of Ai-products, exp(-(xi1-xi2)^2/(4 D) - D (xi1+xi2)/2 + D^3/12);
  // only with this factor does the conjugation identity relating it to the
  // deformed Airy kernel hold (checked to 30 digits in high precision).
  const AuxGrid& g = aux_grid();
  double tot = 0.0;
  for (size_t i = 0; i < g.u.size(); ++i)
    tot += g.w[i] * std::exp(g.u[i] * (tau2 - tau1)) * fast_ai(xi1 + g.u[i]) *
           fast_ai(xi2 + g.u[i]);
  if (tau2 > tau1) {
    double d = tau2 - tau1;
    tot -= std::exp(-(xi1 - xi2) * (xi1 - xi2) / (4.0 * d) -
                    d * (xi1 + xi2) / 2.0 + d * d * d / 12.0) /
           std::sqrt(4.0 * kPi * d);
  }
  return tot;
}

AiryContext::AiryContext(double sigma, double L, int panels, int degree,
                         QuadratureConfig quad)
    : sigma_(sigma), st_(std::pow(2.0, 2.0 / 3.0) * sigma), L_(L), quad_(quad) {
  exp_panels(st_, L_, panels, degree, k_, w_);
  aux_u_ = aux_grid().u;
  aux_w_ = aux_grid().w;
  const int N = grid_size();
  T_.resize(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      double v = fast_ai(k_[i] + k_[j] - st_);
      T_(i, j) = v;
      T_(j, i) = v;
    }
  Eigen::MatrixXd Tw = T_;
  for (int j = 0; j < N; ++j) Tw.col(j) *= w_[j];
  K_ = T_ * Tw.transpose();  // K_Ai(k,l) = int T(k,u) w(u) T(u,l) du
  Eigen::MatrixXd Kw = K_;
  for (int j = 0; j < N; ++j) Kw.col(j) *= w_[j];
  {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(N);
    double nrm = 0.0;
    for (int it = 0; it < 200; ++it) {
      v = Kw * v;
      nrm = v.norm();
      if (nrm == 0.0) break;
      v /= nrm;
    }
    op_norm_ = nrm;
  }
  if (op_norm_ >= 1.0)
    throw ill_conditioned("Airy-kernel window has operator norm >= 1");
  IK_ = Eigen::MatrixXd::Identity(N, N) - Kw;
  lu_.compute(IK_);
  std::vector<double> ai(N);
  for (int i = 0; i < N; ++i) ai[i] = fast_ai(k_[i]);
  Q_ = resolve(ai);
}

std::vector<double> AiryContext::resolve(const std::vector<double>& f) const {
  Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
  Eigen::VectorXd x = lu_.solve(b);
  std::vector<double> out(x.size());
  Eigen::Map<Eigen::VectorXd>(out.data(), out.size()) = x;
  return out;
}

double AiryContext::inner(const std::vector<double>& f,
                          const std::vector<double>& g) const {
  double tot = 0.0;
  for (size_t i = 0; i < w_.size(); ++i) tot += w_[i] * f[i] * g[i];
  return tot;
}

cplx AiryContext::Q_hat(cplx zeta) const {
  cplx tot = 0.0;
  for (size_t i = 0; i < k_.size(); ++i)
    tot += w_[i] * Q_[i] * std::exp(k_[i] * kCbrt2 * zeta);
  return tot;
}

cplx AiryContext::P_hat(cplx zeta) const {
  // -int_0^inf e^{-2^{1/3} zeta beta} [int Q(kappa) Ai(kappa+beta) dkappa] dbeta
  if (Sb_.empty()) {
    Sb_.resize(aux_u_.size());
    for (size_t b = 0; b < aux_u_.size(); ++b) {
      double acc = 0.0;
      for (size_t i = 0; i < k_.size(); ++i)
        acc += w_[i] * Q_[i] * fast_ai(k_[i] + aux_u_[b]);
      Sb_[b] = acc;
    }
  }
  cplx tot = 0.0;
  for (size_t b = 0; b < aux_u_.size(); ++b)
    tot += aux_w_[b] * std::exp(-kCbrt2 * zeta * aux_u_[b]) * Sb_[b];
  return -tot;
}

std::vector<double> AiryContext::S_vec(double tau, double xi) const {
  std::vector<double> out(k_.size());
  for (size_t i = 0; i < k_.size(); ++i)
    out[i] = fast_ai_s(tau, xi - sigma_ + kCbrt2 * k_[i]);
  return out;
}

std::vector<double> AiryContext::calA(double tau, double xi) const {
  // A^tau_{xi-sigma} = S^tau_xi - T S^tau_{-xi}
  std::vector<double> s1 = S_vec(tau, xi), s2 = S_vec(tau, -xi);
  std::vector<double> out(k_.size());
  for (size_t i = 0; i < k_.size(); ++i) {
    double acc = 0.0;
    for (size_t j = 0; j < k_.size(); ++j) acc += T_(i, j) * w_[j] * s2[j];
    out[i] = s1[i] - acc;
  }
  return out;
}

double AiryContext::calC(double s, double xi) const {
  const double sp = std::pow(2.0, -2.0 / 3.0) * s;
  const double cb = std::pow(2.0, -1.0 / 3.0);
  P_hat(0.0);  // ensure Sb_
  double tot = 0.0;
  const size_t N = k_.size();
  for (double x : {xi, -xi}) {
    double t1 = 0.0;
    for (size_t i = 0; i < N; ++i)
      t1 += w_[i] * Q_[i] * fast_ai_s(sp, k_[i] + cb * x);
    // int dk Q(k) int da [int dl Q(l) Ai(a+l)] Ai^{(sp)}(a + k + cb x)
    double t2 = 0.0;
    for (size_t i = 0; i < N; ++i) {
      double acc = 0.0;
      for (size_t b = 0; b < aux_u_.size(); ++b)
        acc += aux_w_[b] * Sb_[b] * fast_ai_s(sp, aux_u_[b] + k_[i] + cb * x);
      t2 += w_[i] * Q_[i] * acc;
    }
    tot += t1 + t2;
  }
  return std::pow(2.0, -1.0 / 3.0) * tot;
}

double AiryContext::form_i(const TacnodePoint& p) const {
  double v = 0.0;
  if (p.tau1 > p.tau2) v -= heat_p(p.tau1 - p.tau2, p.xi1, p.xi2);
  v += K_airy_ab(p.tau1, p.tau2, sigma_ - p.xi1, sigma_ - p.xi2);
  std::vector<double> A1 = calA(p.tau1, p.xi1);
  std::vector<double> A2 = calA(-p.tau2, p.xi2);
  v += kCbrt2 * inner(resolve(A1), A2);
  return v;
}

double AiryContext::form_ii(const TacnodePoint& p) const {
  double v = 0.0;
  if (p.tau1 > p.tau2) v -= heat_p(p.tau1 - p.tau2, p.xi1, p.xi2);
  std::vector<double> ra = resolve(calA(p.tau1, p.xi1));
  std::vector<double> rb = resolve(calA(p.tau1, -p.xi1));
  v += kCbrt2 * (inner(ra, S_vec(-p.tau2, p.xi2)) +
                 inner(rb, S_vec(-p.tau2, -p.xi2)));
  return v;
}

double AiryContext::form_brownian(const TacnodePoint& p) const {
  double v = 0.0;
  if (p.tau1 > p.tau2) v -= heat_p(p.tau1 - p.tau2, p.xi1, p.xi2);
  v += K_airy_ab(p.tau1, p.tau2, sigma_ - p.xi1, sigma_ - p.xi2);
  v += K_airy_ab(p.tau1, p.tau2, sigma_ + p.xi1, sigma_ + p.xi2);
  std::vector<double> rb = resolve(calA(-p.tau2, p.xi2));
  std::vector<double> rbm = resolve(calA(-p.tau2, -p.xi2));
  std::vector<double> d1 = calA(p.tau1, p.xi1), s1 = S_vec(p.tau1, p.xi1);
  std::vector<double> d2 = calA(p.tau1, -p.xi1), s2 = S_vec(p.tau1, -p.xi1);
  for (size_t i = 0; i < d1.size(); ++i) {
    d1[i] -= s1[i];
    d2[i] -= s2[i];
  }
  v += kCbrt2 * (inner(rb, d1) + inner(rbm, d2));
  return v;
}

double AiryContext::form_iii(const TacnodePoint& p) const {
  const double d = p.delta;
  if (d <= 0.0) throw std::invalid_argument("form (iii) requires delta > 0");
  double v = 0.0;
  if (p.tau2 < p.tau1) v -= heat_p(p.tau1 - p.tau2, p.xi1, p.xi2);
  v += calC(p.tau1 - p.tau2, p.xi1 - p.xi2);

  auto dbl = [&](double cu, double cv, int su, int sv, auto&& fu, auto&& fv) {
    double rate_u = std::abs(cu) + p.tau1;
    double rate_v = std::abs(cv) - p.tau2;
    if (rate_u <= 0.02 || rate_v <= 0.02)
      throw no_decay("form (iii) vertical contour does not decay; increase delta");
    double Hu = std::sqrt(42.0 / rate_u), Hv = std::sqrt(42.0 / rate_v);
    auto build = [](double H, int panels, std::vector<double>& y,
                    std::vector<double>& wy) {
      std::vector<double> gx, gw;
      gauss_legendre(10, gx, gw);
      y.clear();
      wy.clear();
      for (int q = 0; q < panels; ++q) {
        double a0 = -H + 2.0 * H * q / panels;
        double a1 = -H + 2.0 * H * (q + 1) / panels;
        for (int i = 0; i < 10; ++i) {
          y.push_back(0.5 * (a1 - a0) * gx[i] + 0.5 * (a1 + a0));
          wy.push_back(0.5 * (a1 - a0) * gw[i]);
        }
      }
    };
    cplx prev = 0.0;
    bool have = false;
    for (int panels = 24; panels <= 192; panels *= 2) {
      std::vector<double> yu, wu, yv, wv;
      build(Hu, panels, yu, wu);
      build(Hv, panels, yv, wv);
      const size_t Nu = yu.size(), Nv = yv.size();
      std::vector<cplx> EU(Nu), EV(Nv), U(Nu), V(Nv);
      for (size_t i = 0; i < Nu; ++i) {
        cplx uu(cu, yu[i]);
        U[i] = uu;
        EU[i] = std::exp(static_cast<double>(su) * uu * uu * uu / 3.0 -
                         sigma_ * uu + p.tau1 * uu * uu) *
                fu(uu);
      }
      for (size_t j = 0; j < Nv; ++j) {
        cplx vv(cv, yv[j]);
        V[j] = vv;
        EV[j] = std::exp(-(static_cast<double>(sv) * vv * vv * vv / 3.0 -
                           sigma_ * vv) -
                         p.tau2 * vv * vv) *
                fv(vv);
      }
      cplx sum = 0.0;
      for (size_t i = 0; i < Nu; ++i) {
        cplx rowi = 0.0;
        for (size_t j = 0; j < Nv; ++j) {
          cplx cross = std::exp(p.xi1 * U[i] - p.xi2 * V[j]) +
                       std::exp(-p.xi1 * U[i] + p.xi2 * V[j]);
          rowi += wv[j] * EV[j] * cross / (U[i] - V[j]);
        }
        sum += wu[i] * EU[i] * rowi;
      }
      sum /= 4.0 * kPi * kPi;  // (1/(2 pi i))^2 (i dy_u)(i dy_v)
      if (have && std::abs(sum - prev) <= 1e-9 * (1.0 + std::abs(sum))) {
        prev = sum;
        break;
      }
      prev = sum;
      have = true;
    }
    return prev;
  };

  auto P1 = [&](cplx z) { return 1.0 - P_hat(z); };
  auto P1m = [&](cplx z) { return 1.0 - P_hat(-z); };
  auto Qp = [&](cplx z) { return Q_hat(z); };
  auto Qm = [&](cplx z) { return Q_hat(-z); };

  cplx tot = 0.0;
  tot += dbl(+d, -d, +1, +1, P1, P1m);
  tot -= dbl(+2.0 * d, +d, +1, -1, P1, Qm);
  tot -= dbl(-d, -2.0 * d, -1, +1, Qp, P1m);
  tot += dbl(-d, +d, -1, -1, Qp, Qm);
  v += real_checked(tot, 1e-7, "tacnode form (iii)");
  return v;
}

double AiryContext::tacnode(TacForm form, const TacnodePoint& p) const {
  switch (form) {
    case TacForm::I: return form_i(p);
    case TacForm::II: return form_ii(p);
    case TacForm::III: return form_iii(p);
    case TacForm::Brownian: return form_brownian(p);
  }
  throw std::invalid_argument("unknown tacnode form");
}

}  // namespace aztac
