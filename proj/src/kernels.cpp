#include "aztac/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace aztac {

namespace {

constexpr double kPi = 3.14159265358979323846;

// psi_{2s}(x,y) as an exact coefficient sum; for s < 0 this is the Gamma_0
// realization (the integrand has no pole at a then).
double psi_series(double a, int s, int x, int y) {
  const int d = y - x;
  if (s == 0) return d == 0 ? 1.0 : 0.0;
  double tot = 0.0;
  if (s > 0) {
    for (int i = 0; i <= s; ++i) {
      int j = i - d;
      if (j < 0) continue;
      tot += binom(s, i) * binom(s - 1 + j, j) * std::pow(a, i + j);
    }
  } else {
    int t = -s;
    for (int i = 0; i <= t; ++i) {
      int j = i + d;
      if (j < 0) continue;
      double term = binom(t, i) * binom(t - 1 + j, j) * std::pow(a, i + j);
      tot += parity_sign(i + j) * term;
    }
  }
  return tot;
}

// minimize over circle radii the worse of the integrand's log-magnitude at
// angles 0 and pi for |z^p (1+az)^q (z-a)^r|
double best_radius(double a, double p, double q, double r) {
  double lo = a * 1.12, hi = 0.92 / a, best = 1.0, best_obj = 1e308;
  for (int k = 0; k < 160; ++k) {
    double R = lo + (hi - lo) * k / 159.0;
    double m0 = p * std::log(R) + q * std::log(std::abs(1 + a * R)) +
                r * std::log(std::abs(R - a));
    double mpi = p * std::log(R) + q * std::log(std::abs(1 - a * R)) +
                 r * std::log(R + a);
    double obj = std::max(m0, mpi);
    if (obj < best_obj) {
      best_obj = obj;
      best = R;
    }
  }
  return best;
}

}  // namespace

RadiiLadder RadiiLadder::defaults(double a) {
  // geometric subdivision of (a, 1/a); rho = sqrt(a) for the Fredholm circles
  RadiiLadder l;
  l.r3 = std::pow(a, 5.0 / 7.0);
  l.r2 = std::pow(a, 3.0 / 7.0);
  l.s2 = std::pow(a, 1.0 / 7.0);
  l.s1 = std::pow(a, -1.0 / 7.0);
  l.r1 = std::pow(a, -3.0 / 7.0);
  l.s3 = std::pow(a, -5.0 / 7.0);
  l.rho = std::sqrt(a);
  return l;
}

void RadiiLadder::validate(double a) const {
  bool ok = a < r3 && r3 < r2 && r2 < s2 && s2 < s1 && s1 < r1 && r1 < s3 &&
            s3 < 1.0 / a && a < rho && rho < 1.0;
  if (!ok) throw invalid_shape("radii ladder violates a<r3<r2<s2<s1<r1<s3<1/a");
}

KernelContext::KernelContext(ModelShape shape, QuadratureConfig quad,
                             std::optional<RadiiLadder> radii,
                             double series_tol)
    : shape_(shape),
      radii_(radii.value_or(RadiiLadder::defaults(shape.a))),
      quad_(quad),
      series_tol_(series_tol) {
  shape_.validate();
  radii_.validate(shape_.a);
  if (shape_.n > 64)
    throw invalid_shape("n capped at 64 (double precision magnitude guard)");
  const int n = shape_.n;
  const double a = shape_.a;

  // g1 from the polynomial (1+au)^n (u-a)^{n+1}; g1_[t] = coeff of u^t
  {
    std::vector<double> p1(n + 1), p2(n + 2);
    for (int k = 0; k <= n; ++k) p1[k] = binom(n, k) * std::pow(a, k);
    for (int k = 0; k <= n + 1; ++k)
      p2[k] = binom(n + 1, k) * std::pow(-a, n + 1 - k);
    g1_.assign(2 * n + 2, 0.0);
    for (int i = 0; i <= n; ++i)
      for (int k = 0; k <= n + 1; ++k) g1_[i + k] += p1[i] * p2[k];
  }

  // adaptive window cap: extend while the balanced |g2(k)| e^{M_k} tail is
  // above series_tol relative to its peak
  const int Mw = M();
  {
    int k = Mw;
    int quiet = 0;
    double peak = 0.0;
    std::vector<double> vals;
    int k_floor = std::max(n, Mw) + 8;
    while (true) {
      double v = g2_quadrature(k);
      vals.push_back(v);
      double bal = std::abs(v) / wgt(k);
      peak = std::max(peak, bal);
      quiet = (bal <= series_tol_ * peak) ? quiet + 1 : 0;
      if ((quiet >= 8 && k >= k_floor) || k - Mw > 600) break;
      ++k;
    }
    k_max_ = k;
    a_cap_ = static_cast<int>(
                 std::ceil(std::log(series_tol_) / std::log(a * radii_.s3))) +
             8;
    g2_cap_ = k_max_ + std::max(3 * n + 4, a_cap_ + 4);
    g2_win_ = std::move(vals);
    g2_win_.resize(g2_cap_ - Mw + 1, 0.0);
    for (int kk = k_max_ + 1; kk <= g2_cap_; ++kk)
      g2_win_[kk - Mw] = g2_quadrature(kk);
  }

  // balanced window operator on [M, k_max]
  const int W = k_max_ - Mw + 1;
  Khat_.setZero(W, W);
  for (int ki = 0; ki < W; ++ki) {
    int k = Mw + ki;
    for (int li = 0; li < W; ++li) {
      int l = Mw + li;
      if (l > n) continue;
      double ratio = std::exp(logw(l) - logw(k));
      double tot = 0.0;
      for (int al = 0; al <= n - l; ++al)
        tot += g1(l + al) * (g2(k + al) * ratio);
      Khat_(ki, li) = tot;
    }
  }
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(W, W);
  lu_.compute(I - Khat_);
  luT_.compute((I - Khat_).transpose());
  if (lu_.rcond() < 1e-12)
    throw ill_conditioned("window resolvent ill-conditioned, rcond < 1e-12");

  Eigen::VectorXd g1h(W), g2h(W);
  for (int ki = 0; ki < W; ++ki) {
    int k = Mw + ki;
    g1h(ki) = g1(k) * wgt(k);
    g2h(ki) = g2(k) / wgt(k);
  }
  Q1h_ = luT_.solve(g1h);
  Q2h_ = lu_.solve(g2h);

  H_M0_ = balanced_det(Mw, n);
  H_M1_ = balanced_det(Mw + 1, n);
}

double KernelContext::logw(int k) const {
  const double a = shape_.a;
  const int n = shape_.n;
  const double v0 = -(1.0 - a) / (1.0 + a);
  const double Fv0 = std::log(1.0 + a * v0) + std::log(1.0 - a / v0) +
                     (2.0 / (a + 1.0 / a)) * std::log(-v0);
  const double k0 = 2.0 * n / (a + 1.0 / a);
  return -(n * Fv0 + (k - 1.0 - k0) * std::log(-v0));
}

// ---- psi / phi ----

double KernelContext::psi(int s, int x, int y) const {
  return psi_series(shape_.a, s, x, y);
}

double KernelContext::psi_from_zero(int k, int u, int x) const {
  if (k < 0 || k % 2 != 0 || k > 2 * shape_.n)
    throw std::invalid_argument("psi_from_zero expects even k in [0, 2n]");
  return psi_series(shape_.a, k / 2, u, x);
}

double KernelContext::psi_to_end(int k, int x, int u) const {
  if (k < 0 || k % 2 != 0 || k > 2 * shape_.n)
    throw std::invalid_argument("psi_to_end expects even k in [0, 2n]");
  const double a = shape_.a;
  const int p = shape_.n - k / 2;
  const int d = u - x;
  double tot = 0.0;
  for (int i = 0; i <= p; ++i) {
    int j = i - d;
    if (j < 0) continue;
    tot += binom(p, i) * binom(p + j, j) * std::pow(a, i + j);
  }
  return tot;
}

cplx KernelContext::varphi(cplx z) const {
  const double a = shape_.a;
  const int n = shape_.n;
  return cpow_int(1.0 + a * z, n) * cpow_int(1.0 - a / z, n + 1);
}

cplx KernelContext::varphi_half(cplx z) const {
  const double a = shape_.a;
  const int h = shape_.n / 2;
  return cpow_int(1.0 + a * z, h) * cpow_int(1.0 - a / z, h + 1);
}

// ---- g functions ----

double KernelContext::g1(int l) const {
  const int n = shape_.n;
  int t = n - l;  // coefficient index of u^{n-l}
  if (t < 0 || t > 2 * n + 1) return 0.0;
  return -parity_sign(l) * g1_[t];
}

double KernelContext::g2_quadrature(int k) const {
  const double a = shape_.a;
  const int n = shape_.n;
  double R = best_radius(a, n - k - 1.0, -n, -(n + 1.0));
  auto f = [&](cplx z) { return -neg_pow(z, -k - 2) / varphi(z); };
  QuadratureConfig cfg = quad_;
  cfg.initial_nodes = std::max(cfg.initial_nodes, 128);
  IntegralValue v = integrate_circle(f, {0.0, R}, cfg);
  return v.value.real();
}

double KernelContext::g2(int k) const {
  const int Mw = M();
  if (k >= Mw && k <= g2_cap_) return g2_win_[k - Mw];
  auto it = g2_small_.find(k);
  if (it != g2_small_.end()) return it->second;
  double v = g2_quadrature(k);
  g2_small_[k] = v;
  return v;
}

double KernelContext::g1_ext(int l, int j) const {
  const double a = shape_.a;
  const int h = shape_.n / 2;
  const int P = h + j, Q = h + 1 - j;
  if (P < 0 || Q < 0) throw std::invalid_argument("g1_ext exponent out of range");
  double tot = 0.0;
  for (int i = 0; i <= P; ++i) {
    int kk = i + l + 1;
    if (kk < 0 || kk > Q) continue;
    tot += binom(P, i) * std::pow(a, i) * binom(Q, kk) * std::pow(-a, kk);
  }
  return -parity_sign(l) * tot;
}

double KernelContext::g1_tilde(int l, int j) const {
  const double a = shape_.a;
  const int h = shape_.n / 2;
  const int P = h + j, Q = h - j;
  if (P < 0 || Q < 0) throw std::invalid_argument("g1_tilde exponent out of range");
  double tot = 0.0;
  for (int i = 0; i <= P; ++i) {
    int kk = i + l;
    if (kk < 0 || kk > Q) continue;
    tot += binom(P, i) * std::pow(a, i) * binom(Q, kk) * std::pow(-a, kk);
  }
  return -parity_sign(l) * tot;
}

double KernelContext::g2_ext(int l, int j) const {
  auto key = std::make_pair(l, j);
  auto it = g2e_.find(key);
  if (it != g2e_.end()) return it->second;
  const double a = shape_.a;
  const int h = shape_.n / 2;
  double R = best_radius(a, h - l - 1.0 + j, -(h + j), -(h + 1.0 + j));
  auto f = [&](cplx z) {
    return -neg_pow(z, -l - 2) * cpow_int((1.0 + a * z) / (1.0 - a / z), j) /
           varphi_half(z);
  };
  QuadratureConfig cfg = quad_;
  cfg.initial_nodes = std::max(cfg.initial_nodes, 128);
  double v = integrate_circle(f, {0.0, R}, cfg).value.real();
  g2e_[key] = v;
  return v;
}

double KernelContext::g2_tilde(int l, int j) const {
  auto key = std::make_pair(l, j);
  auto it = g2t_.find(key);
  if (it != g2t_.end()) return it->second;
  const double a = shape_.a;
  const int h = shape_.n / 2;
  double R = best_radius(a, h - l + j, -(h + j), -(h + j));
  auto f = [&](cplx z) {
    return -neg_pow(z, -l - 2) * (z - a) *
           cpow_int((1.0 + a * z) / (1.0 - a / z), j) / varphi_half(z);
  };
  QuadratureConfig cfg = quad_;
  cfg.initial_nodes = std::max(cfg.initial_nodes, 128);
  double v = integrate_circle(f, {0.0, R}, cfg).value.real();
  g2t_[key] = v;
  return v;
}

// ---- h functions ----

cplx KernelContext::h1(int k, cplx z) const {
  const double a = shape_.a;
  if (std::abs(z) <= a * 1.02)
    throw std::invalid_argument("h1 requires |z| > a");
  // the residue split h1 = h1_bar + 1/((-z)^{k+1} phi) keeps the contour far
  // from the order-(n+1) pole at a
  if (std::abs(z) < 0.9 / a)
    return h1_bar_contour(k, z) + 1.0 / (neg_pow(z, k + 1) * varphi(z));
  double R = std::min(radii_.s2, std::sqrt(a * std::abs(z)));
  R = std::max(R, a * 1.02);
  auto f = [&](cplx v) {
    return -1.0 / (v - z) * neg_pow(v, -k - 1) / varphi(v);
  };
  return integrate_circle(f, {0.0, R}, quad_).value;
}

cplx KernelContext::h2(int l, cplx w) const {
  const double a = shape_.a;
  if (std::abs(w) >= 0.98 / a)
    throw std::invalid_argument("h2 requires |w| < 1/a");
  double R = std::max(radii_.s1, 1.15 * std::abs(w));
  auto f = [&](cplx u) {
    return -w * neg_pow(u, l) * varphi(u) / (u - w);
  };
  return integrate_circle(f, {0.0, R}, quad_).value;
}

cplx KernelContext::h1_bar_contour(int k, cplx z) const {
  const double a = shape_.a;
  double R = std::max(radii_.s1, 1.15 * std::abs(z));
  if (R >= 0.95 / a) throw std::invalid_argument("h1_bar contour needs |z| < 1/a");
  auto f = [&](cplx v) {
    return -1.0 / (v - z) * neg_pow(v, -k - 1) / varphi(v);
  };
  return integrate_circle(f, {0.0, R}, quad_).value;
}

cplx KernelContext::h2_bar_contour(int l, cplx w) const {
  return h2(l, w) - neg_pow(w, l + 1) * varphi(w);
}

cplx KernelContext::h1_bar_series(int k, cplx z) const {
  const double a = shape_.a;
  double ratio = a * std::abs(z);
  if (ratio >= 0.999)
    throw series_divergence("h1_bar series requires a|z| < 1");
  cplx sum = 0.0, zp = 1.0;
  int quiet = 0;
  for (int al = 0; al <= g2_cap_ - k; ++al) {
    cplx term = zp * g2(k + al);
    sum += term;
    zp *= -z;
    quiet = (std::abs(term) <= series_tol_ * (1.0 + std::abs(sum))) ? quiet + 1 : 0;
    if (quiet >= 8) break;
  }
  return -sum;
}

cplx KernelContext::h2_bar_series(int l, cplx w) const {
  // terminates exactly at the g1 support
  cplx sum = 0.0, wp = 1.0;
  for (int al = 0; l + al <= shape_.n; ++al) {
    sum += wp * g1(l + al);
    wp *= -1.0 / w;
  }
  return -sum;
}

// ---- window operators ----

double KernelContext::K1_entry(int k, int l) const {
  const int n = shape_.n;
  if (l > n) return 0.0;
  double tot = 0.0;
  for (int al = 0; al <= n - l; ++al) tot += g1(l + al) * g2(k + al);
  return tot;
}

cplx KernelContext::K1_contour(int k, int l, cplx z) const {
  const double rho = radii_.rho;
  auto f = [&](cplx u, cplx v) {
    return parity_sign(k + l) * cpow_int(u, l) / cpow_int(v, k + 1) / (v - u) *
           ((z - u) / (z - v)) * varphi(u) / varphi(v);
  };
  return integrate_double_circle(f, {0.0, rho}, {0.0, 1.0 / rho}, quad_).value;
}

cplx KernelContext::K2_contour(int k, int l, cplx w) const {
  const double rho = radii_.rho;
  cplx winv = 1.0 / w;
  auto f = [&](cplx u, cplx v) {
    return parity_sign(k + l) * cpow_int(u, l) / cpow_int(v, k + 1) / (v - u) *
           ((winv - u) / (winv - v)) * varphi(1.0 / v) / varphi(1.0 / u);
  };
  return integrate_double_circle(f, {0.0, rho}, {0.0, 1.0 / rho}, quad_).value;
}

cplx KernelContext::K3_contour(int k, int l, cplx z, cplx w) const {
  auto f = [&](cplx u, cplx v) {
    return parity_sign(k + l) * cpow_int(u, l + 1) / cpow_int(v, k + 2) /
           (v - u) * ((u - z) * (v - w)) / ((v - z) * (u - w)) * varphi(u) /
           varphi(v);
  };
  return integrate_double_circle(f, {0.0, radii_.s2}, {0.0, radii_.s1}, quad_)
      .value;
}

// ---- Fredholm determinants ----

double KernelContext::balanced_det(int p, int hi) const {
  if (p > hi) return 1.0;
  const int W = hi - p + 1;
  Eigen::MatrixXd A(W, W);
  for (int ki = 0; ki < W; ++ki)
    for (int li = 0; li < W; ++li) {
      int k = p + ki, l = p + li;
      A(ki, li) = (ki == li ? 1.0 : 0.0) -
                  K1_entry(k, l) * std::exp(logw(l) - logw(k));
    }
  return A.partialPivLu().determinant();
}

double KernelContext::fredholm_H0(int p) const { return balanced_det(p, shape_.n); }

cplx KernelContext::fredholm_H1(int p, cplx z) const {
  const int n = shape_.n, hi = std::max(n, p);
  const int W = hi - p + 1;
  Eigen::MatrixXcd A(W, W);
  std::vector<cplx> h1v(W);
  for (int ki = 0; ki < W; ++ki) h1v[ki] = h1(p + ki, z);
  for (int ki = 0; ki < W; ++ki)
    for (int li = 0; li < W; ++li) {
      int k = p + ki, l = p + li;
      cplx entry = K1_entry(k, l) + h1v[ki] * g1(l);
      A(ki, li) = (ki == li ? 1.0 : 0.0) - entry * std::exp(logw(l) - logw(k));
    }
  return A.partialPivLu().determinant();
}

cplx KernelContext::fredholm_H2(int p, cplx w) const {
  // the rank-one column decays like a^l; carry the full tail
  const int hi = k_max_ + static_cast<int>(
      std::ceil(std::log(series_tol_) / std::log(shape_.a)));
  const int W = hi - p + 1;
  Eigen::MatrixXcd A(W, W);
  std::vector<cplx> h2v(W);
  for (int ki = 0; ki < W; ++ki) h2v[ki] = h2(p + ki, w);
  for (int ki = 0; ki < W; ++ki)
    for (int li = 0; li < W; ++li) {
      int k = p + ki, l = p + li;
      cplx entry = K1_entry(l, k) + h2v[ki] * g2(l);
      A(ki, li) = (ki == li ? 1.0 : 0.0) - entry * std::exp(logw(l) - logw(k));
    }
  return A.partialPivLu().determinant();
}

cplx KernelContext::fredholm_H3(int p, cplx z, cplx w) const {
  const int hi = k_max_ + static_cast<int>(
      std::ceil(std::log(series_tol_) / std::log(shape_.a)));
  const int W = hi - p + 1;
  Eigen::MatrixXcd A(W, W);
  std::vector<cplx> h1v(W), h2v(W);
  for (int ki = 0; ki < W; ++ki) {
    h1v[ki] = h1(p + ki + 1, z);
    h2v[ki] = h2(p + ki + 1, w);
  }
  cplx fac = z / w - 1.0;
  for (int ki = 0; ki < W; ++ki)
    for (int li = 0; li < W; ++li) {
      int k = p + ki, l = p + li;
      cplx entry = K1_entry(k + 1, l + 1) + fac * h1v[ki] * h2v[li];
      A(ki, li) = (ki == li ? 1.0 : 0.0) - entry * std::exp(logw(l) - logw(k));
    }
  return A.partialPivLu().determinant();
}

// ---- Toeplitz ----

double KernelContext::moment(int d) const {
  const double a = shape_.a;
  const int n = shape_.n;
  auto f = [&](cplx z) {
    return cpow_int(z, d - 1) * cpow_int(1.0 + a * z, n) /
           cpow_int(1.0 - a / z, n + 1);
  };
  return integrate_circle(f, {0.0, 1.0}, quad_).value.real();
}

double KernelContext::toeplitz_tau_direct(int p) const {
  if (p == 0) return 1.0;
  Eigen::MatrixXd T(p, p);
  for (int k = 0; k < p; ++k)
    for (int l = 0; l < p; ++l) T(k, l) = moment(k - l);
  return T.partialPivLu().determinant();
}

double KernelContext::toeplitz_Z() const {
  const double a = shape_.a;
  return std::pow(1.0 + a * a, shape_.n * (shape_.n + 1));
}

double KernelContext::toeplitz_tau_fredholm(int p) const {
  return toeplitz_Z() * fredholm_H0(p);
}

// ---- R/S/T/Q ----

double KernelContext::Q1(int k) const {
  const int Mw = M();
  if (k < Mw || k > shape_.n) return 0.0;
  return Q1h_(k - Mw) / wgt(k);
}

double KernelContext::Q2(int k) const {
  const int Mw = M();
  if (k < Mw || k > k_max_) return 0.0;
  return Q2h_(k - Mw) * wgt(k);
}

void KernelContext::ensure_cd() const {
  if (have_cd_) return;
  const int Mw = M(), n = shape_.n;
  c_.assign(a_cap_, 0.0);
  for (int al = 0; al < a_cap_; ++al) {
    double tot = 0.0;
    for (int k = Mw; k <= n; ++k) tot += Q1(k) * g2(k + al);
    c_[al] = tot;
  }
  d_.assign(std::max(1, n - Mw + 1), 0.0);
  for (int al = 0; al < static_cast<int>(d_.size()); ++al) {
    double tot = 0.0;
    for (int k = Mw; k + al <= n; ++k) tot += Q2(k) * g1(k + al);
    d_[al] = tot;
  }
  have_cd_ = true;
}

cplx KernelContext::S1(cplx z) const {
  ensure_cd();
  if (shape_.a * std::abs(z) >= 0.999)
    throw series_divergence("S1 series requires a|z| < 1");
  cplx sum = 0.0, zp = 1.0;
  for (double cv : c_) {
    sum += cv * zp;
    zp *= -z;
  }
  double tail = std::abs(zp) * std::abs(c_.empty() ? 0.0 : c_.back()) /
                (1.0 - shape_.a * std::abs(z));
  if (tail > 1e4 * series_tol_ * (1.0 + std::abs(sum)))
    throw truncation_unstable("S1 alpha-series tail above tolerance");
  return -sum;
}

cplx KernelContext::S2(cplx z) const {
  ensure_cd();
  cplx sum = 0.0, zp = 1.0;
  for (double dv : d_) {
    sum += dv * zp;
    zp *= -1.0 / z;
  }
  return -sum;
}

cplx KernelContext::T1(cplx z) const {
  const int Mw = M(), n = shape_.n;
  cplx sum = 0.0, zp = -1.0 / z;
  for (int l = 1; 2 * shape_.m + l <= n; ++l) {
    sum += Q1(2 * shape_.m + l) * zp;
    zp *= -1.0 / z;
  }
  (void)Mw;
  return sum;
}

cplx KernelContext::T2(cplx z) const {
  cplx sum = 0.0, zp = -z;
  for (int l = 1; 2 * shape_.m + l <= k_max_; ++l) {
    sum += Q2(2 * shape_.m + l) * zp;
    zp *= -z;
  }
  return sum;
}

cplx KernelContext::R1(cplx z) const {
  // R^(1)(1/z) = S^(1)(1/z) + T^(1)(1/z) / ((-z)^{2m+1} phi(2n; z))
  return S1(z) + T1(z) / (neg_pow(z, 2 * shape_.m + 1) * varphi(z));
}

cplx KernelContext::R2(cplx z) const {
  // R^(2)(z) = S^(2)(z) + T^(2)(z) (a - z) e^{n Phi(z)}
  const double a = shape_.a;
  cplx ePhi = neg_pow(z, 2 * shape_.m) *
              cpow_int((1.0 + a * z) * (1.0 - a / z), shape_.n);
  return S2(z) + T2(z) * (a - z) * ePhi;
}

cplx KernelContext::R1_direct(cplx z) const {
  cplx sum = 0.0;
  for (int k = M(); k <= shape_.n; ++k) sum += Q1(k) * h1(k, z);
  return sum;
}

cplx KernelContext::R2_direct(cplx z) const {
  cplx sum = 0.0;
  for (int k = M(); k <= k_max_; ++k) sum += Q2(k) * h2(k, z);
  return sum;
}

double KernelContext::norm_identity_residual() const {
  auto f = [&](cplx z) { return (1.0 - R1(z)) * (1.0 - R2(z)) / z; };
  cplx val = integrate_circle(f, {0.0, 1.0}, quad_).value;
  return std::abs(val * H_M0_ / H_M1_ - 1.0);
}

// ---- biorthogonal polynomials ----

cplx KernelContext::biorth_P(int k, cplx z, PolyRoute route) const {
  const double a = shape_.a;
  const int n = shape_.n;
  if (route == PolyRoute::Fredholm) {
    double h0 = fredholm_H0(k), h0p = fredholm_H0(k + 1);
    return cpow_int(z, k) * cpow_int(1.0 - a / z, n + 1) * fredholm_H1(k, z) /
           std::sqrt(h0 * h0p);
  }
  // Gram route: monic polynomial from the moment matrix, then normalized so
  // that <<P_k, Phat_k>> = 1 with symmetric sqrt normalization.
  Eigen::MatrixXd T(k, k);
  Eigen::VectorXd rhs(k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) T(j, i) = moment(i - j);
    rhs(j) = -moment(k - j);
  }
  Eigen::VectorXd p = k > 0 ? Eigen::VectorXd(T.partialPivLu().solve(rhs))
                            : Eigen::VectorXd(0);
  // dual monic coefficients q_j for Phat
  Eigen::MatrixXd T2m(k, k);
  Eigen::VectorXd rhs2(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) T2m(i, j) = moment(i - j);
    rhs2(i) = -moment(i - k);
  }
  Eigen::VectorXd q = k > 0 ? Eigen::VectorXd(T2m.partialPivLu().solve(rhs2))
                            : Eigen::VectorXd(0);
  double hnorm = 0.0;
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j) {
      double pi = (i == k) ? 1.0 : p(i);
      double qj = (j == k) ? 1.0 : q(j);
      hnorm += pi * qj * moment(i - j);
    }
  if (hnorm <= 0.0)
    throw ill_conditioned("gram route norm non-positive");
  cplx val = cpow_int(z, k);
  for (int i = 0; i < k; ++i) val += p(i) * cpow_int(z, i);
  return val / std::sqrt(hnorm);
}

cplx KernelContext::biorth_Phat(int k, cplx w, PolyRoute route) const {
  const double a = shape_.a;
  const int n = shape_.n;
  if (route == PolyRoute::Fredholm) {
    double h0 = fredholm_H0(k), h0p = fredholm_H0(k + 1);
    return cpow_int(w, -k) * cpow_int(1.0 + a * w, -n) * fredholm_H2(k, w) /
           std::sqrt(h0 * h0p);
  }
  Eigen::MatrixXd T2m(k, k);
  Eigen::VectorXd rhs2(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) T2m(i, j) = moment(i - j);
    rhs2(i) = -moment(i - k);
  }
  Eigen::VectorXd q = k > 0 ? Eigen::VectorXd(T2m.partialPivLu().solve(rhs2))
                            : Eigen::VectorXd(0);
  Eigen::MatrixXd T(k, k);
  Eigen::VectorXd rhs(k);
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < k; ++i) T(j, i) = moment(i - j);
    rhs(j) = -moment(k - j);
  }
  Eigen::VectorXd p = k > 0 ? Eigen::VectorXd(T.partialPivLu().solve(rhs))
                            : Eigen::VectorXd(0);
  double hnorm = 0.0;
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j) {
      double pi = (i == k) ? 1.0 : p(i);
      double qj = (j == k) ? 1.0 : q(j);
      hnorm += pi * qj * moment(i - j);
    }
  if (hnorm <= 0.0)
    throw ill_conditioned("gram route norm non-positive");
  cplx val = cpow_int(w, -k);
  for (int j = 0; j < k; ++j) val += q(j) * cpow_int(w, -j);
  return val / std::sqrt(hnorm);
}

double KernelContext::biorth_inner(int k, int l) const {
  const double a = shape_.a;
  const int n = shape_.n;
  auto f = [&](cplx z) {
    return biorth_P(k, z, PolyRoute::Fredholm) *
           biorth_Phat(l, z, PolyRoute::Fredholm) * cpow_int(1.0 + a * z, n) /
           cpow_int(1.0 - a / z, n + 1) / z;
  };
  QuadratureConfig cfg = quad_;
  cfg.rel_tol = 1e-10;
  return integrate_circle(f, {0.0, 1.0}, cfg).value.real();
}

double KernelContext::christoffel_darboux_residual(cplx z, cplx w) const {
  const int Mw = M();
  cplx lhs = 0.0;
  for (int k = 0; k < Mw; ++k)
    lhs += biorth_Phat(k, z, PolyRoute::Fredholm) *
           biorth_P(k, w, PolyRoute::Fredholm);
  cplx pM = biorth_P(Mw, z, PolyRoute::Fredholm);
  cplx pMw = biorth_P(Mw, w, PolyRoute::Fredholm);
  cplx phM_z = biorth_Phat(Mw, z, PolyRoute::Fredholm);
  cplx phM_w = biorth_Phat(Mw, w, PolyRoute::Fredholm);
  cplx rhs = (cpow_int(z, -Mw) * pM * cpow_int(w, Mw) * phM_w - phM_z * pMw) /
             (1.0 - w / z);
  return std::abs(lhs - rhs);
}

// ---- kernels ----

double KernelContext::S_func(int r, int x, int s, int y) const {
  const int n = shape_.n, m = shape_.m;
  const int j1 = s - n / 2, j2 = n / 2 - r;
  double tot = 0.0;
  for (int b = 0;; ++b) {
    int l1 = -y + m + b;
    if (l1 > n - s) break;
    if (l1 < -s - 1) continue;
    tot += g1_ext(l1, j1) * g2_ext(-x + m + b, j2);
  }
  return tot;
}

Eigen::VectorXd KernelContext::a_vec(int y, int s) const {
  const int n = shape_.n, m = shape_.m, Mw = M();
  const int j1 = s - n / 2;
  const int W = k_max_ - Mw + 1;
  const double sgn = parity_sign(m);
  // cache the half-size g1_ext factors of the convolution
  std::map<int, double> g1e;
  Eigen::VectorXd out(W);
  for (int ki = 0; ki < W; ++ki) {
    int k = Mw + ki;
    double invw = 1.0 / wgt(k);
    double tot = 0.0;
    for (int b = 0;; ++b) {
      int l1 = -y + m + b;
      if (l1 > n - s) break;
      if (l1 < -s - 1) continue;
      auto it = g1e.find(l1);
      if (it == g1e.end()) it = g1e.emplace(l1, g1_ext(l1, j1)).first;
      tot += it->second * (g2(k + b) * invw);
    }
    tot += g2_tilde(y - m + k, j1) * invw;
    out(ki) = sgn * tot;
  }
  return out;
}

Eigen::VectorXd KernelContext::b_vec(int x, int r) const {
  const int n = shape_.n, m = shape_.m, Mw = M();
  const int j2 = n / 2 - r;
  const int W = k_max_ - Mw + 1;
  const double sgn = parity_sign(m);
  Eigen::VectorXd out(W);
  for (int li = 0; li < W; ++li) {
    int l = Mw + li;
    double tot = 0.0;
    for (int b = 0; l + b <= n; ++b)
      tot += g1(l + b) * g2_ext(-x + m + b, j2);
    tot += g1_tilde(x - m + l, j2);
    out(li) = sgn * tot * wgt(l);
  }
  return out;
}

double KernelContext::ext_kernel_k1(int r, int x, int s, int y) const {
  const double a = shape_.a;
  double val = S_func(r, x, s, y);
  if (s < r) val += -parity_sign(x - y) * psi_series(a, s - r, x, y);
  Eigen::VectorXd av = a_vec(y, s);
  Eigen::VectorXd bv = b_vec(x, r);
  val += bv.dot(lu_.solve(av));
  return parity_sign(x - y) * val;
}

void KernelContext::ensure_em() const {
  if (em_lu_) return;
  const int Mw = M(), m = shape_.m;
  em_A_.resize(Mw, Mw);
  for (int i = 1; i <= Mw; ++i)
    for (int j = 1; j <= Mw; ++j)
      em_A_(i - 1, j - 1) = psi_to_end(0, -m + i - 1, -m + j - 1);
  em_lu_.emplace(em_A_);
  if (em_lu_->rcond() < 1e-14)
    throw ill_conditioned("Eynard-Mehta matrix ill-conditioned");
}

double KernelContext::inlier_kernel(int r, int x, int s, int y) const {
  ensure_em();
  const int Mw = M(), m = shape_.m;
  Eigen::VectorXd u(Mw), v(Mw);
  for (int j = 1; j <= Mw; ++j) u(j - 1) = psi_from_zero(2 * s, -m + j - 1, y);
  for (int i = 1; i <= Mw; ++i) v(i - 1) = psi_to_end(2 * r, x, -m + i - 1);
  Eigen::VectorXd sol = em_lu_->solve(u);
  sol += em_lu_->solve(u - em_A_ * sol);  // one refinement step
  double tot = v.dot(sol);
  if (r < s) tot -= psi(s - r, x, y);
  return tot;
}

double KernelContext::ext_kernel_em(int r, int x, int s, int y) const {
  double v = -inlier_kernel(r, x, s, y);
  if (r == s && x == y) v += 1.0;
  return v;
}

namespace {

// tensor-product trapezoid on two circles with joint node doubling
template <typename F>
cplx tensor_circle(const F& integrand, double R1, double R2, int n0,
                   double tol, int max_doublings) {
  cplx prev = 0.0;
  bool have = false;
  for (int d = 0, n = n0; d <= max_doublings; ++d, n *= 2) {
    std::vector<cplx> z(n), w(n);
    for (int k = 0; k < n; ++k) {
      double th = 2.0 * kPi * k / n;
      z[k] = R1 * cplx(std::cos(th), std::sin(th));
      w[k] = R2 * cplx(std::cos(th), std::sin(th));
    }
    cplx val = integrand(z, w);
    if (have && std::abs(val - prev) <= tol * (1.0 + std::abs(val)))
      return val;
    prev = val;
    have = true;
  }
  throw non_convergence("kernel double integral did not converge");
}

}  // namespace

double KernelContext::ext_kernel_k2(int r, int x, int s, int y) const {
  const double a = shape_.a;
  const int n = shape_.n, m = shape_.m;
  const double Hr = H_M1_ / H_M0_;
  cplx tot = 0.0;
  // corrected extension: the psi term enters for s >= r and the single
  // integral is not delta_{x != y}-gated (see the norm-identity diagonal
  // term of the C1 convolution)
  if (s >= r) tot += parity_sign(x - y) * psi_series(a, s - r, x, y) * Hr;
  auto fs = [&](cplx z) {
    return neg_pow(z, x - y - 1) * (1.0 - R1(z)) * (1.0 - R2(z)) *
           cpow_int((1.0 + a * z) / (1.0 - a / z), s - r);
  };
  tot += integrate_circle(fs, {0.0, 1.0}, quad_).value;

  auto dbl = [&](const std::vector<cplx>& zs, const std::vector<cplx>& ws) {
    const int N = static_cast<int>(zs.size());
    std::vector<cplx> FZ(N), GW(N), rz(N), rw(N);
    for (int i = 0; i < N; ++i) {
      cplx z = zs[i], w = ws[i];
      cplx ePz = neg_pow(z, m) * cpow_int((1.0 + a * z) * (1.0 - a / z), n / 2);
      cplx ePw = neg_pow(w, m) * cpow_int((1.0 + a * w) * (1.0 - a / w), n / 2);
      FZ[i] = (1.0 - R1(z)) * ePz;
      GW[i] = (1.0 - R2(w)) / ePw;
      rz[i] = (1.0 + a * z) / (1.0 - a / z);
      rw[i] = (1.0 + a * w) / (1.0 - a / w);
    }
    cplx sum = 0.0;
    for (int i = 0; i < N; ++i) {
      cplx z = zs[i];
      cplx rz1 = cpow_int(rz[i], n / 2 - r), rz2 = cpow_int(rz[i], -(n / 2 - s));
      for (int j = 0; j < N; ++j) {
        cplx w = ws[j];
        cplx br1 = neg_pow(w, -y - 1) / neg_pow(z, -x) * rz1 *
                   cpow_int(rw[j], -(n / 2 - s));
        cplx br2 = neg_pow(z, -y) / neg_pow(w, -x + 1) *
                   cpow_int(rw[j], n / 2 - r) * rz2 *
                   ((1.0 - a / z) / (1.0 - a / w));
        sum += FZ[i] * GW[j] / (z - w) * (br1 + br2) * z * w;
      }
    }
    return sum / static_cast<double>(N) / static_cast<double>(N);
  };
  tot += tensor_circle(dbl, radii_.s2, radii_.s1,
                       std::max(quad_.initial_nodes, 128), quad_.rel_tol,
                       quad_.max_doublings);
  return real_checked(parity_sign(x - y) * tot / Hr, 1e4 * quad_.rel_tol,
                      "ext_kernel_k2");
}

double KernelContext::ext_kernel_saddle(int rr, int X, int ss, int Y) const {
  const double a = shape_.a;
  const int n = shape_.n, m = shape_.m;
  const int r = rr, s = ss;
  const int x = -X, y = -Y;
  const double Hr = H_M1_ / H_M0_;
  cplx tot = 0.0;
  if (s >= r) tot += parity_sign(x - y) * psi_series(a, s - r, -x, -y) * Hr;
  const int u = s - r;
  auto f1 = [&](cplx z) {
    return neg_pow(z, -(x - y) - 1) * (1.0 - R1(z)) * (1.0 - R2(z)) *
           cpow_int((1.0 + a * z) / (1.0 - a / z), u);
  };
  tot += integrate_circle(f1, {0.0, 1.0}, quad_).value;
  auto f2 = [&](cplx z) {
    return neg_pow(z, -(x - y) - 1) * T1(z) * T2(z) *
           cpow_int((1.0 + a * z) / (1.0 - a / z), u);
  };
  tot += -2.0 * integrate_circle(f2, {0.0, 1.0}, quad_).value;

  auto dbl = [&](const std::vector<cplx>& zs, const std::vector<cplx>& ws) {
    const int N = static_cast<int>(zs.size());
    std::vector<cplx> S1z(N), T1z(N), T2z(N), S2w(N), T2w(N), T1w(N), ePz(N),
        ePw(N), rz(N), rw(N);
    for (int i = 0; i < N; ++i) {
      cplx z = zs[i], w = ws[i];
      S1z[i] = 1.0 - S1(z);
      T1z[i] = T1(z);
      T2z[i] = T2(z);
      S2w[i] = 1.0 - S2(w);
      T2w[i] = T2(w);
      T1w[i] = T1(w);
      ePz[i] = neg_pow(z, m) * cpow_int((1.0 + a * z) * (1.0 - a / z), n / 2);
      ePw[i] = neg_pow(w, m) * cpow_int((1.0 + a * w) * (1.0 - a / w), n / 2);
      rz[i] = (1.0 + a * z) / (1.0 - a / z);
      rw[i] = (1.0 + a * w) / (1.0 - a / w);
    }
    cplx sum = 0.0;
    for (int i = 0; i < N; ++i) {
      cplx z = zs[i];
      for (int j = 0; j < N; ++j) {
        cplx w = ws[j];
        cplx E1 = ePz[i] * S1z[i] * S2w[j] / ePw[j];
        cplx E2 = ePz[i] * S1z[i] * (w - a) * ePw[j] * T2w[j];
        cplx E3 = T1z[i] / ePz[i] / (z - a) * S2w[j] / ePw[j];
        cplx E4 = -ePz[i] * T2z[i] * T1w[j] / ePw[j];
        cplx br1 = neg_pow(w, y - 1) / neg_pow(z, x) *
                   cpow_int(rz[i], n / 2 - r) * cpow_int(rw[j], -(n / 2 - s));
        cplx br2 = neg_pow(z, y) / neg_pow(w, x + 1) *
                   cpow_int(rw[j], n / 2 - r) * cpow_int(rz[i], -(n / 2 - s)) *
                   ((1.0 - a / z) / (1.0 - a / w));
        sum += (E1 + E2 + E3 + E4) / (z - w) * (br1 + br2) * z * w;
      }
    }
    return sum / static_cast<double>(N) / static_cast<double>(N);
  };
  tot += tensor_circle(dbl, radii_.s2, radii_.s1,
                       std::max(quad_.initial_nodes, 128), quad_.rel_tol,
                       quad_.max_doublings);
  return real_checked(parity_sign(x - y) * tot / Hr, 1e4 * quad_.rel_tol,
                      "ext_kernel_saddle");
}

double KernelContext::ext_kernel(KernelRep rep, int r, int x, int s,
                                 int y) const {
  const int n = shape_.n, m = shape_.m;
  if (r < 1 || r > n || s < 1 || s > n)
    throw std::invalid_argument("line indices r, s must lie in [1, n]");
  if (std::abs(x) > n + m || std::abs(y) > n + m)
    throw std::invalid_argument("positions must lie in [-n-m, n+m]");
  switch (rep) {
    case KernelRep::EM: return ext_kernel_em(r, x, s, y);
    case KernelRep::K1: return ext_kernel_k1(r, x, s, y);
    case KernelRep::K2: return ext_kernel_k2(r, x, s, y);
    case KernelRep::Saddle: return ext_kernel_saddle(r, x, s, y);
  }
  throw std::invalid_argument("unknown kernel representation");
}

// ---- C function ----

double KernelContext::C_function_integral(int u, int x) const {
  const double a = shape_.a;
  cplx tot = 0.0;
  if (x != 0) {
    auto f1 = [&](cplx z) {
      return neg_pow(z, -x - 1) * (1.0 - R1(z)) * (1.0 - R2(z)) *
             cpow_int((1.0 + a * z) / (1.0 - a / z), u);
    };
    tot += integrate_circle(f1, {0.0, 1.0}, quad_).value;
  }
  auto f2 = [&](cplx z) {
    return neg_pow(z, -x - 1) * T1(z) * T2(z) *
           cpow_int((1.0 + a * z) / (1.0 - a / z), u);
  };
  tot += -2.0 * integrate_circle(f2, {0.0, 1.0}, quad_).value;
  return real_checked(tot, 1e4 * quad_.rel_tol, "C_function");
}

double KernelContext::C_function_sum(int x) const {
  const int Mw = M(), n = shape_.n;
  double tot = 0.0;
  for (int k = Mw; k <= k_max_; ++k) {
    tot += Q1(k) * g2(k + x);
    tot += Q2(k) * g1(k - x);
  }
  for (int k = Mw; k <= n; ++k)
    for (int l = Mw; l <= k_max_; ++l) {
      double q = Q1(k) * Q2(l);
      if (q == 0.0) continue;
      tot += q * (K1_entry(k, l - x) + K1_entry(k + x, l));
    }
  return tot;
}

// ---- gap probability ----

double KernelContext::gap_probability(
    const std::vector<int>& rs, const std::vector<std::pair<int, int>>& windows,
    KernelRep rep) const {
  if (rs.size() != windows.size())
    throw std::invalid_argument("lines/windows size mismatch");
  const int n = shape_.n, m = shape_.m;
  std::vector<std::pair<int, int>> sites;  // (line index q, position)
  for (size_t q = 0; q < rs.size(); ++q) {
    if (rs[q] < 1 || rs[q] > n) throw std::invalid_argument("line out of range");
    if (windows[q].first > windows[q].second) continue;
    if (windows[q].first < -n - m || windows[q].second > n + m)
      throw std::invalid_argument("window out of range");
    for (int p = windows[q].first; p <= windows[q].second; ++p)
      sites.emplace_back(static_cast<int>(q), p);
  }
  const int N = static_cast<int>(sites.size());
  if (N == 0) return 1.0;
  Eigen::MatrixXd B(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      B(i, j) = ext_kernel(rep, rs[sites[i].first], sites[i].second,
                           rs[sites[j].first], sites[j].second);
  double det = (Eigen::MatrixXd::Identity(N, N) - B).partialPivLu().determinant();
  if (det < -1e-8 || det > 1.0 + 1e-8)
    throw numerics_error("gap probability outside [0,1]");
  return std::clamp(det, 0.0, 1.0);
}

// ---- standalone pieces ----

double one_aztec_kernel(double a, int n1, int r, int x, int s, int y,
                        const QuadratureConfig& quad) {
  RadiiLadder rl = RadiiLadder::defaults(a);
  auto f = [&](cplx u, cplx v) {
    return parity_sign(x - y) / (v - u) * cpow_int(v, -x) * cpow_int(u, y - 1) *
           cpow_int(1.0 + a * u, n1 - s) * cpow_int(1.0 - a / u, s) /
           (cpow_int(1.0 + a * v, n1 - r) * cpow_int(1.0 - a / v, r));
  };
  cplx val = integrate_double_circle(f, {0.0, rl.r3}, {0.0, rl.r2}, quad).value;
  double out = real_checked(val, 1e4 * quad.rel_tol, "one_aztec_kernel");
  if (s > r) out -= psi_series(a, s - r, x, y);
  return out;
}

double rank_one_identity_residual(const Eigen::MatrixXd& A,
                                  const Eigen::VectorXd& a,
                                  const Eigen::VectorXd& b, double c) {
  const int N = static_cast<int>(A.rows());
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  double lhs = (I - A + c * a * b.transpose()).partialPivLu().determinant();
  double rhs = (1.0 - c) * (I - A).partialPivLu().determinant() +
               c * (I - A + a * b.transpose()).partialPivLu().determinant();
  return std::abs(lhs - rhs);
}

}  // namespace aztac
