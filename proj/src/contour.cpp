#include "aztac/contour.hpp"

#include <algorithm>
#include <array>
#include <vector>

namespace aztac {

namespace {

constexpr double kPi = 3.14159265358979323846;

void guard(cplx v) {
  if (std::abs(v.real()) > kMagnitudeGuard || std::abs(v.imag()) > kMagnitudeGuard ||
      std::isnan(v.real()) || std::isnan(v.imag()))
    throw overflow_error_("integrand magnitude exceeded guard; rebalance contour radii");
}

}  // namespace

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  static std::vector<std::vector<double>> table;
  if (static_cast<int>(table.size()) <= n) {
    int old = static_cast<int>(table.size());
    table.resize(n + 1);
    for (int r = old; r <= n; ++r) {
      table[r].assign(r + 1, 1.0);
      for (int c = 1; c < r; ++c) table[r][c] = table[r - 1][c - 1] + table[r - 1][c];
    }
  }
  return table[n][k];
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p0 = 1.0, p1 = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1);
      }
      dp = n * (t * p0 - p1) / (t * t - 1.0);
      double dt = p0 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

std::vector<cplx> circle_nodes(const CircleContour& c, int n) {
  std::vector<cplx> z(n);
  for (int k = 0; k < n; ++k) {
    double th = 2.0 * kPi * k / n;
    z[k] = c.center + c.radius * cplx(std::cos(th), std::sin(th));
  }
  return z;
}

IntegralValue integrate_circle(const CFunc& f, const CircleContour& c,
                               const QuadratureConfig& cfg) {
  if (c.radius <= 0.0) throw std::invalid_argument("circle radius must be positive");
  int n = std::max(cfg.initial_nodes, 32);
  cplx prev = 0.0;
  bool have_prev = false;
  for (int d = 0; d <= cfg.max_doublings; ++d, n *= 2) {
    cplx sum = 0.0;
    double absint = 0.0;
    for (int k = 0; k < n; ++k) {
      double th = 2.0 * kPi * k / n;
      cplx e(std::cos(th), std::sin(th));
      cplx z = c.center + c.radius * e;
      cplx v = f(z);
      guard(v);
      sum += v * (c.radius * e);
      absint += std::abs(v) * c.radius;
    }
    cplx val = sum / static_cast<double>(n);
    absint /= n;
    if (have_prev) {
      double change = std::abs(val - prev);
      // stop at the relative-change target or the cancellation noise floor
      double floor_ = 4e-16 * absint * std::sqrt(static_cast<double>(n));
      if (change <= cfg.rel_tol * (1.0 + std::abs(val)) + floor_)
        return {val, change};
    }
    prev = val;
    have_prev = true;
  }
  throw non_convergence("circle quadrature did not converge within max doublings");
}

IntegralValue integrate_double_circle(const CFunc2& f, const CircleContour& c1,
                                      const CircleContour& c2,
                                      const QuadratureConfig& cfg) {
  if (c1.radius <= 0.0 || c2.radius <= 0.0)
    throw std::invalid_argument("circle radius must be positive");
  int n = std::max(cfg.initial_nodes, 32);
  cplx prev = 0.0;
  bool have_prev = false;
  for (int d = 0; d <= cfg.max_doublings; ++d, n *= 2) {
    std::vector<cplx> z1(n), z2(n);
    for (int k = 0; k < n; ++k) {
      double th = 2.0 * kPi * k / n;
      cplx e(std::cos(th), std::sin(th));
      z1[k] = c1.center + c1.radius * e;
      z2[k] = c2.center + c2.radius * e;
    }
    cplx sum = 0.0;
    double absint = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx row = 0.0;
      double absrow = 0.0;
      for (int j = 0; j < n; ++j) {
        cplx v = f(z1[i], z2[j]);
        guard(v);
        row += v * (z2[j] - c2.center);
        absrow += std::abs(v) * c2.radius;
      }
      sum += row * (z1[i] - c1.center);
      absint += absrow * c1.radius;
    }
    cplx val = sum / static_cast<double>(n) / static_cast<double>(n);
    absint /= static_cast<double>(n) * n;
    if (have_prev) {
      double change = std::abs(val - prev);
      double floor_ = 4e-16 * absint * std::sqrt(static_cast<double>(n));
      if (change <= cfg.rel_tol * (1.0 + std::abs(val)) + floor_)
        return {val, change};
    }
    prev = val;
    have_prev = true;
  }
  throw non_convergence("double circle quadrature did not converge");
}

IntegralValue integrate_vertical(const CFunc& f, VerticalLineContour line,
                                 const QuadratureConfig& cfg) {
  // Grow H until the endpoint magnitude drops below tail_tol relative to
  // the largest magnitude seen; the cubic exponentials give Gaussian-type
  // decay so a few doublings suffice.
  double H = line.half_width;
  double peak = 0.0;
  for (int grow = 0; grow < 8; ++grow) {
    cplx top = f(cplx(line.abscissa, H));
    cplx bot = f(cplx(line.abscissa, -H));
    double endmag = std::max(std::abs(top), std::abs(bot));
    peak = std::max({peak, endmag, std::abs(f(cplx(line.abscissa, 0.0)))});
    if (endmag <= cfg.tail_tol * (1.0 + peak)) break;
    double prev_end = endmag;
    H *= 1.5;
    cplx t2 = f(cplx(line.abscissa, H));
    cplx b2 = f(cplx(line.abscissa, -H));
    if (std::max(std::abs(t2), std::abs(b2)) > prev_end * 1.0001 && grow >= 3)
      throw no_decay("integrand grows along the vertical line");
    if (grow == 7)
      throw no_decay("vertical-line tail did not fall below tolerance");
  }
  int n = std::max(cfg.initial_nodes, 32);
  cplx prev = 0.0;
  bool have_prev = false;
  for (int d = 0; d <= cfg.max_doublings; ++d, n *= 2) {
    // trapezoid on [-H, H]; du = i dy
    double h = 2.0 * H / n;
    cplx sum = 0.5 * (f(cplx(line.abscissa, -H)) + f(cplx(line.abscissa, H)));
    double absint = std::abs(sum);
    for (int k = 1; k < n; ++k) {
      cplx v = f(cplx(line.abscissa, -H + k * h));
      guard(v);
      sum += v;
      absint += std::abs(v);
    }
    cplx val = sum * h * cplx(0.0, 1.0) / cplx(0.0, 2.0 * kPi);
    absint *= h / (2.0 * kPi);
    if (have_prev) {
      double change = std::abs(val - prev);
      double floor_ = 4e-16 * absint * std::sqrt(static_cast<double>(n));
      if (change <= cfg.rel_tol * (1.0 + std::abs(val)) + floor_)
        return {val, change};
    }
    prev = val;
    have_prev = true;
  }
  throw non_convergence("vertical-line quadrature did not converge");
}

IntegralValue integrate_rays(const CFunc& f, RayContour ray,
                             const QuadratureConfig& cfg) {
  // Upward orientation: from vertex + L e^{-i angle} up through the vertex
  // and out along vertex + L e^{+i angle}. Composite Gauss-Legendre panels
  // (the vertex is a corner, so the trapezoid rule would lose its accuracy).
  const cplx up(std::cos(ray.angle), std::sin(ray.angle));
  const cplx dn = std::conj(up);
  double L = ray.length;
  for (int grow = 0; grow < 8; ++grow) {
    double endmag =
        std::max(std::abs(f(ray.vertex + L * up)), std::abs(f(ray.vertex + L * dn)));
    double mid = std::abs(f(ray.vertex));
    if (endmag <= cfg.tail_tol * (1.0 + mid)) break;
    L *= 1.5;
    if (grow == 7) throw no_decay("ray-contour tail did not fall below tolerance");
  }
  std::vector<double> gx, gw;
  gauss_legendre(12, gx, gw);
  cplx prev = 0.0;
  bool have_prev = false;
  for (int d = 0, panels = std::max(cfg.initial_nodes / 12, 2);
       d <= cfg.max_doublings; ++d, panels *= 2) {
    cplx sum = 0.0;
    double absint = 0.0;
    for (int p = 0; p < panels; ++p) {
      double t0 = L * p / panels, t1 = L * (p + 1) / panels;
      for (int i = 0; i < 12; ++i) {
        double t = 0.5 * (t1 - t0) * gx[i] + 0.5 * (t1 + t0);
        double w = 0.5 * (t1 - t0) * gw[i];
        cplx vlo = f(ray.vertex + t * dn);
        cplx vhi = f(ray.vertex + t * up);
        guard(vlo);
        guard(vhi);
        sum += w * (vlo * (-dn) + vhi * up);
        absint += w * (std::abs(vlo) + std::abs(vhi));
      }
    }
    cplx val = sum / cplx(0.0, 2.0 * kPi);
    if (have_prev) {
      double change = std::abs(val - prev);
      double floor_ = 4e-16 * absint * std::sqrt(12.0 * panels);
      if (change <= cfg.rel_tol * (1.0 + std::abs(val)) + floor_)
        return {val, change};
    }
    prev = val;
    have_prev = true;
  }
  throw non_convergence("ray quadrature did not converge");
}

}  // namespace aztac
