#pragma once

// Complex contour quadrature: circles (trapezoid, spectrally accurate for
// periodic analytic integrands), truncated vertical lines, and Airy-type
// ray contours. Adaptive node doubling with a relative-change stopping rule.

#include <functional>

#include "aztac/common.hpp"

namespace aztac {

struct CircleContour {
  cplx center{0.0, 0.0};
  double radius = 1.0;  // orientation fixed counterclockwise
};

struct VerticalLineContour {
  double abscissa = 0.5;    // the delta of delta + iR
  double half_width = 8.0;  // truncation height H (auto-grown)
};

struct RayContour {
  cplx vertex{0.5, 0.0};
  double angle = 1.0471975511965976;  // opening angle in (pi/6, pi/2)
  double length = 12.0;
};

struct QuadratureConfig {
  int initial_nodes = 64;   // >= 32 per contract; power-of-two refinement
  double rel_tol = 1e-12;
  int max_doublings = 9;
  double tail_tol = 1e-15;  // endpoint magnitude bound for line/ray contours
};

struct IntegralValue {
  cplx value{0.0, 0.0};
  double err_est = 0.0;
};

using CFunc = std::function<cplx(cplx)>;
using CFunc2 = std::function<cplx(cplx, cplx)>;

// (1/2пi) oint f(z) dz over the circle.
IntegralValue integrate_circle(const CFunc& f, const CircleContour& c,
                               const QuadratureConfig& cfg);

// (1/2pi i)^2 oint oint f(z, w) dz dw, z on c1, w on c2, joint refinement.
IntegralValue integrate_double_circle(const CFunc2& f, const CircleContour& c1,
                                      const CircleContour& c2,
                                      const QuadratureConfig& cfg);

// (1/2pi i) int f over abscissa + i[-H, H]; H grown until the endpoint
// integrand magnitude is below tail_tol relative to the peak.
IntegralValue integrate_vertical(const CFunc& f, VerticalLineContour line,
                                 const QuadratureConfig& cfg);

// (1/2pi i) int f over the two rays vertex + t e^{±i angle}, t in [0, L],
// oriented upward through the vertex.
IntegralValue integrate_rays(const CFunc& f, RayContour ray,
                             const QuadratureConfig& cfg);

// Equispaced circle nodes for callers that manage their own sums.
std::vector<cplx> circle_nodes(const CircleContour& c, int n);

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace aztac
