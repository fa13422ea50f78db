#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace aztac {

using cplx = std::complex<double>;

// Error hierarchy. Numerical failures (exit code 1 territory) all derive
// from numerics_error so the CLI can map them uniformly.
struct numerics_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct non_convergence : numerics_error { using numerics_error::numerics_error; };
struct overflow_error_ : numerics_error { using numerics_error::numerics_error; };
struct no_decay : numerics_error { using numerics_error::numerics_error; };
struct ill_conditioned : numerics_error { using numerics_error::numerics_error; };
struct truncation_unstable : numerics_error { using numerics_error::numerics_error; };
struct series_divergence : numerics_error { using numerics_error::numerics_error; };
struct imaginary_residue : numerics_error { using numerics_error::numerics_error; };
struct invalid_shape : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct budget_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kMagnitudeGuard = 1e300;

// (-1)^k for possibly negative k.
inline double parity_sign(long k) { return (k % 2 == 0) ? 1.0 : -1.0; }

// z^k by binary exponentiation, integer k of either sign.
inline cplx cpow_int(cplx z, long k) {
  if (k == 0) return 1.0;
  bool inv = k < 0;
  unsigned long e = inv ? static_cast<unsigned long>(-(k + 1)) + 1ul
                        : static_cast<unsigned long>(k);
  cplx acc = 1.0, base = z;
  while (e) {
    if (e & 1ul) acc *= base;
    base *= base;
    e >>= 1;
  }
  return inv ? 1.0 / acc : acc;
}

// (-z)^k = (-1)^k z^k; all exponents in the integrands are integers, so no
// branch cuts are ever taken.
inline cplx neg_pow(cplx z, long k) { return parity_sign(k) * cpow_int(z, k); }

// Binomial coefficients in doubles, cached. Sizes here stay below C(200,100).
double binom(int n, int k);

inline double real_checked(cplx v, double tol, const char* what) {
  if (std::abs(v.imag()) > tol)
    throw imaginary_residue(std::string(what) + ": |Im| = " +
                            std::to_string(std::abs(v.imag())) +
                            " exceeds tolerance " + std::to_string(tol));
  return v.real();
}

}  // namespace aztac
