// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT
//
// Shared numerical utilities: finite-difference derivatives with Richardson
// extrapolation, natural cubic splines, periodic trapezoid quadrature, an
// adaptive Dormand-Prince 5(4) integrator, and a complex banded LU solver.
// These are deliberately self-contained so that every result of the library
// is reproducible bit-for-bit across runs (no threaded BLAS in the hot path).

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace lztube::numerics {

using complexd = std::complex<double>;

// ---------------------------------------------------------------------------
// Finite differences (Fornberg central stencils, 4th-order accurate)
// ---------------------------------------------------------------------------

/// First derivative, 5-point central stencil, error O(h^4).
double deriv1(const std::function<double(double)>& f, double x, double h);

/// Second derivative, 5-point central stencil, error O(h^4).
double deriv2(const std::function<double(double)>& f, double x, double h);

/// Third derivative, 7-point central stencil, error O(h^4).
double deriv3(const std::function<double(double)>& f, double x, double h);

/// First derivative by step-halving Richardson extrapolation of the central
/// difference until the estimate stabilizes; returns the best estimate.
/// Intended for oracle-style checks where the optimal step is unknown.
double deriv1_richardson(const std::function<double(double)>& f, double x,
                         double h0 = 1e-2);

// ---------------------------------------------------------------------------
// Natural cubic spline on a strictly increasing grid
// ---------------------------------------------------------------------------

/// Standard natural cubic spline (second derivative zero at both ends).
/// eval/eval_deriv are exact derivatives of each other, so a Hamiltonian
/// flow driven by -eval_deriv conserves eval-energy up to integrator error.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double eval(double x) const;
  double eval_deriv(double x) const;
  double eval_deriv2(double x) const;

  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t interval(double x) const;
  std::vector<double> x_, y_, m_;  // m_ holds second derivatives at the knots
};

// ---------------------------------------------------------------------------
// Quadrature on the circle
// ---------------------------------------------------------------------------

/// Trapezoid rule on [0, 2*pi) with n uniform points.  For smooth periodic
/// integrands this converges faster than any power of 1/n, which makes it the
/// right tool for angular matrix elements.
complexd circle_quadrature(const std::function<complexd(double)>& f, int n);

// ---------------------------------------------------------------------------
// Adaptive Dormand-Prince 5(4) integrator
// ---------------------------------------------------------------------------

/// Right-hand side signature: dydt = f(t, y).
using OdeRhs =
    std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 1e-4;
  double max_step = 0.0;  // 0 means unrestricted
  std::size_t max_steps = 20'000'000;
};

/// Integrates y' = f(t, y) from t0 to t1 (either direction) and reports the
/// solution at every requested output time, which must be monotone from t0
/// towards t1.  Uses the Dormand-Prince 5(4) embedded pair with a PI step
/// controller and FSAL; dense output is obtained by stepping exactly onto
/// each requested time.
void integrate_dopri5(const OdeRhs& f, double t0, std::vector<double> y0,
                      const std::vector<double>& t_out,
                      const std::function<void(double t, const std::vector<double>& y)>& sink,
                      const OdeOptions& opts = {});

// ---------------------------------------------------------------------------
// Complex banded LU with partial pivoting
// ---------------------------------------------------------------------------

/// LU factorization of a complex band matrix with kl sub- and ku
/// super-diagonals, stored in the conventional band layout with kl extra
/// rows for fill-in (same layout as LAPACK zgbtrf).  Hand-rolled so that the
/// propagator does not depend on a (potentially threaded) external LAPACK.
class BandedLU {
 public:
  /// a(i, j) accessor into the packed band: rows kl..2*kl+ku of the storage.
  BandedLU(int n, int kl, int ku);

  /// Sets A(i, j); only |i - j| within the band is storable.
  void set(int i, int j, complexd v);
  complexd get(int i, int j) const;

  /// Factorizes in place.  Throws SolverBreakdown on an exactly singular pivot.
  void factorize();

  /// Solves A x = b in place (after factorize()).
  void solve(std::vector<complexd>& b) const;

  int size() const { return n_; }

 private:
  int n_, kl_, ku_;
  int ld_;   // leading dimension = 2*kl + ku + 1
  bool factored_ = false;
  std::vector<complexd> ab_;  // column-major packed band storage
  std::vector<int> piv_;
};

/// Matrix-vector product for a Hermitian band matrix given by its lower
/// triangle: diag[d][i] = A(i+d, i) for d = 0..kl.  Used for the right-hand
/// side of the Crank-Nicolson step and for Hermiticity checks.
void hermitian_band_matvec(const std::vector<std::vector<complexd>>& lower_diags,
                           const std::vector<complexd>& x,
                           std::vector<complexd>& y);

}  // namespace lztube::numerics
