// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT
//
// Angular (fast) degree of freedom: the fiber operator on the circle at
// frozen axial position x,
//
//   h(R) = (1/2R^2) (-i d/dtheta + B R^2/2)^2,
//
// whose eigenfunctions are plane waves e^{i n theta}/sqrt(2 pi) with
// eigenvalues lambda_n(R) = (n + B R^2/2)^2 / (2 R^2).  Two branches
// lambda_n, lambda_m with n+m < 0 cross at R = sqrt(-(n+m)/B); a
// symmetry-breaking angular perturbation delta*W turns the crossing into an
// avoided crossing of gap O(delta), and this module builds the local
// two-level normal form around it together with the perturbation series and
// the uniformly valid modified potential.

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "lztube/surface.hpp"

namespace lztube::angular {

using complexd = std::complex<double>;

/// Adiabatic level tag: A is the upper branch (+s), B the lower (-s).
enum class Level { A, B };

// ---------------------------------------------------------------------------
// Fiber spectrum
// ---------------------------------------------------------------------------

/// lambda_n(R) = (n + B R^2/2)^2 / (2 R^2); requires R > 0.
double eigenvalue(int n, double R, double B);

/// d lambda_n / dR in closed form.
double eigenvalue_dR(int n, double R, double B);

/// A crossing of the branches n and m (requires n + m < 0): both eigenvalues
/// coincide at radius = sqrt(-(n+m)/B) with the stated common energy.
struct CrossingPoint {
  int n, m;
  double radius;
  double energy;
};

/// Computes the unique crossing of lambda_n and lambda_m; throws
/// std::invalid_argument unless n + m < 0, n != m and B > 0.
CrossingPoint crossing(int n, int m, double B);

// ---------------------------------------------------------------------------
// Angular perturbation W
// ---------------------------------------------------------------------------

/// Real-valued angular perturbation W(x, theta) = sum_k c_k(x) e^{i k theta}
/// with c_{-k} = conj(c_k) enforced structurally and c_0 = 0 (a mean over the
/// circle belongs to the geometric potential, not to W).
class AngularPerturbation {
 public:
  using Coefficient = std::function<complexd(double x)>;

  AngularPerturbation() = default;

  /// Sets c_k (k > 0); c_{-k} is implied by conjugation.
  void set_harmonic(int k, Coefficient c);
  void set_harmonic(int k, complexd constant);

  static AngularPerturbation zero();
  /// W = w0 sin(theta):  c_1 = -i w0/2.
  static AngularPerturbation sine(double w0);
  /// W = w0 cos(theta):  c_1 = w0/2.
  static AngularPerturbation cosine(double w0);

  complexd coefficient(int k, double x) const;  // c_k(x), any k
  int max_harmonic() const;
  bool is_zero() const { return coeffs_.empty(); }

  /// W evaluated pointwise (real by construction up to roundoff).
  double evaluate(double x, double theta) const;

 private:
  std::map<int, Coefficient> coeffs_;  // k > 0 only
};

/// Matrix element <e^{in.}|W|e^{im.}> = c_{n-m}(x) in the plane-wave basis.
complexd w_matrix_element(const AngularPerturbation& W, int n, int m, double x);

// ---------------------------------------------------------------------------
// Two-level reduction
// ---------------------------------------------------------------------------

struct ReduceOptions {
  int mode_window = 32;        ///< modes kept on each side of the pair
  int fit_points = 21;         ///< samples across the fit window
  double fit_window_scale = 5; ///< fit on |x| <= scale * delta
  bool refine_delta_fit = true;///< Richardson-in-delta refinement of b2, c2
};

/// The 2x2 Hermitian block of g(x, delta) on the spectral subspace of the
/// crossing pair, written as
///
///   g_par = Vbar * I + [ beta        gamma + i sigma ]
///                      [ gamma - i sigma       -beta ]
///
/// in the orthonormal basis (psi1, psi2) obtained by Gram-Schmidt from the
/// projected reference plane waves, with a constant gauge rotation of psi2
/// chosen once so that the off-diagonal is real and positive at the
/// reference point (x=0, delta=delta_ref).  Locally
///
///   beta  = b1 x + b2 delta + O(2),   gamma = c2 delta + O(2),
///   sigma = O(2),
///
/// and the dimensionless rate r = c2^4 / b1^2 controls the transition
/// probability exp(-pi r / eta0) through the avoided crossing.
///
/// rescale_frame() returns the same system in the variables
/// x' = b1 x + b2 delta, delta' = c2 delta, t' = (b1^2/c2^2) t, in which the
/// block becomes r * g_par and the local behavior reads beta = r x' + O(2),
/// gamma = r delta' + O(2).  The rate r itself is frame-invariant and is not
/// recomputed from the rescaled slopes.
class ReducedTwoLevel {
 public:
  struct Entries {
    double beta, gamma, sigma, vbar;
  };

  /// The block entries at (x, delta), in this system's own frame.
  Entries entries(double x, double delta) const;

  /// Adiabatic potentials mu_C = vbar +/- sqrt(beta^2+gamma^2+sigma^2).
  double potential(Level level, double x, double delta) const;

  /// Basis vectors over the mode window (length mode_count()), original frame
  /// coordinates; for the rescaled system pass rescaled coordinates.
  void basis(double x, double delta, std::vector<complexd>& psi1,
             std::vector<complexd>& psi2) const;
  int mode_count() const;
  int mode_of(int storage_index) const;

  double b1() const;
  double b2() const;
  double c2() const;
  double rate() const;

  bool rescaled() const;
  /// Frame maps (identity for the original frame).
  double x_to_frame(double x_orig, double delta_orig) const;
  double x_from_frame(double x_frame, double delta_orig) const;
  double delta_to_frame(double delta_orig) const;
  double time_to_frame(double t_orig) const;
  double time_from_frame(double t_frame) const;

  const CrossingPoint& pair() const;
  const surface::SurfaceProfile& profile() const;
  const AngularPerturbation& perturbation() const;
  double reference_delta() const;

 private:
  friend ReducedTwoLevel reduce_two_level(const surface::SurfaceProfile&,
                                          const CrossingPoint&,
                                          const AngularPerturbation&, double,
                                          double, const ReduceOptions&);
  friend ReducedTwoLevel rescale_frame(const ReducedTwoLevel&);
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  bool rescaled_ = false;
  double b1_ = 0, b2_ = 0, c2_ = 0, rate_ = 0;
};

/// Builds the two-level system for the given crossing pair.  x_window is the
/// half-width of the x-interval on which the reduction will be used (the
/// spectral isolation of the pair is verified on it); delta is the reference
/// value used for the coefficient fit.  Throws IllConditionedCrossing when
/// the fitted b1 or c2 vanishes.
ReducedTwoLevel reduce_two_level(const surface::SurfaceProfile& profile,
                                 const CrossingPoint& pair,
                                 const AngularPerturbation& W, double x_window,
                                 double delta, const ReduceOptions& opts = {});

/// The same system in normal-form variables (see ReducedTwoLevel docs).
ReducedTwoLevel rescale_frame(const ReducedTwoLevel& two_level);

// ---------------------------------------------------------------------------
// Adiabatic angles and eigenvectors
// ---------------------------------------------------------------------------

/// Spherical angles of (beta, gamma, sigma):
///   beta = s cos(theta), gamma = s sin(theta) cos(phi),
///   sigma = s sin(theta) sin(phi),  s = sqrt(beta^2+gamma^2+sigma^2),
/// with theta in [0, pi], phi in (-pi, pi].
struct AdiabaticAngles {
  double theta, phi;
};

/// Throws DegeneratePoint when s = 0 exactly.
AdiabaticAngles angles_from_entries(double beta, double gamma, double sigma);
AdiabaticAngles adiabatic_angles(const ReducedTwoLevel& tl, double x, double delta);

/// Eigenvectors of the traceless block in the (psi1, psi2) basis:
///
///   theta < pi/2 ("+" set, the branch containing theta = 0):
///     Phi_A = ( cos(theta/2),  e^{-i phi} sin(theta/2) )
///     Phi_B = ( -e^{i phi} sin(theta/2),  cos(theta/2) )
///   theta > pi/2 ("-" set, the branch containing theta = pi):
///     Phi_A = ( e^{i phi} cos(theta/2),  sin(theta/2) )
///     Phi_B = ( -sin(theta/2),  e^{-i phi} cos(theta/2) )
///
/// Each set is continuous on its half; at theta = pi/2 exactly the "+" set is
/// used (deterministic tie-break).  On the classical trajectory the "-" half
/// is the one visited at negative times and "+" at positive times, which is
/// what the time_sign convention of the assembled states refers to;
/// time_sign does not alter the printed formulas.
struct LevelVectors {
  std::array<complexd, 2> A, B;
};
LevelVectors eigvecs_from_angles(const AdiabaticAngles& ang);
LevelVectors adiabatic_eigvecs(const ReducedTwoLevel& tl, double x, double delta,
                               int time_sign = 0);

// ---------------------------------------------------------------------------
// Perturbation series and modified potential
// ---------------------------------------------------------------------------

/// Second-order Rayleigh-Schroedinger data for an isolated level n at fixed x:
///   mu0 = lambda_n(R(x)) + V2(x, 0),
///   mu1 = <n|W|n> = 0 for mean-free W with no zeroth harmonic,
///   mu2 = -sum_{k != n} |W_{kn}|^2 / (lambda_k - lambda_n),
/// the reduced-resolvent sum truncated at |k - n| <= mode_cutoff.
struct IsolatedSeries {
  double mu0, mu1, mu2;
  double value(double delta) const { return mu0 + delta * mu1 + delta * delta * mu2; }
};
IsolatedSeries perturbation_series(const surface::SurfaceProfile& profile,
                                   const AngularPerturbation& W, int level,
                                   double x, int mode_cutoff = 64);

/// Taylor data in delta (through second order, coefficients tabulated on an
/// x-grid and interpolated by cubic splines) of the two-level entries:
///   B3 = beta0 + delta beta1 + delta^2 beta2, and likewise G3 (gamma),
///   S3 (sigma), V3 (trace part).  These feed the modified potential
///   Vtilde_C = +/- sqrt(B3^2 + G3^2 + S3^2) + V3,
/// which tracks the exact adiabatic potential to O(delta^3) uniformly
/// through the avoided crossing.
class SecondOrderArrays {
 public:
  SecondOrderArrays() = default;

  double B3(double x, double delta) const;
  double G3(double x, double delta) const;
  double S3(double x, double delta) const;
  double V3(double x, double delta) const;
  double s(double x, double delta) const;
  /// x-derivative of the trace part at fixed delta (enters the classical
  /// outer asymptotics).
  double V3_slope(double x, double delta) const;

  double x_min() const;
  double x_max() const;

 private:
  friend SecondOrderArrays expand_two_level(const ReducedTwoLevel&,
                                            const std::vector<double>&, double);
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

/// Tabulates the delta-expansion of tl.entries on x_grid.  fd_step is the
/// delta-stencil step of the central finite differences (the expansion is
/// taken at delta = 0, where the coupling vanishes and the coefficients have
/// closed-form leading behavior).
SecondOrderArrays expand_two_level(const ReducedTwoLevel& tl,
                                   const std::vector<double>& x_grid,
                                   double fd_step = 0.1);

/// Vtilde_C(x, delta) = +/- s(x, delta) + V3(x, delta).
double modified_potential(const SecondOrderArrays& series, Level level, double x,
                          double delta);

// ---------------------------------------------------------------------------
// Classical effective potential on the uniform cylinder
// ---------------------------------------------------------------------------

/// Minimum of the classical radial effective potential
/// (p_theta + B R^2/2)^2 / (2 R^2) for a unit-mass negative unit charge:
/// R0 = sqrt(2 |p_theta| / B); the value is 0 when p_theta <= 0 and
/// p_theta * B otherwise.
struct EffectiveMinimum {
  double radius;
  double value;
};
EffectiveMinimum classical_effective_minimum(double p_theta, double B);

}  // namespace lztube::angular
