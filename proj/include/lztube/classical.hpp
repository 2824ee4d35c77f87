// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT
//
// Classical skeleton of the semiclassical states: trajectories
// (a, eta, S) of the 1D Hamiltonian eta^2/2 + V(a) with the action
// S' = eta^2/2 - V(a), the linearized flow (A, B) with A' = iB,
// B' = i V''(a) A and invariant Re(conj(A) B) = 1, the matched-asymptotics
// machinery around an avoided crossing (outer expansions, tilded initial
// data at t = +/- delta^kappa, momentum from energy conservation), and the
// exponent bookkeeping of the inner/outer regime decomposition.

#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "lztube/angular.hpp"
#include "lztube/numerics.hpp"

namespace lztube::classical {

using complexd = std::complex<double>;
using angular::Level;

// ---------------------------------------------------------------------------
// Regime exponents
// ---------------------------------------------------------------------------

/// The exponents carving time into inner (|t| <= delta^{1-xi}) and outer
/// regimes, the spatial cutoff radius delta^{1-delta_prime}, and the tilded
/// matching time t0 = delta^kappa.  Validity demands
///   0 < xi < 1/3,   0 < delta_prime < xi,   2/3 < kappa < 1,
///   1 - delta_prime - kappa > 0,
/// all checked by validate() (throws RegimeViolation).
struct RegimeExponents {
  double xi = 0.30;
  double delta_prime = 0.20;
  double kappa = 0.75;
  double horizon = 0.5;  ///< total half-width T of the time interval

  void validate() const;
  double inner_boundary(double delta) const;  // delta^{1-xi}
  double cutoff_radius(double delta) const;   // delta^{1-delta_prime}
  double matching_time(double delta) const;   // delta^kappa
};

// ---------------------------------------------------------------------------
// Potentials and trajectories
// ---------------------------------------------------------------------------

/// A 1D potential with derivative on a finite domain.  Evaluation outside
/// [x_min, x_max] throws DomainExit.
class Potential1D {
 public:
  Potential1D() = default;
  Potential1D(std::function<double(double)> v, std::function<double(double)> dv,
              double x_min, double x_max);

  /// Natural cubic spline through samples; the derivative is the exact
  /// derivative of the interpolant, so the flow conserves the interpolant's
  /// energy to integrator accuracy.
  static Potential1D from_samples(const std::vector<double>& x,
                                  const std::vector<double>& v);
  static Potential1D from_function(const std::function<double(double)>& v,
                                   double x_min, double x_max, int n_samples = 2001);

  double value(double x) const;
  double deriv(double x) const;
  /// V'' by central differences of value with step h (the curvature input of
  /// the linearized flow).
  double second_deriv(double x, double h) const;

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  bool empty() const { return !v_; }

 private:
  std::function<double(double)> v_, dv_;
  double x_min_ = 0, x_max_ = 0;
};

/// One sample of the classical data.
struct TrajectoryPoint {
  double t, a, eta, S;
};

/// A trajectory sampled on a monotone time grid with cubic Hermite
/// interpolation (position uses eta as the exact derivative).
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<TrajectoryPoint> pts);

  double a(double t) const;
  double eta(double t) const;
  double S(double t) const;
  double t_min() const;
  double t_max() const;
  const std::vector<TrajectoryPoint>& points() const { return pts_; }

 private:
  std::size_t segment(double t) const;
  std::vector<TrajectoryPoint> pts_;
};

/// Integrates a' = eta, eta' = -V'(a), S' = eta^2/2 - V(a) from
/// (t_anchor, a0, eta0, S0) to both ends of [t_from, t_to] (t_anchor must lie
/// inside), sampling n_out points per unit time at least.  Throws DomainExit
/// if the trajectory leaves the potential domain and TurningPoint if the
/// momentum changes sign (monotone transit is an assumption of the
/// construction, not a limitation of the integrator -- callers that allow
/// turning points set allow_turning).
Trajectory integrate_trajectory(const Potential1D& V, double t_anchor, double a0,
                                double eta0, double S0, double t_from,
                                double t_to, int n_out_per_unit = 400,
                                bool allow_turning = false,
                                const numerics::OdeOptions& opts = {});

/// Convenience: anchored at the crossing, a(0) = 0, eta(0) = eta0, S(0) = 0.
Trajectory integrate_trajectory(const Potential1D& V, double eta0, double t_from,
                                double t_to, int n_out_per_unit = 400);

/// Linearized flow along a trajectory: A' = iB, B' = i V''(a(t)) A, anchored
/// at (t_anchor, A0, B0), integrated across the trajectory's time span.
/// Re(conj(A) B) = 1 is preserved exactly by the flow and monitored.
struct LinearizedPoint {
  double t;
  complexd A, B;
};
class LinearizedFlow {
 public:
  LinearizedFlow() = default;
  explicit LinearizedFlow(std::vector<LinearizedPoint> pts);
  complexd A(double t) const;
  complexd B(double t) const;
  const std::vector<LinearizedPoint>& points() const { return pts_; }

 private:
  std::size_t segment(double t) const;
  std::vector<LinearizedPoint> pts_;
};
LinearizedFlow integrate_linearized(const Trajectory& traj, const Potential1D& V,
                                    double t_anchor, complexd A0, complexd B0,
                                    double fd_step, int n_out_per_unit = 400,
                                    const numerics::OdeOptions& opts = {});

/// eta = sqrt(2 (E - V(a))); throws TurningPoint when E < V(a) + tol.
double momentum_from_energy(double E, const Potential1D& V, double a,
                            double tol = 1e-12);

// ---------------------------------------------------------------------------
// Matched asymptotics around the crossing
// ---------------------------------------------------------------------------

/// Outer expansion of the classical position and momentum on level A/B near
/// the crossing (rescaled frame; valid for |t|/delta -> inf, t^3/delta^2 -> 0):
///
///   a(t) = -v3_slope t^2/2 + eta0 t +/- (r/eta0) delta t
///          -/+ r [ t^2/2 + delta^2 log|t| / (2 eta0^2)
///                 + delta^2 (1 + 2 log(2 eta0)) / (4 eta0^2)
///                 - delta^2 log(delta) / (2 eta0^2) ]
///   eta(t) = d a / dt termwise,
///
/// upper signs for A, lower for B; v3_slope is the x-slope of the trace part
/// of the modified potential at the crossing.
struct AsymptoticPoint {
  double a, eta;
};
AsymptoticPoint outer_asymptotics(Level level, double t, double delta,
                                  double eta0, double r, double v3_slope);

/// Full classical state of one branch, as carried by the pipeline.
struct ClassicalState {
  double t = 0;
  double a = 0, eta = 0, S = 0;
  complexd A{1, 0}, B{1, 0};
  Level level = Level::B;
};

/// Initial data of the tilded (modified-potential) flow at t = time_sign *
/// delta^kappa: position from the outer expansion, momentum from energy
/// conservation on v_tilde with crossing energy eta0_level^2/2 + v_tilde(0),
/// envelope data A~ = A(0), B~ = B(0) -/+ sign(t) i r A(0) / eta0, and the
/// action anchor S_at_t0 carried over from the untilded flow.
ClassicalState tilded_initial_data(Level level, int time_sign, double delta,
                                   const RegimeExponents& exps, double r,
                                   double eta0, double eta0_level,
                                   complexd A_at_0, complexd B_at_0,
                                   double v3_slope, const Potential1D& v_tilde,
                                   double S_at_t0);

}  // namespace lztube::classical
