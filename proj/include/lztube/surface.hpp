// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT
//
// Geometry of the tube: a surface of revolution with radius profile R(x)
// around the x-axis, threaded by a uniform axial magnetic field B.  After
// transforming away the Riemannian volume weight, the effective 1D+angle
// Hamiltonian needs four geometric ingredients which this module provides:
//
//   V1  = R'^2                                   (metric correction)
//   V21 = -(1/8R^2) (1 + R R'' / (1+R'^2)^{3/2})^2   (curvature potential)
//   V22 = the weight-transformation remainder (four derivative terms)
//   phi = B R^2 / 2                              (flux quanta through a slice)
//
// The slow-modulation regime rescales x so that each derivative of R carries
// one power of eps = delta^2; v2_scaled evaluates V21+V22 with that scaling.

#pragma once

#include <functional>
#include <memory>
#include <string>

namespace lztube::surface {

/// Radius profile R(x, delta) with derivatives up to third order.
///
/// Profiles must be smooth, strictly positive, and bounded away from zero on
/// any compact interval; delta enters only through deliberate profile
/// families (the presets ignore it).  Analytic derivatives are used when
/// available; the `custom` factory falls back to Richardson-extrapolated
/// finite differences.
class SurfaceProfile {
 public:
  using Fn = std::function<double(double x, double delta)>;

  /// Profile with analytic derivatives.
  SurfaceProfile(Fn r, Fn r1, Fn r2, Fn r3, double delta_max, double magnetic_field);

  /// Profile with finite-difference derivatives (Richardson extrapolated).
  static SurfaceProfile custom(Fn r, double delta_max, double magnetic_field);

  /// R(x) = scale * base_radius                      (uniform cylinder)
  static SurfaceProfile cylinder(double base_radius, double magnetic_field);

  /// R(x) = scale * (base + amplitude * exp(-(x/width)^2))
  static SurfaceProfile gaussian_bump(double base, double amplitude, double width,
                                      double magnetic_field);

  /// R(x) = scale * (base + amplitude * tanh(steepness * x))
  /// A monotone neck-to-bell profile; the workhorse for crossing experiments.
  static SurfaceProfile tanh_step(double base, double amplitude, double steepness,
                                  double magnetic_field);

  double radius(double x, double delta = 0.0) const;
  double radius_d1(double x, double delta = 0.0) const;
  double radius_d2(double x, double delta = 0.0) const;
  double radius_d3(double x, double delta = 0.0) const;

  double delta_max() const { return delta_max_; }
  double magnetic_field() const { return magnetic_field_; }

  /// Returns a copy whose radius is multiplied by `factor` (used by the
  /// pipeline to pin the crossing radius at x = 0 exactly).
  SurfaceProfile scaled(double factor) const;

 private:
  Fn r_, r1_, r2_, r3_;
  double delta_max_;
  double magnetic_field_;
};

/// Curvature-induced potential of a surface of revolution,
///   -(1/8R^2) * (1 + R R'' / (1+R'^2)^{3/2}),
/// kin to the classic thin-layer potential -(1/8)(kappa1 - kappa2)^2 (they
/// coincide at critical points of R).  With `squared = true` the bracket is
/// squared; the squared form is the one entering the weight-free Hamiltonian
/// and is used everywhere downstream.
double curvature_potential(const SurfaceProfile& p, double x, bool squared = true,
                           double delta = 0.0);

/// Remainder generated by removing the volume weight R(1+R'^2)^{1/2} from
/// the measure:
///   V22 = -R'^2/(8R^2(1+R'^2)) - (7/8) R'^2 R''^2/(1+R'^2)^3
///         + (R'' + R(R'R''' + R''^2)) / (4R(1+R'^2)^2).
double v22(const SurfaceProfile& p, double x, double delta = 0.0);

/// Metric correction V1 = R'(x, delta)^2.
double v1(const SurfaceProfile& p, double x, double delta = 0.0);

/// Number of flux quanta through the cross-section at x: B R(x)^2 / 2.
double flux_quanta(const SurfaceProfile& p, double x, double delta = 0.0);

/// Full geometric potential V2(x, delta) = V21 + V22 evaluated with the
/// slow-modulation scaling: every k-th derivative of R carries a factor
/// eps^k with eps = delta^2.  For delta = 0 this reduces to -1/(8R^2).
double v2_scaled(const SurfaceProfile& p, double x, double delta);

}  // namespace lztube::surface
