// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT

#include "lztube/surface.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "lztube/errors.hpp"
#include "lztube/numerics.hpp"

namespace lztube::surface {

SurfaceProfile::SurfaceProfile(Fn r, Fn r1, Fn r2, Fn r3, double delta_max,
                               double magnetic_field)
    : r_(std::move(r)),
      r1_(std::move(r1)),
      r2_(std::move(r2)),
      r3_(std::move(r3)),
      delta_max_(delta_max),
      magnetic_field_(magnetic_field) {
  if (!(delta_max_ > 0))
    throw InvalidParameters("SurfaceProfile: delta_max must be positive");
  if (!(magnetic_field_ > 0))
    throw InvalidParameters("SurfaceProfile: magnetic field must be positive");
}

SurfaceProfile SurfaceProfile::custom(Fn r, double delta_max,
                                      double magnetic_field) {
  auto d1 = [r](double x, double delta) {
    return numerics::deriv1_richardson([&](double u) { return r(u, delta); }, x);
  };
  auto d2 = [r](double x, double delta) {
    return numerics::deriv2([&](double u) { return r(u, delta); }, x, 1e-3);
  };
  auto d3 = [r](double x, double delta) {
    return numerics::deriv3([&](double u) { return r(u, delta); }, x, 1e-2);
  };
  return SurfaceProfile(std::move(r), std::move(d1), std::move(d2), std::move(d3),
                        delta_max, magnetic_field);
}

SurfaceProfile SurfaceProfile::cylinder(double base_radius, double magnetic_field) {
  if (!(base_radius > 0))
    throw InvalidParameters("cylinder: base radius must be positive");
  auto zero = [](double, double) { return 0.0; };
  return SurfaceProfile([base_radius](double, double) { return base_radius; },
                        zero, zero, zero, 1.0, magnetic_field);
}

SurfaceProfile SurfaceProfile::gaussian_bump(double base, double amplitude,
                                             double width, double magnetic_field) {
  if (!(width > 0)) throw InvalidParameters("gaussian_bump: width must be positive");
  if (!(base > 0)) throw InvalidParameters("gaussian_bump: base must be positive");
  const double w2 = width * width;
  auto g = [w2](double x) { return std::exp(-x * x / w2); };
  return SurfaceProfile(
      [=](double x, double) { return base + amplitude * g(x); },
      [=](double x, double) { return amplitude * (-2 * x / w2) * g(x); },
      [=](double x, double) {
        return amplitude * (4 * x * x / (w2 * w2) - 2 / w2) * g(x);
      },
      [=](double x, double) {
        return amplitude * (12 * x / (w2 * w2) - 8 * x * x * x / (w2 * w2 * w2)) *
               g(x);
      },
      1.0, magnetic_field);
}

SurfaceProfile SurfaceProfile::tanh_step(double base, double amplitude,
                                         double steepness, double magnetic_field) {
  if (!(base - std::abs(amplitude) > 0))
    throw InvalidParameters("tanh_step: radius must stay positive");
  auto th = [steepness](double x) { return std::tanh(steepness * x); };
  return SurfaceProfile(
      [=](double x, double) { return base + amplitude * th(x); },
      [=](double x, double) {
        const double t = th(x);
        return amplitude * steepness * (1 - t * t);
      },
      [=](double x, double) {
        const double t = th(x);
        return -2 * amplitude * steepness * steepness * t * (1 - t * t);
      },
      [=](double x, double) {
        const double t = th(x);
        const double s2 = 1 - t * t;
        return -2 * amplitude * steepness * steepness * steepness * s2 *
               (1 - 3 * t * t);
      },
      1.0, magnetic_field);
}

double SurfaceProfile::radius(double x, double delta) const {
  const double R = r_(x, delta);
  if (!(R > 0)) throw InvalidParameters("SurfaceProfile: radius must stay positive");
  return R;
}
double SurfaceProfile::radius_d1(double x, double delta) const { return r1_(x, delta); }
double SurfaceProfile::radius_d2(double x, double delta) const { return r2_(x, delta); }
double SurfaceProfile::radius_d3(double x, double delta) const { return r3_(x, delta); }

SurfaceProfile SurfaceProfile::scaled(double factor) const {
  if (!(factor > 0)) throw InvalidParameters("scaled: factor must be positive");
  SurfaceProfile copy = *this;
  auto wrap = [factor](const Fn& f) {
    return [factor, f](double x, double delta) { return factor * f(x, delta); };
  };
  copy.r_ = wrap(r_);
  copy.r1_ = wrap(r1_);
  copy.r2_ = wrap(r2_);
  copy.r3_ = wrap(r3_);
  return copy;
}

// ---------------------------------------------------------------------------
// Geometric potentials
// ---------------------------------------------------------------------------

double curvature_potential(const SurfaceProfile& p, double x, bool squared,
                           double delta) {
  const double R = p.radius(x, delta);
  const double R1 = p.radius_d1(x, delta);
  const double R2 = p.radius_d2(x, delta);
  const double bracket = 1 + R * R2 / std::pow(1 + R1 * R1, 1.5);
  return -(squared ? bracket * bracket : bracket) / (8 * R * R);
}

double v22(const SurfaceProfile& p, double x, double delta) {
  const double R = p.radius(x, delta);
  const double R1 = p.radius_d1(x, delta);
  const double R2 = p.radius_d2(x, delta);
  const double R3 = p.radius_d3(x, delta);
  const double q = 1 + R1 * R1;
  return -R1 * R1 / (8 * R * R * q) - (7.0 / 8.0) * R1 * R1 * R2 * R2 / (q * q * q) +
         (R2 + R * (R1 * R3 + R2 * R2)) / (4 * R * q * q);
}

double v1(const SurfaceProfile& p, double x, double delta) {
  const double R1 = p.radius_d1(x, delta);
  return R1 * R1;
}

double flux_quanta(const SurfaceProfile& p, double x, double delta) {
  const double R = p.radius(x, delta);
  return 0.5 * p.magnetic_field() * R * R;
}

namespace {

/// V21 + V22 with the k-th derivative of R replaced by eps^k R^(k).
double v2_from_derivs(double R, double R1, double R2, double R3) {
  const double q = 1 + R1 * R1;
  const double bracket = 1 + R * R2 / std::pow(q, 1.5);
  const double v21 = -bracket * bracket / (8 * R * R);
  const double rest = -R1 * R1 / (8 * R * R * q) -
                      (7.0 / 8.0) * R1 * R1 * R2 * R2 / (q * q * q) +
                      (R2 + R * (R1 * R3 + R2 * R2)) / (4 * R * q * q);
  return v21 + rest;
}

}  // namespace

double v2_scaled(const SurfaceProfile& p, double x, double delta) {
  const double eps = delta * delta;
  const double R = p.radius(x, delta);
  const double R1 = eps * p.radius_d1(x, delta);
  const double R2 = eps * eps * p.radius_d2(x, delta);
  const double R3 = eps * eps * eps * p.radius_d3(x, delta);
  return v2_from_derivs(R, R1, R2, R3);
}

}  // namespace lztube::surface
