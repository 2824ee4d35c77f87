// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lztube/errors.hpp"
#include "lztube/numerics.hpp"
#include "lztube/surface.hpp"

using namespace lztube;
using namespace lztube::surface;

TEST_CASE("cylinder geometry is flat") {
  auto p = SurfaceProfile::cylinder(2.0, 1.5);
  CHECK(p.radius(0.3) == 2.0);
  CHECK(v1(p, 0.3) == 0.0);
  CHECK(v22(p, 0.3) == 0.0);
  // Only the azimuthal curvature survives: -1/(8 R^2).
  CHECK(curvature_potential(p, 0.3) == doctest::Approx(-1.0 / 32.0).epsilon(1e-14));
  CHECK(curvature_potential(p, 0.3, false) ==
        doctest::Approx(-1.0 / 32.0).epsilon(1e-14));
  CHECK(flux_quanta(p, -1.0) == doctest::Approx(0.5 * 1.5 * 4.0).epsilon(1e-14));
}

TEST_CASE("preset analytic derivatives match Richardson finite differences") {
  auto check_profile = [](const SurfaceProfile& p) {
    for (double x : {-1.7, -0.4, 0.0, 0.6, 2.3}) {
      auto r = [&](double u) { return p.radius(u); };
      CHECK(p.radius_d1(x) ==
            doctest::Approx(numerics::deriv1_richardson(r, x)).epsilon(1e-8));
      CHECK(p.radius_d2(x) ==
            doctest::Approx(numerics::deriv2(r, x, 1e-2)).epsilon(1e-6));
      CHECK(p.radius_d3(x) ==
            doctest::Approx(numerics::deriv3(r, x, 2e-2)).epsilon(1e-4));
    }
  };
  check_profile(SurfaceProfile::gaussian_bump(1.0, 0.3, 1.2, 1.0));
  check_profile(SurfaceProfile::tanh_step(1.0, 0.25, 2.0, 1.0));
}

TEST_CASE("custom profile derivatives agree with an analytic preset") {
  auto analytic = SurfaceProfile::gaussian_bump(1.0, 0.3, 1.2, 1.0);
  auto fd = SurfaceProfile::custom(
      [](double x, double) { return 1.0 + 0.3 * std::exp(-x * x / 1.44); }, 1.0,
      1.0);
  for (double x : {-0.8, 0.1, 1.4}) {
    CHECK(fd.radius_d1(x) == doctest::Approx(analytic.radius_d1(x)).epsilon(1e-8));
    CHECK(fd.radius_d2(x) == doctest::Approx(analytic.radius_d2(x)).epsilon(1e-6));
    CHECK(fd.radius_d3(x) == doctest::Approx(analytic.radius_d3(x)).epsilon(1e-4));
  }
}

TEST_CASE("geometric potentials against independent numerics") {
  auto p = SurfaceProfile::tanh_step(1.0, 0.25, 2.0, 1.0);
  const double x = 0.35;
  const double R = p.radius(x);
  const double R1 = p.radius_d1(x);
  const double R2 = p.radius_d2(x);
  const double R3 = p.radius_d3(x);
  const double q = 1 + R1 * R1;

  SUBCASE("v1 is the squared slope") { CHECK(v1(p, x) == doctest::Approx(R1 * R1)); }

  SUBCASE("curvature bracket, squared vs plain") {
    const double bracket = 1 + R * R2 / std::pow(q, 1.5);
    CHECK(curvature_potential(p, x, false) ==
          doctest::Approx(-bracket / (8 * R * R)).epsilon(1e-13));
    CHECK(curvature_potential(p, x, true) ==
          doctest::Approx(-bracket * bracket / (8 * R * R)).epsilon(1e-13));
  }

  SUBCASE("v22 term by term") {
    const double t1 = -R1 * R1 / (8 * R * R * q);
    const double t2 = -(7.0 / 8.0) * R1 * R1 * R2 * R2 / (q * q * q);
    const double t3 = (R2 + R * (R1 * R3 + R2 * R2)) / (4 * R * q * q);
    CHECK(v22(p, x) == doctest::Approx(t1 + t2 + t3).epsilon(1e-13));
  }
}

TEST_CASE("slow-modulation scaling equals evaluating on the stretched profile") {
  // Scaling every k-th derivative by eps^k is the same as evaluating the
  // unscaled potentials on q(u) = R(eps u) at u = x / eps.
  auto p = SurfaceProfile::gaussian_bump(1.0, 0.3, 1.2, 1.0);
  const double delta = 0.4;  // large enough that the scaling matters
  const double eps = delta * delta;
  auto stretched = SurfaceProfile::custom(
      [eps](double u, double) { return 1.0 + 0.3 * std::exp(-(eps * u) * (eps * u) / 1.44); },
      1.0, 1.0);
  for (double x : {-0.9, 0.2, 0.7}) {
    const double expected =
        curvature_potential(stretched, x / eps) + v22(stretched, x / eps);
    CHECK(v2_scaled(p, x, delta) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("v2_scaled reduces to the azimuthal term at delta = 0") {
  auto p = SurfaceProfile::tanh_step(1.0, 0.25, 2.0, 1.0);
  for (double x : {-1.0, 0.0, 0.5}) {
    const double R = p.radius(x);
    CHECK(v2_scaled(p, x, 0.0) == doctest::Approx(-1.0 / (8 * R * R)).epsilon(1e-14));
  }
}

TEST_CASE("scaled profiles multiply the radius everywhere") {
  auto p = SurfaceProfile::tanh_step(1.0, 0.25, 2.0, 1.0);
  auto q = p.scaled(1.3);
  for (double x : {-0.5, 0.0, 1.1}) {
    CHECK(q.radius(x) == doctest::Approx(1.3 * p.radius(x)).epsilon(1e-14));
    CHECK(q.radius_d1(x) == doctest::Approx(1.3 * p.radius_d1(x)).epsilon(1e-14));
    CHECK(q.radius_d2(x) == doctest::Approx(1.3 * p.radius_d2(x)).epsilon(1e-14));
  }
}

TEST_CASE("invalid profiles are rejected") {
  CHECK_THROWS_AS(SurfaceProfile::tanh_step(0.2, 0.25, 2.0, 1.0), InvalidParameters);
  CHECK_THROWS_AS(SurfaceProfile::cylinder(-1.0, 1.0), InvalidParameters);
  auto p = SurfaceProfile::custom([](double x, double) { return x; }, 1.0, 1.0);
  CHECK_THROWS_AS(p.radius(-1.0), InvalidParameters);
  CHECK_THROWS_AS(p.scaled(0.0), InvalidParameters);
}
