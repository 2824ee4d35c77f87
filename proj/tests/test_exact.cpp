// SPDX-License-Identifier: MIT
//
// Tests for the direct reference solver: grid construction, the banded
// Hermitian Hamiltonian against a dense oracle, Crank-Nicolson propagation
// checked on closed-form discrete eigenstates, conservation laws, the
// adiabatic level basis, two-component embedding, and the residual probe.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "lztube/angular.hpp"
#include "lztube/errors.hpp"
#include "lztube/exact.hpp"
#include "lztube/surface.hpp"

using namespace lztube;
using exact::complexd;
using exact::Grid;
using exact::WaveField;
using doctest::Approx;

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::MatrixXcd dense_of(const exact::DiscreteHamiltonian& H) {
  const int n = H.grid().size();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    for (int d = 0; d <= H.band(); ++d) {
      const int row = col + d;
      if (row >= n) break;
      M(row, col) = H.at(row, col);
      M(col, row) = std::conj(H.at(row, col));
    }
  }
  return M;
}

WaveField gaussian_mode_packet(const Grid& g, double delta, int mode,
                               double center, double width, double momentum) {
  WaveField f;
  f.grid = g;
  f.t = 0.0;
  f.delta = delta;
  f.psi.assign(static_cast<std::size_t>(g.size()), complexd(0.0, 0.0));
  const int im = mode - g.mode_min;
  REQUIRE(im >= 0);
  REQUIRE(im < g.n_modes);
  for (int ix = 0; ix < g.nx; ++ix) {
    const double x = g.x(ix);
    const double env = std::exp(-0.5 * (x - center) * (x - center) /
                                (width * width));
    f.psi[g.index(ix, im)] =
        env * std::exp(complexd(0.0, momentum * (x - center) /
                                         (delta * delta)));
  }
  const double n = f.norm();
  for (complexd& v : f.psi) v /= n;
  return f;
}

}  // namespace

TEST_CASE("grid factory: resolution rule and index arithmetic") {
  const double delta = 0.1, p = 0.5;
  const auto g = exact::make_grid(-1.0, 1.0, delta, p, 16, 8, -5);
  CHECK(g.x_min == -1.0);
  CHECK(g.x(g.nx - 1) == Approx(1.0).epsilon(1e-14));
  CHECK(g.dx <= 2.0 * kPi * delta * delta / p / 16.0);
  CHECK(g.n_modes == 8);
  CHECK(g.mode(0) == -5);
  CHECK(g.mode(7) == 2);
  CHECK(g.index(3, 2) == 3 * 8 + 2);
  CHECK(g.size() == g.nx * 8);

  CHECK_THROWS_AS((void)exact::make_grid(-1.0, 1.0, delta, p, 11, 8, -5),
                  GridTooCoarse);
  CHECK_THROWS_AS((void)exact::make_grid(1.0, -1.0, delta, p, 16, 8, -5),
                  InvalidParameters);
  CHECK_THROWS_AS((void)exact::make_grid(-1.0, 1.0, 0.0, p, 16, 8, -5),
                  InvalidParameters);
  CHECK_THROWS_AS((void)exact::make_grid(-1.0, 1.0, delta, p, 16, 0, -5),
                  InvalidParameters);
}

TEST_CASE("wave field: norm, inner product, edge mass") {
  Grid g;
  g.x_min = 0.0;
  g.dx = 0.25;
  g.nx = 3;
  g.n_modes = 4;
  g.mode_min = -2;

  WaveField f;
  f.grid = g;
  f.delta = 0.1;
  f.psi.assign(12, complexd(0.0, 0.0));
  f.psi[g.index(0, 1)] = complexd(1.0, 1.0);
  f.psi[g.index(2, 2)] = complexd(0.0, -2.0);
  CHECK(f.norm() == Approx(std::sqrt((2.0 + 4.0) * 0.25)).epsilon(1e-14));

  WaveField h = f;
  h.psi[g.index(0, 1)] = complexd(2.0, 0.0);
  // <f|h> = conj(1+i)*2*dx + |2i|^2*dx
  const complexd want = complexd(1.0, -1.0) * 2.0 * 0.25 + 4.0 * 0.25;
  CHECK(std::abs(f.inner(h) - want) < 1e-14);
  CHECK(f.inner(f).real() == Approx(f.norm() * f.norm()).epsilon(1e-14));

  // mass sits in modes 1 and 2 (interior): zero share in the outermost pair
  CHECK(f.mode_edge_mass(1) == 0.0);
  // widening the rim to two modes per side covers everything
  CHECK(f.mode_edge_mass(2) == Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS((void)f.mode_edge_mass(0), InvalidParameters);
  CHECK_THROWS_AS((void)f.mode_edge_mass(3), InvalidParameters);

  WaveField other = f;
  other.grid.dx = 0.5;
  CHECK_THROWS_AS((void)f.inner(other), InvalidParameters);
}

TEST_CASE("discrete Hamiltonian: banded storage against a dense oracle") {
  const auto prof = surface::SurfaceProfile::tanh_step(1.0, 0.25, 2.0, 1.0);
  const auto W = angular::AngularPerturbation::sine(1.0);
  const double delta = 0.12;
  Grid g;
  g.x_min = -0.4;
  g.dx = 0.1;
  g.nx = 9;
  g.n_modes = 5;
  g.mode_min = -3;

  const auto H = exact::build_hamiltonian(prof, W, delta, g);
  CHECK(H.band() == g.n_modes);

  SUBCASE("entries match the stated operator") {
    const double d4 = std::pow(delta, 4);
    const double kfac = 0.5 * d4 / (g.dx * g.dx);
    for (int ix = 0; ix < g.nx; ++ix) {
      const double x = g.x(ix);
      const double R = prof.radius(x, delta);
      const double cl =
          1.0 / (1.0 + d4 * surface::v1(prof, x - 0.5 * g.dx, delta));
      const double cr =
          1.0 / (1.0 + d4 * surface::v1(prof, x + 0.5 * g.dx, delta));
      for (int im = 0; im < g.n_modes; ++im) {
        const int row = g.index(ix, im);
        const complexd want =
            angular::eigenvalue(g.mode(im), R, 1.0) +
            surface::v2_scaled(prof, x, delta) + kfac * (cl + cr);
        CHECK(std::abs(H.at(row, row) - want) < 1e-13);
        if (ix > 0)
          CHECK(std::abs(H.at(row, g.index(ix - 1, im)) - (-kfac * cl)) <
                1e-15);
        if (im > 0)
          CHECK(std::abs(H.at(row, g.index(ix, im - 1)) -
                         delta * W.coefficient(1, x)) < 1e-15);
      }
    }
    // out-of-band access is rejected
    CHECK_THROWS_AS((void)H.at(0, 1), std::out_of_range);
    CHECK_THROWS_AS((void)H.at(2 * g.n_modes, 0), std::out_of_range);
  }

  SUBCASE("apply equals the dense matrix-vector product") {
    const Eigen::MatrixXcd M = dense_of(H);
    std::mt19937 rng(42);
    std::normal_distribution<double> nd;
    Eigen::VectorXcd v(g.size());
    for (int i = 0; i < g.size(); ++i) v(i) = complexd(nd(rng), nd(rng));
    std::vector<complexd> in(v.data(), v.data() + v.size()), out(in.size());
    H.apply(in, out);
    const Eigen::VectorXcd mv = M * v;
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i)
      worst = std::max(worst, std::abs(out[i] - mv(i)));
    CHECK(worst < 1e-12);
  }

  SUBCASE("Hermiticity through the action: <u|Hv> = <Hu|v>") {
    std::mt19937 rng(7);
    std::normal_distribution<double> nd;
    WaveField u, v;
    u.grid = v.grid = g;
    u.delta = v.delta = delta;
    u.psi.resize(g.size());
    v.psi.resize(g.size());
    for (int i = 0; i < g.size(); ++i) {
      u.psi[i] = complexd(nd(rng), nd(rng));
      v.psi[i] = complexd(nd(rng), nd(rng));
    }
    WaveField Hu = u, Hv = v;
    H.apply(u.psi, Hu.psi);
    H.apply(v.psi, Hv.psi);
    CHECK(std::abs(u.inner(Hv) - std::conj(v.inner(Hu))) < 1e-12);
  }

  SUBCASE("the metric correction is the only difference to the plain operator") {
    const auto Hp = exact::build_hamiltonian(prof, W, delta, g, false);
    for (int ix = 1; ix < g.nx; ++ix) {
      const int row = g.index(ix, 2);
      // plain kinetic neighbor is exactly -delta^4/(2 dx^2)
      CHECK(std::abs(Hp.at(row, g.index(ix - 1, 2)) -
                     (-0.5 * std::pow(delta, 4) / (g.dx * g.dx))) < 1e-15);
      // coupling and fiber parts are identical
      CHECK(Hp.at(row, g.index(ix, 1)) == H.at(row, g.index(ix, 1)));
    }
  }
}

TEST_CASE("propagation: closed-form Crank-Nicolson phase on a discrete eigenstate") {
  // Uniform cylinder, no perturbation: H is mode-diagonal and the x-part is
  // the standard Dirichlet Laplacian with eigenvectors sin(j pi (ix+1)/(nx+1)).
  const auto cyl = surface::SurfaceProfile::cylinder(1.0, 1.0);
  const auto W0 = angular::AngularPerturbation::zero();
  const double delta = 0.2;
  Grid g;
  g.x_min = -1.0;
  g.dx = 2.0 / 63.0;
  g.nx = 64;
  g.n_modes = 3;
  g.mode_min = -1;
  const auto H = exact::build_hamiltonian(cyl, W0, delta, g);

  const int j = 5, mode = 0, im = mode - g.mode_min;
  const double theta = j * kPi / (g.nx + 1);
  const double d4 = std::pow(delta, 4);
  const double Ekin = d4 / (g.dx * g.dx) * (1.0 - std::cos(theta));
  const double E = Ekin + angular::eigenvalue(mode, 1.0, 1.0) +
                   surface::v2_scaled(cyl, 0.0, delta);

  WaveField f;
  f.grid = g;
  f.t = 0.0;
  f.delta = delta;
  f.psi.assign(static_cast<std::size_t>(g.size()), complexd(0.0, 0.0));
  for (int ix = 0; ix < g.nx; ++ix)
    f.psi[g.index(ix, im)] = std::sin((ix + 1) * theta);
  const double n0 = f.norm();
  for (complexd& v : f.psi) v /= n0;

  // eigenstate check first: H psi = E psi
  std::vector<complexd> hpsi(f.psi.size());
  H.apply(f.psi, hpsi);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.psi.size(); ++i)
    worst = std::max(worst, std::abs(hpsi[i] - E * f.psi[i]));
  REQUIRE(worst < 1e-13);

  const double t_to = 1.0, dt = 1.0 / 400.0;
  int observer_calls = 0;
  double last_t = -1.0;
  const WaveField out = exact::propagate(
      f, H, t_to, dt,
      [&](const WaveField& w) {
        ++observer_calls;
        last_t = w.t;
      },
      0.25);

  CHECK(out.t == t_to);
  CHECK(last_t == t_to);
  CHECK(observer_calls == 5);  // t = 0, 0.25, 0.5, 0.75, 1.0

  // norm is conserved to roundoff
  CHECK(std::abs(out.norm() - 1.0) < 1e-12);

  // the state only rotates by the exact Cayley phase per step
  const double nu = dt * E / (2.0 * delta * delta);
  const complexd step_phase = (1.0 - complexd(0.0, nu)) / (1.0 + complexd(0.0, nu));
  const complexd total_phase = std::pow(step_phase, 400);
  const complexd overlap = f.inner(out);
  CHECK(std::abs(overlap - total_phase) < 1e-11);
  // ... which approximates e^{-i E t / delta^2} at O(dt^2) per unit time
  const double cn_phase_err =
      std::abs(std::arg(total_phase * std::exp(complexd(0.0, E / (delta * delta)))));
  CHECK(cn_phase_err < std::pow(dt * E / (delta * delta), 2));

  SUBCASE("argument guards") {
    CHECK_THROWS_AS((void)exact::propagate(f, H, -0.5, dt), InvalidParameters);
    CHECK_THROWS_AS((void)exact::propagate(f, H, 1.0, 0.0), InvalidParameters);
    WaveField bad = f;
    bad.delta = 0.0;
    CHECK_THROWS_AS((void)exact::propagate(bad, H, 1.0, dt), InvalidParameters);
  }
}

TEST_CASE("conservation: norm drift and uncoupled mode populations") {
  const auto prof = surface::SurfaceProfile::tanh_step(1.0, 0.25, 2.0, 1.0);
  const double delta = 0.1;
  const auto g = exact::make_grid(-0.9, 0.9, delta, 0.6, 14, 7, -4);

  SUBCASE("W = 0 conserves every mode population to roundoff") {
    const auto H =
        exact::build_hamiltonian(prof, angular::AngularPerturbation::zero(),
                                 delta, g);
    WaveField f = gaussian_mode_packet(g, delta, 0, -0.3, 0.08, 0.4);
    // put a second packet in another mode
    const WaveField f1 = gaussian_mode_packet(g, delta, -2, 0.2, 0.1, -0.3);
    for (std::size_t i = 0; i < f.psi.size(); ++i)
      f.psi[i] = (f.psi[i] + f1.psi[i]) / std::sqrt(2.0);

    const auto before = exact::mode_populations(f);
    const WaveField out = exact::propagate(f, H, 0.5, 0.002);
    const auto after = exact::mode_populations(out);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i)
      CHECK(std::abs(before[i] - after[i]) < 1e-10);
    CHECK(std::abs(out.norm() - f.norm()) < 1e-12);
  }

  SUBCASE("coupled system: norm drift below 1e-9 per unit time") {
    const auto H = exact::build_hamiltonian(
        prof, angular::AngularPerturbation::sine(1.0), delta, g);
    const WaveField f = gaussian_mode_packet(g, delta, 0, -0.3, 0.08, 0.4);
    const WaveField out = exact::propagate(f, H, 1.0, 0.002);
    CHECK(std::abs(out.norm() - f.norm()) < 1e-9);
    // mass moved between modes (the coupling does something)
    const auto before = exact::mode_populations(f);
    const auto after = exact::mode_populations(out);
    double moved = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i)
      moved += std::abs(after[i] - before[i]);
    CHECK(moved > 1e-3);
  }
}

TEST_CASE("halving space and time resolution moves the observables < 1e-4") {
  const auto prof = surface::SurfaceProfile::tanh_step(1.0, 0.25, 2.0, 1.0);
  const auto W = angular::AngularPerturbation::sine(1.0);
  const double delta = 0.1;
  const auto pair = angular::crossing(0, -1, 1.0);

  // the same physical run at two resolutions
  auto run = [&](int ppw, double dt) {
    const auto g = exact::make_grid(-0.9, 0.9, delta, 0.6, ppw, 9, -5);
    const auto H = exact::build_hamiltonian(prof, W, delta, g);
    const auto lb = exact::build_level_basis(prof, W, delta, g, pair);
    exact::PairBasisField pb;
    pb.grid = g;
    pb.psi1 = lb.phiA;
    pb.psi2 = lb.phiB;
    std::vector<double> xs(g.nx);
    std::vector<complexd> c1(g.nx, complexd(0.0, 0.0)), c2(g.nx);
    for (int ix = 0; ix < g.nx; ++ix) {
      xs[ix] = g.x(ix);
      c2[ix] = std::exp(-0.5 * std::pow((xs[ix] + 0.45) / 0.09, 2)) *
               std::exp(complexd(0.0, 0.45 * xs[ix] / (delta * delta)));
    }
    WaveField f = exact::embed_two_component(xs, c1, c2, pb, 0.0, delta);
    const double n = f.norm();
    for (complexd& v : f.psi) v /= n;
    const WaveField out = exact::propagate(f, H, 0.8, dt);
    return exact::level_populations(out, lb);
  };

  const auto coarse = run(28, 0.002);
  const auto fine = run(56, 0.001);
  CHECK(std::abs(coarse.A - fine.A) < 1e-4);
  CHECK(std::abs(coarse.B - fine.B) < 1e-4);
  CHECK(coarse.A + coarse.B == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("level basis: tracked eigenvector fields of the fiber matrix") {
  const auto prof = surface::SurfaceProfile::tanh_step(1.0, 0.25, 2.0, 1.0);
  const auto W = angular::AngularPerturbation::sine(1.0);
  const double delta = 0.05;
  const auto pair = angular::crossing(0, -1, 1.0);
  Grid g;
  g.x_min = -0.5;
  g.dx = 0.004;
  g.nx = 251;
  g.n_modes = 9;
  g.mode_min = -5;

  const auto lb = exact::build_level_basis(prof, W, delta, g, pair);

  SUBCASE("pointwise eigenvectors with A the upper branch") {
    const double B = prof.magnetic_field();
    for (const int ix : {0, 60, 125, 190, 250}) {
      const double x = g.x(ix);
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(g.n_modes, g.n_modes);
      for (int i = 0; i < g.n_modes; ++i) {
        m(i, i) = angular::eigenvalue(g.mode(i), prof.radius(x, delta), B) +
                  surface::v2_scaled(prof, x, delta);
        if (i > 0) {
          m(i, i - 1) = delta * W.coefficient(1, x);
          m(i - 1, i) = std::conj(m(i, i - 1));
        }
      }
      Eigen::VectorXcd vA(g.n_modes), vB(g.n_modes);
      for (int i = 0; i < g.n_modes; ++i) {
        vA(i) = lb.phiA[g.index(ix, i)];
        vB(i) = lb.phiB[g.index(ix, i)];
      }
      CHECK(std::abs(vA.norm() - 1.0) < 1e-12);
      CHECK(std::abs(vB.norm() - 1.0) < 1e-12);
      CHECK(std::abs(vA.dot(vB)) < 1e-12);
      const double evA = vA.dot(m * vA).real();
      const double evB = vB.dot(m * vB).real();
      CHECK((m * vA - evA * vA).norm() < 1e-11);
      CHECK((m * vB - evB * vB).norm() < 1e-11);
      CHECK(evA > evB);
    }
  }

  SUBCASE("phase continuity along x") {
    for (int ix = 1; ix < g.nx; ++ix) {
      complexd ovA = 0.0, ovB = 0.0;
      for (int i = 0; i < g.n_modes; ++i) {
        ovA += std::conj(lb.phiA[g.index(ix - 1, i)]) * lb.phiA[g.index(ix, i)];
        ovB += std::conj(lb.phiB[g.index(ix - 1, i)]) * lb.phiB[g.index(ix, i)];
      }
      CHECK(ovA.real() > 0.999);
      CHECK(std::abs(ovA.imag()) < 1e-6);
      CHECK(ovB.real() > 0.999);
    }
  }

  SUBCASE("far from the crossing the branches are nearly plane waves") {
    // up to an O(delta / branch separation) admixture from the coupling
    // x = -0.5: R < 1, the n = 0 branch is the lower one there
    int i0 = -g.mode_min, im1 = -1 - g.mode_min;
    CHECK(std::abs(lb.phiB[g.index(0, i0)]) > 0.98);
    CHECK(std::abs(lb.phiA[g.index(0, im1)]) > 0.98);
    // x = +0.5: R > 1, the roles have swapped
    CHECK(std::abs(lb.phiA[g.index(g.nx - 1, i0)]) > 0.98);
    CHECK(std::abs(lb.phiB[g.index(g.nx - 1, im1)]) > 0.98);
  }

  SUBCASE("pair outside the window is rejected") {
    Grid bad = g;
    bad.mode_min = 2;
    CHECK_THROWS_AS(
        (void)exact::build_level_basis(prof, W, delta, bad, pair),
        InvalidParameters);
  }
}

TEST_CASE("embedding and level populations") {
  const auto prof = surface::SurfaceProfile::tanh_step(1.0, 0.25, 2.0, 1.0);
  const auto W = angular::AngularPerturbation::sine(1.0);
  const double delta = 0.05;
  const auto pair = angular::crossing(0, -1, 1.0);
  Grid g;
  g.x_min = -0.5;
  g.dx = 0.005;
  g.nx = 201;
  g.n_modes = 9;
  g.mode_min = -5;

  const auto lb = exact::build_level_basis(prof, W, delta, g, pair);
  exact::PairBasisField pb;
  pb.grid = g;
  pb.psi1 = lb.phiA;
  pb.psi2 = lb.phiB;

  std::vector<double> xs(g.nx);
  std::vector<complexd> c1(g.nx), c2(g.nx);
  for (int ix = 0; ix < g.nx; ++ix) {
    const double x = g.x(ix);
    xs[ix] = x;
    c1[ix] = 0.6 * std::exp(-40.0 * (x + 0.2) * (x + 0.2)) *
             std::exp(complexd(0.0, 3.0 * x));
    c2[ix] = complexd(0.0, 0.8) * std::exp(-55.0 * (x - 0.1) * (x - 0.1));
  }
  const WaveField f = exact::embed_two_component(xs, c1, c2, pb, -1.5, delta);
  CHECK(f.t == -1.5);
  CHECK(f.delta == delta);

  // populations recover the component masses; nothing leaks elsewhere
  double m1 = 0.0, m2 = 0.0;
  for (int ix = 0; ix < g.nx; ++ix) {
    m1 += std::norm(c1[ix]) * g.dx;
    m2 += std::norm(c2[ix]) * g.dx;
  }
  const auto pops = exact::level_populations(f, lb);
  CHECK(pops.A == Approx(m1).epsilon(1e-12));
  CHECK(pops.B == Approx(m2).epsilon(1e-12));
  CHECK(std::abs(pops.other) < 1e-12);
  CHECK(pops.A + pops.B + pops.other ==
        Approx(f.norm() * f.norm()).epsilon(1e-12));

  // mode populations sum to the squared norm
  const auto mp = exact::mode_populations(f);
  double sum = 0.0;
  for (const double v : mp) sum += v;
  CHECK(sum == Approx(f.norm() * f.norm()).epsilon(1e-12));

  SUBCASE("validation") {
    std::vector<double> badx = xs;
    badx[3] += 1e-3;
    CHECK_THROWS_AS(
        (void)exact::embed_two_component(badx, c1, c2, pb, 0.0, delta),
        InvalidParameters);
    std::vector<complexd> shortc(c1.begin(), c1.end() - 1);
    CHECK_THROWS_AS(
        (void)exact::embed_two_component(xs, shortc, c2, pb, 0.0, delta),
        InvalidParameters);
  }
}

TEST_CASE("residual probe on exact and frozen families") {
  const auto prof = surface::SurfaceProfile::tanh_step(1.0, 0.25, 2.0, 1.0);
  const auto W0 = angular::AngularPerturbation::zero();
  const double delta = 0.15;
  Grid g;
  g.x_min = -0.6;
  g.dx = 0.012;
  g.nx = 101;
  g.n_modes = 3;
  g.mode_min = -2;

  const auto Hf = exact::build_hamiltonian(prof, W0, delta, g, true);
  const auto Hp = exact::build_hamiltonian(prof, W0, delta, g, false);

  // a discrete eigenstate of the full operator, evolved by its exact phase
  const Eigen::MatrixXcd M = dense_of(Hf);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  const int pick = 17;
  const double E = es.eigenvalues()(pick);
  auto family = [&](double t) {
    WaveField f;
    f.grid = g;
    f.t = t;
    f.delta = delta;
    f.psi.resize(g.size());
    const complexd ph = std::exp(complexd(0.0, -E * t / (delta * delta)));
    for (int i = 0; i < g.size(); ++i)
      f.psi[i] = ph * es.eigenvectors()(i, pick);
    // normalize in the dx-weighted norm
    const double n = f.norm();
    for (complexd& v : f.psi) v /= n;
    return f;
  };

  const double hfd = 1e-4;
  const auto res = exact::bo_residual(family, Hf, Hp, 0.3, hfd);
  CHECK(res.t == 0.3);
  // central-difference phase error: |E| * (E hfd / delta^2)^2 / 6
  const double expect =
      std::abs(E) * std::pow(std::abs(E) * hfd / (delta * delta), 2) / 6.0;
  CHECK(res.full < 2.0 * expect + 1e-12);
  // the metric term of a curved profile is present and equals the direct norm
  WaveField f0 = family(0.3);
  std::vector<complexd> a(f0.psi.size()), b(f0.psi.size());
  Hf.apply(f0.psi, a);
  Hp.apply(f0.psi, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  CHECK(res.r_term == Approx(std::sqrt(s * g.dx)).epsilon(1e-12));
  CHECK(res.r_term > 0.0);

  // a frozen (time-independent) family violates the equation by ~ ||H psi||
  auto frozen = [&](double) { return family(0.0); };
  const auto bad = exact::bo_residual(frozen, Hf, Hp, 0.3, hfd);
  CHECK(bad.full > 0.1 * std::abs(E));

  CHECK_THROWS_AS(
      (void)exact::bo_residual(family, Hf, Hp, 0.3, 0.0), InvalidParameters);
}
