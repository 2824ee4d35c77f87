// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT

#include "lztube/exact.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "lztube/errors.hpp"

namespace lztube::exact {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_same_grid(const Grid& a, const Grid& b, const char* who) {
  if (a.nx != b.nx || a.n_modes != b.n_modes || a.mode_min != b.mode_min ||
      a.dx != b.dx || a.x_min != b.x_min)
    throw InvalidParameters(std::string(who) + ": grids do not match");
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid and field
// ---------------------------------------------------------------------------

Grid make_grid(double x_min, double x_max, double delta, double max_momentum,
               int points_per_wavelength, int n_modes, int mode_min) {
  if (!(x_max > x_min) || !(delta > 0.0) || !(max_momentum > 0.0) ||
      n_modes < 1)
    throw InvalidParameters("make_grid: bad domain, delta or mode window");
  if (points_per_wavelength < 12)
    throw GridTooCoarse(
        "make_grid: fewer than 12 points per de Broglie wavelength (got " +
        std::to_string(points_per_wavelength) + ")");
  const double wavelength = 2.0 * kPi * delta * delta / max_momentum;
  const double target_dx = wavelength / points_per_wavelength;
  const int nx =
      std::max(16, static_cast<int>(std::ceil((x_max - x_min) / target_dx)) + 1);
  Grid g;
  g.x_min = x_min;
  g.nx = nx;
  g.dx = (x_max - x_min) / (nx - 1);
  g.n_modes = n_modes;
  g.mode_min = mode_min;
  return g;
}

double WaveField::norm() const {
  double s = 0.0;
  for (const complexd& v : psi) s += std::norm(v);
  return std::sqrt(s * grid.dx);
}

complexd WaveField::inner(const WaveField& other) const {
  require_same_grid(grid, other.grid, "WaveField::inner");
  complexd s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    s += std::conj(psi[i]) * other.psi[i];
  return s * grid.dx;
}

double WaveField::mode_edge_mass(int edge) const {
  if (edge < 1 || 2 * edge > grid.n_modes)
    throw InvalidParameters("mode_edge_mass: edge must satisfy 1 <= edge <= n_modes/2");
  double total = 0.0, rim = 0.0;
  for (int ix = 0; ix < grid.nx; ++ix) {
    for (int im = 0; im < grid.n_modes; ++im) {
      const double m = std::norm(psi[grid.index(ix, im)]);
      total += m;
      if (im < edge || im >= grid.n_modes - edge) rim += m;
    }
  }
  return total > 0.0 ? rim / total : 0.0;
}

// ---------------------------------------------------------------------------
// Hamiltonian
// ---------------------------------------------------------------------------

DiscreteHamiltonian::DiscreteHamiltonian(Grid grid, int band)
    : grid_(grid), band_(band) {
  if (band < 0 || band >= grid.size())
    throw InvalidParameters("DiscreteHamiltonian: band out of range");
  diags_.resize(band + 1);
  for (int d = 0; d <= band; ++d)
    diags_[d].assign(static_cast<std::size_t>(grid.size() - d),
                     complexd(0.0, 0.0));
}

complexd& DiscreteHamiltonian::at(int row, int col) {
  const int d = row - col;
  if (col < 0 || row >= grid_.size() || d < 0 || d > band_)
    throw std::out_of_range("DiscreteHamiltonian::at: outside the lower band");
  return diags_[d][col];
}

complexd DiscreteHamiltonian::at(int row, int col) const {
  const int d = row - col;
  if (col < 0 || row >= grid_.size() || d < 0 || d > band_)
    throw std::out_of_range("DiscreteHamiltonian::at: outside the lower band");
  return diags_[d][col];
}

void DiscreteHamiltonian::apply(const std::vector<complexd>& in,
                                std::vector<complexd>& out) const {
  if (static_cast<int>(in.size()) != grid_.size())
    throw InvalidParameters("DiscreteHamiltonian::apply: size mismatch");
  numerics::hermitian_band_matvec(diags_, in, out);
}

DiscreteHamiltonian build_hamiltonian(const surface::SurfaceProfile& profile,
                                      const angular::AngularPerturbation& W,
                                      double delta, const Grid& grid,
                                      bool include_v1) {
  if (grid.nx < 3 || grid.n_modes < 1 || !(grid.dx > 0.0))
    throw InvalidParameters("build_hamiltonian: degenerate grid");
  if (!(delta > 0.0))
    throw InvalidParameters("build_hamiltonian: delta must be positive");

  const int N = grid.n_modes;
  DiscreteHamiltonian H(grid, N);
  const double B = profile.magnetic_field();
  const double d4 = std::pow(delta, 4);
  const double kfac = 0.5 * d4 / (grid.dx * grid.dx);
  const int band_w = W.max_harmonic();

  auto flux_coeff = [&](double xh) {
    return include_v1 ? 1.0 / (1.0 + d4 * surface::v1(profile, xh, delta))
                      : 1.0;
  };

  // The left half-point coefficient of cell ix equals the right one of
  // ix - 1; carry it across the sweep.
  double cl = flux_coeff(grid.x(0) - 0.5 * grid.dx);
  for (int ix = 0; ix < grid.nx; ++ix) {
    const double x = grid.x(ix);
    const double cr = flux_coeff(x + 0.5 * grid.dx);
    const double R = profile.radius(x, delta);
    const double v2 = surface::v2_scaled(profile, x, delta);
    for (int im = 0; im < N; ++im) {
      const int row = grid.index(ix, im);
      // Dirichlet walls just outside: the boundary rows keep both half-point
      // coefficients on the diagonal.
      H.at(row, row) = angular::eigenvalue(grid.mode(im), R, B) + v2 +
                       kfac * (cl + cr);
      for (int jm = std::max(0, im - band_w); jm < im; ++jm)
        H.at(row, grid.index(ix, jm)) =
            delta * W.coefficient(grid.mode(im) - grid.mode(jm), x);
      if (ix > 0) H.at(row, grid.index(ix - 1, im)) = -kfac * cl;
    }
    cl = cr;
  }
  return H;
}

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

WaveField propagate(const WaveField& start, const DiscreteHamiltonian& H,
                    double t_to, double dt,
                    const std::function<void(const WaveField&)>& observer,
                    double observe_every) {
  require_same_grid(start.grid, H.grid(), "propagate");
  if (!(start.delta > 0.0) || !(dt > 0.0))
    throw InvalidParameters("propagate: need delta > 0 and dt > 0");
  if (static_cast<int>(start.psi.size()) != start.grid.size())
    throw InvalidParameters("propagate: field size does not match its grid");
  const double span = t_to - start.t;
  if (span < 0.0)
    throw InvalidParameters("propagate: t_to must not precede the start time");

  WaveField f = start;
  if (observer) observer(f);
  if (span == 0.0) return f;

  const long nsteps =
      std::max(1L, std::lround(std::ceil(span / dt - 1e-12)));
  const double h = span / static_cast<double>(nsteps);
  const complexd ilam(0.0, 0.5 * h / (start.delta * start.delta));

  // Factor (1 + i h H / (2 delta^2)) once.
  const int n = H.grid().size();
  const int band = H.band();
  numerics::BandedLU lu(n, band, band);
  for (int col = 0; col < n; ++col) {
    for (int d = 0; d <= band; ++d) {
      const int row = col + d;
      if (row >= n) break;
      const complexd hij = H.at(row, col);
      if (d == 0) {
        lu.set(col, col, 1.0 + ilam * hij);
      } else if (hij != complexd(0.0, 0.0)) {
        lu.set(row, col, ilam * hij);
        lu.set(col, row, ilam * std::conj(hij));
      }
    }
  }
  lu.factorize();

  std::vector<complexd> hpsi(f.psi.size());
  double next_observe = observe_every > 0.0
                            ? start.t + observe_every
                            : std::numeric_limits<double>::infinity();
  double last_observed = start.t;
  for (long step = 0; step < nsteps; ++step) {
    H.apply(f.psi, hpsi);
    for (std::size_t i = 0; i < f.psi.size(); ++i) f.psi[i] -= ilam * hpsi[i];
    lu.solve(f.psi);
    f.t = start.t + (step + 1) * h;
    if (observer && f.t >= next_observe - 1e-12 && step + 1 < nsteps) {
      observer(f);
      last_observed = f.t;
      while (next_observe <= f.t + 1e-12) next_observe += observe_every;
    }
  }
  f.t = t_to;
  if (observer && last_observed != f.t) observer(f);
  return f;
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

LevelBasis build_level_basis(const surface::SurfaceProfile& profile,
                             const angular::AngularPerturbation& W,
                             double delta, const Grid& grid,
                             const angular::CrossingPoint& pair) {
  const int N = grid.n_modes;
  if (N < 2) throw InvalidParameters("build_level_basis: need >= 2 modes");
  const int in = pair.n - grid.mode_min;
  const int im = pair.m - grid.mode_min;
  if (in < 0 || in >= N || im < 0 || im >= N)
    throw InvalidParameters(
        "build_level_basis: crossing pair outside the mode window");

  LevelBasis lb;
  lb.grid = grid;
  lb.phiA.assign(static_cast<std::size_t>(grid.size()), complexd(0.0, 0.0));
  lb.phiB.assign(static_cast<std::size_t>(grid.size()), complexd(0.0, 0.0));

  const double B = profile.magnetic_field();
  const int band_w = W.max_harmonic();
  Eigen::MatrixXcd g(N, N);
  Eigen::VectorXcd prevA, prevB;

  for (int ix = 0; ix < grid.nx; ++ix) {
    const double x = grid.x(ix);
    const double R = profile.radius(x, delta);
    const double v2 = surface::v2_scaled(profile, x, delta);
    g.setZero();
    for (int i = 0; i < N; ++i) {
      g(i, i) = angular::eigenvalue(grid.mode(i), R, B) + v2;
      for (int j = std::max(0, i - band_w); j < i; ++j) {
        const complexd w =
            delta * W.coefficient(grid.mode(i) - grid.mode(j), x);
        g(i, j) = w;
        g(j, i) = std::conj(w);
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
    if (es.info() != Eigen::Success)
      throw SolverBreakdown("build_level_basis: eigensolver failed");

    // the pair = the two eigenvalues nearest the unperturbed branch values
    const double t1 = angular::eigenvalue(pair.n, R, B) + v2;
    const double t2 = angular::eigenvalue(pair.m, R, B) + v2;
    std::vector<std::pair<double, int>> dist(N);
    for (int i = 0; i < N; ++i) {
      const double mu = es.eigenvalues()(i);
      dist[i] = {std::min(std::abs(mu - t1), std::abs(mu - t2)), i};
    }
    std::sort(dist.begin(), dist.end());
    int ia = dist[0].second, ib = dist[1].second;
    if (es.eigenvalues()(ia) < es.eigenvalues()(ib)) std::swap(ia, ib);

    Eigen::VectorXcd vA = es.eigenvectors().col(ia);
    Eigen::VectorXcd vB = es.eigenvectors().col(ib);

    auto fix_phase = [](Eigen::VectorXcd& v, const Eigen::VectorXcd& prev) {
      complexd a;
      if (prev.size() == 0) {
        // first column: make the largest component real positive
        int best = 0;
        for (int i = 1; i < v.size(); ++i)
          if (std::abs(v(i)) > std::abs(v(best))) best = i;
        a = v(best);
      } else {
        a = prev.dot(v);  // continuity: <prev|v> real positive
      }
      if (std::abs(a) > 0.0) v *= std::conj(a) / std::abs(a);
    };
    fix_phase(vA, prevA);
    fix_phase(vB, prevB);
    prevA = vA;
    prevB = vB;

    for (int i = 0; i < N; ++i) {
      lb.phiA[grid.index(ix, i)] = vA(i);
      lb.phiB[grid.index(ix, i)] = vB(i);
    }
  }
  return lb;
}

Populations level_populations(const WaveField& f, const LevelBasis& basis) {
  require_same_grid(f.grid, basis.grid, "level_populations");
  const Grid& g = f.grid;
  double a = 0.0, b = 0.0, total = 0.0;
  for (int ix = 0; ix < g.nx; ++ix) {
    complexd ca = 0.0, cb = 0.0;
    for (int im = 0; im < g.n_modes; ++im) {
      const complexd v = f.psi[g.index(ix, im)];
      ca += std::conj(basis.phiA[g.index(ix, im)]) * v;
      cb += std::conj(basis.phiB[g.index(ix, im)]) * v;
      total += std::norm(v);
    }
    a += std::norm(ca);
    b += std::norm(cb);
  }
  Populations p;
  p.A = a * g.dx;
  p.B = b * g.dx;
  p.other = total * g.dx - p.A - p.B;
  return p;
}

std::vector<double> mode_populations(const WaveField& f) {
  const Grid& g = f.grid;
  std::vector<double> pop(static_cast<std::size_t>(g.n_modes), 0.0);
  for (int ix = 0; ix < g.nx; ++ix)
    for (int im = 0; im < g.n_modes; ++im)
      pop[im] += std::norm(f.psi[g.index(ix, im)]);
  for (double& v : pop) v *= g.dx;
  return pop;
}

WaveField embed_two_component(const std::vector<double>& x,
                              const std::vector<complexd>& c1,
                              const std::vector<complexd>& c2,
                              const PairBasisField& basis, double t,
                              double delta) {
  const Grid& g = basis.grid;
  if (static_cast<int>(x.size()) != g.nx ||
      c1.size() != x.size() || c2.size() != x.size())
    throw InvalidParameters(
        "embed_two_component: component arrays must match the grid length");
  if (static_cast<int>(basis.psi1.size()) != g.size() ||
      static_cast<int>(basis.psi2.size()) != g.size())
    throw InvalidParameters("embed_two_component: basis size mismatch");
  for (int ix = 0; ix < g.nx; ++ix)
    if (std::abs(x[ix] - g.x(ix)) > 1e-9 * (1.0 + std::abs(g.x(ix))))
      throw InvalidParameters(
          "embed_two_component: x samples do not lie on the grid");

  WaveField f;
  f.grid = g;
  f.t = t;
  f.delta = delta;
  f.psi.assign(static_cast<std::size_t>(g.size()), complexd(0.0, 0.0));
  for (int ix = 0; ix < g.nx; ++ix)
    for (int im = 0; im < g.n_modes; ++im)
      f.psi[g.index(ix, im)] = c1[ix] * basis.psi1[g.index(ix, im)] +
                               c2[ix] * basis.psi2[g.index(ix, im)];
  return f;
}

// ---------------------------------------------------------------------------
// Residual of an approximate solution
// ---------------------------------------------------------------------------

ResidualSample bo_residual(const std::function<WaveField(double)>& Psi,
                           const DiscreteHamiltonian& H_full,
                           const DiscreteHamiltonian& H_plain, double t,
                           double dt_fd) {
  if (!(dt_fd > 0.0)) throw InvalidParameters("bo_residual: dt_fd > 0");
  const WaveField f0 = Psi(t);
  const WaveField fp = Psi(t + dt_fd);
  const WaveField fm = Psi(t - dt_fd);
  require_same_grid(f0.grid, H_full.grid(), "bo_residual");
  require_same_grid(f0.grid, H_plain.grid(), "bo_residual");
  require_same_grid(f0.grid, fp.grid, "bo_residual");
  require_same_grid(f0.grid, fm.grid, "bo_residual");

  std::vector<complexd> hfull(f0.psi.size()), hplain(f0.psi.size());
  H_full.apply(f0.psi, hfull);
  H_plain.apply(f0.psi, hplain);

  const complexd id2(0.0, f0.delta * f0.delta);
  double sfull = 0.0, sr = 0.0;
  for (std::size_t i = 0; i < f0.psi.size(); ++i) {
    const complexd dpsi = (fp.psi[i] - fm.psi[i]) / (2.0 * dt_fd);
    sfull += std::norm(id2 * dpsi - hfull[i]);
    sr += std::norm(hfull[i] - hplain[i]);
  }
  ResidualSample out;
  out.t = t;
  out.full = std::sqrt(sfull * f0.grid.dx);
  out.r_term = std::sqrt(sr * f0.grid.dx);
  return out;
}

}  // namespace lztube::exact
