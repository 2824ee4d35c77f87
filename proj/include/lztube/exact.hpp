// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT
//
// Direct numerical reference solver for
//
//   i delta^2 d/dt psi = H(delta) psi,
//   H(delta) = -(delta^4/2) d/dx ( 1/(1 + delta^4 V1) d/dx ) + g(x, delta),
//
// discretized in the angular plane-wave basis (a finite mode window) and a
// uniform x-grid with the manifestly Hermitian flux-form kinetic stencil, and
// propagated by Crank-Nicolson with a banded LU factored once per run.  The
// solver knows nothing about the semiclassical construction; it is the
// independent oracle the predictions are measured against.

#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "lztube/angular.hpp"
#include "lztube/numerics.hpp"
#include "lztube/surface.hpp"

namespace lztube::exact {

using complexd = std::complex<double>;

// ---------------------------------------------------------------------------
// Grid and field
// ---------------------------------------------------------------------------

/// Tensor grid: nx uniform x-points (Dirichlet walls just outside) times
/// n_modes angular modes n = mode_min .. mode_min + n_modes - 1.  Storage is
/// x-major: index(ix, im) = ix * n_modes + im, so the Hamiltonian is banded
/// with half-bandwidth n_modes.
struct Grid {
  double x_min = 0;
  double dx = 0;
  int nx = 0;
  int n_modes = 0;
  int mode_min = 0;

  double x(int ix) const { return x_min + ix * dx; }
  double x_max() const { return x_min + (nx - 1) * dx; }
  int mode(int im) const { return mode_min + im; }
  int index(int ix, int im) const { return ix * n_modes + im; }
  int size() const { return nx * n_modes; }
};

/// Grid factory enforcing resolution: the de Broglie wavelength
/// 2 pi delta^2 / max_momentum must be covered by at least
/// points_per_wavelength points (throws GridTooCoarse below 12).
Grid make_grid(double x_min, double x_max, double delta, double max_momentum,
               int points_per_wavelength, int n_modes, int mode_min);

struct WaveField {
  Grid grid;
  double t = 0;
  double delta = 0;
  std::vector<complexd> psi;  ///< x-major, size grid.size()

  double norm() const;
  complexd inner(const WaveField& other) const;  ///< <this|other> dx-weighted
  /// Mass fraction in the outermost modes on each side (window-adequacy
  /// check): total |psi|^2 share of the top `edge` modes at either edge.
  double mode_edge_mass(int edge = 1) const;
};

// ---------------------------------------------------------------------------
// Hamiltonian
// ---------------------------------------------------------------------------

/// Hermitian banded operator stored by lower diagonals:
/// diag(d)[i] = H(i + d, i) for d = 0 .. band.
class DiscreteHamiltonian {
 public:
  DiscreteHamiltonian() = default;
  DiscreteHamiltonian(Grid grid, int band);

  const Grid& grid() const { return grid_; }
  int band() const { return band_; }

  complexd& at(int row, int col);        // row >= col, row - col <= band
  complexd at(int row, int col) const;

  void apply(const std::vector<complexd>& in, std::vector<complexd>& out) const;

  const std::vector<std::vector<complexd>>& diagonals() const { return diags_; }

 private:
  Grid grid_;
  int band_ = 0;
  std::vector<std::vector<complexd>> diags_;  // diags_[d][i] = H(i+d, i)
};

/// Builds H(delta) on the grid: flux-form kinetic term with coefficient
/// c(x) = 1/(1 + delta^4 V1(x)) evaluated at half-points, fiber eigenvalues
/// + V2 on the diagonal, and delta * W coupling the modes through its
/// harmonics.  include_v1 = false builds the comparison operator with c == 1
/// (their difference is the metric correction term of the kinetic energy).
DiscreteHamiltonian build_hamiltonian(const surface::SurfaceProfile& profile,
                                      const angular::AngularPerturbation& W,
                                      double delta, const Grid& grid,
                                      bool include_v1 = true);

// ---------------------------------------------------------------------------
// Propagation
// ---------------------------------------------------------------------------

/// Crank-Nicolson step: (1 + i dt H / (2 delta^2)) psi_{n+1} =
/// (1 - i dt H / (2 delta^2)) psi_n; the left factor is LU-factored once.
/// Exactly norm-preserving in exact arithmetic.  The observer (if any) is
/// called at t-multiples of observe_every and at both endpoints.
WaveField propagate(const WaveField& start, const DiscreteHamiltonian& H,
                    double t_to, double dt,
                    const std::function<void(const WaveField&)>& observer = {},
                    double observe_every = 0);

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

/// The adiabatic-pair eigenvector fields over the grid: at each x the two
/// eigenvectors of the mode-space matrix g(x, delta) continuing the crossing
/// pair, phase- and order-tracked continuously in x (A = upper branch).
struct LevelBasis {
  Grid grid;
  std::vector<complexd> phiA, phiB;  ///< x-major, size grid.size()
};
LevelBasis build_level_basis(const surface::SurfaceProfile& profile,
                             const angular::AngularPerturbation& W, double delta,
                             const Grid& grid, const angular::CrossingPoint& pair);

/// |<Phi_C(x)|psi(x)>|^2 integrated over x for C = A, B; `other` is the
/// remainder of the squared norm.
struct Populations {
  double A = 0, B = 0, other = 0;
};
Populations level_populations(const WaveField& f, const LevelBasis& basis);

/// Per-mode mass |psi_n|^2 integrated over x.
std::vector<double> mode_populations(const WaveField& f);

/// Embeds a two-component field c1 psi1(x) + c2 psi2(x) into the full mode
/// space; psi12 supplies the pair basis vectors at each grid x (x-major,
/// 2 * size entries: psi1 then psi2 per x-point).
struct PairBasisField {
  Grid grid;
  std::vector<complexd> psi1, psi2;  ///< x-major, size grid.size()
};
WaveField embed_two_component(const std::vector<double>& x,
                              const std::vector<complexd>& c1,
                              const std::vector<complexd>& c2,
                              const PairBasisField& basis, double t, double delta);

// ---------------------------------------------------------------------------
// Residual of an approximate solution
// ---------------------------------------------------------------------------

/// One sample of || i delta^2 d/dt Psi - H Psi || with the time derivative by
/// central differences of the supplied state family; r_term is the
/// contribution of the metric correction (H_full - H_plain) Psi alone.
struct ResidualSample {
  double t = 0;
  double full = 0;
  double r_term = 0;
};
ResidualSample bo_residual(const std::function<WaveField(double)>& Psi,
                           const DiscreteHamiltonian& H_full,
                           const DiscreteHamiltonian& H_plain, double t,
                           double dt_fd);

}  // namespace lztube::exact
