// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT
//
// Semiclassical wave packets of Hagedorn type in one dimension,
//
//   phi_0(A, B, hbar, a, eta; x) = (pi hbar)^{-1/4} A^{-1/2}
//       exp( -B A^{-1} (x-a)^2 / (2 hbar) + i eta (x-a) / hbar ),
//
// with Re(conj(A) B) = 1, the excited states phi_j generated by the raising
// recurrence, the hbar-scaled Fourier transform mapping (A, B, a, eta) ->
// (B, A, eta, -a), the smooth compactly supported cutoff, the transported
// adiabatic phase field, and the assembly of the Born-Oppenheimer and inner
// two-component states that the reference solver consumes.

#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "lztube/classical.hpp"

namespace lztube::packets {

using complexd = std::complex<double>;
using classical::RegimeExponents;

// ---------------------------------------------------------------------------
// Hagedorn packets
// ---------------------------------------------------------------------------

struct HagedornPacket {
  int j = 0;             ///< excitation index
  complexd A{1, 0};      ///< position spread parameter
  complexd B{1, 0};      ///< momentum spread parameter
  double hbar = 1.0;     ///< semiclassical parameter (delta^2 downstream)
  double a = 0.0;        ///< center position
  double eta = 0.0;      ///< center momentum
  /// Branch of A^{-1/2} used in phi_0; callers following a continuous A(t)
  /// update it with continue_sqrt.  Zero (the default) means "principal".
  complexd sqrtA{0, 0};

  /// Throws InvalidParameters unless hbar > 0, j >= 0, and
  /// |Re(conj(A) B) - 1| <= 1e-10.
  void validate() const;

  double position_uncertainty() const;  ///< sqrt((j+1/2) hbar) |A|
  double momentum_uncertainty() const;  ///< sqrt((j+1/2) hbar) |B|
};

/// The square root of new_A continuous with prev_sqrt (picks the sign whose
/// phase is nearer; prev_sqrt = 0 selects the principal branch).
complexd continue_sqrt(complexd prev_sqrt, complexd new_A);

/// phi_j evaluated pointwise / on a grid via the three-term polynomial
/// recurrence P_{j+1} = ( (sqrt(2)/A) xi P_j - (conj(A)/A) sqrt(j) P_{j-1} )
/// / sqrt(j+1), xi = (x-a)/sqrt(hbar).
complexd hagedorn_point(const HagedornPacket& p, double x);
std::vector<complexd> hagedorn_eval(const HagedornPacket& p,
                                    const std::vector<double>& x);

/// Uniform grid covering a +/- 8 position-uncertainties around the center
/// with at least min_points points and enough resolution for the momentum
/// content eta +/- 8 momentum-uncertainties.
std::vector<double> packet_grid(const HagedornPacket& p, int min_points = 512);

// ---------------------------------------------------------------------------
// Scaled Fourier transform
// ---------------------------------------------------------------------------

/// (F_hbar psi)(k) = (2 pi hbar)^{-1/2} Int psi(x) e^{-i k x / hbar} dx,
/// computed by FFT on the uniform input grid; the returned momentum grid is
/// k_j = 2 pi hbar j / (N dx), wrapped to be centered at 0.  Unitary:
/// sum |amp|^2 dk = sum |psi|^2 dx.
struct FourierResult {
  std::vector<double> k;
  std::vector<complexd> amp;
};
FourierResult scaled_fourier(const std::vector<double>& x,
                             const std::vector<complexd>& psi, double hbar);

// ---------------------------------------------------------------------------
// Cutoff
// ---------------------------------------------------------------------------

/// C-infinity profile F: identically 1 on [0, 1], identically 0 on [2, inf),
/// monotone in between (built from exp(-1/s) smooth steps).
double cutoff_profile(double u);

/// F(|x - center| / delta^{1 - delta_prime}).
double cutoff(double x, double center, double delta, double delta_prime);

// ---------------------------------------------------------------------------
// Transported adiabatic phase
// ---------------------------------------------------------------------------

/// The phase lambda(omega, t) = Int_0^t eta(t') kappa(omega + a(t')) dt'
/// accumulated along the mean flow by a family of observers at Lagrangian
/// offsets omega, where i * kappa(x) = <Phi(x)| d/dx Phi(x)> is the (purely
/// imaginary) adiabatic connection of the transported eigenvector field.
/// The integration constant is fixed by lambda(., 0) = 0.
class AdiabaticPhaseField {
 public:
  AdiabaticPhaseField() = default;

  double value(double omega, double t) const;  // bilinear interpolation
  const std::vector<double>& omega_grid() const;
  const std::vector<double>& t_grid() const;

 private:
  friend AdiabaticPhaseField adiabatic_phase(
      const classical::Trajectory&, const std::function<complexd(double)>&,
      double, double, int, const std::vector<double>&);
  std::vector<double> omega_, t_;
  std::vector<std::vector<double>> lambda_;  // [it][iomega]
};

/// Builds the field from the trajectory and the raw connection
/// connection(x) = <Phi(x)| d/dx Phi(x)>; throws NormalizationBug if the
/// connection has a real part above 1e-8 (it must be anti-Hermitian, i.e.
/// purely imaginary, for a normalized eigenvector field).
AdiabaticPhaseField adiabatic_phase(const classical::Trajectory& traj,
                                    const std::function<complexd(double)>& connection,
                                    double t_from, double t_to, int n_t,
                                    const std::vector<double>& omega_grid);

// ---------------------------------------------------------------------------
// Assembled two-component states
// ---------------------------------------------------------------------------

/// A two-component wave function over an x-grid, the components being the
/// coefficients along the local mode-space basis (psi1, psi2).
struct TwoComponentField {
  std::vector<double> x;
  std::vector<complexd> c1, c2;

  double norm() const;  ///< L2 norm (uniform-grid trapezoid = Riemann sum)
};

/// Born-Oppenheimer one-branch state
///   psi(x) = F(|x - a| / delta^{1-delta_prime})
///            * phi_j(A, B, delta^2, a, eta; x) * e^{i S / delta^2}
///            * e^{i lambda(x)} * Phi(x),
/// with packet.hbar == delta^2 enforced.  Phi returns the branch eigenvector
/// components at x, lambda the transported phase at x (pass 0 for gauges
/// with vanishing connection).
TwoComponentField assemble_bo_state(
    const HagedornPacket& packet, double S, double delta, double delta_prime,
    const std::function<std::array<complexd, 2>(double)>& Phi,
    const std::function<double(double)>& lambda_phase,
    const std::vector<double>& x_grid);

/// Inner state in stretched variables y = (x - a)/delta:
///   psi(x) = F(|y| delta^{delta_prime})
///            * exp(i S / delta^2 + i eta y / delta) * (f0(y), g0(y)),
/// where (a, eta, S) is the mean-flow data at time t; throws RegimeViolation
/// when |t| exceeds the inner boundary delta^{1-xi}.
TwoComponentField assemble_inner_state(
    const std::function<complexd(double)>& f0,
    const std::function<complexd(double)>& g0, double a_mean, double eta_mean,
    double S_mean, double t, double delta, const RegimeExponents& exps,
    const std::vector<double>& x_grid);

}  // namespace lztube::packets
