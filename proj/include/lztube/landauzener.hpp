// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT
//
// The inner (crossing-region) problem: in stretched variables y = (x-a)/delta,
// s = t/delta the two-level envelope satisfies the linear-sweep system
//
//   i d/ds (f0, g0) = r [ eta0 s + y     1          ] (f0, g0),
//                       [ 1             -(eta0 s + y) ]
//
// whose solutions are parabolic cylinder functions of imaginary order.  This
// module provides the two fundamental solutions, the matching of incoming
// semiclassical data onto them, and the closed-form scattering data (branch
// amplitudes, transition probabilities, and the delta-dependent phase) of the
// outgoing state.

#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "lztube/angular.hpp"

namespace lztube::landauzener {

using complexd = std::complex<double>;
using angular::Level;

/// Normal-form parameters of one transition event.  All quantities are in
/// the rescaled frame: r is the rate, eta0 the incoming momentum at the
/// crossing, delta the semiclassical parameter, y the transverse inner
/// coordinate the solution is evaluated at.
struct LZParameters {
  double r = 1.0;
  double eta0 = 1.0;
  double delta = 0.05;
  double y = 0.0;

  /// Order parameter of the cylinder functions, nu = i r / (2 eta0).
  complexd nu() const { return complexd(0.0, 0.5 * r / eta0); }
  /// c = r / eta0 (argument scale).
  double c() const { return r / eta0; }

  /// Throws InvalidParameters unless r > 0, eta0 > 0, delta > 0.
  void validate() const;
};

/// Landau-Zener transition probabilities for the exponent pi r / eta0.
double transition_probability(double r, double eta0);  // exp(-pi r / eta0)

/// One evaluation of a fundamental solution column (f0, g0) and its exact
/// s-derivative.
struct BasisValue {
  complexd f, g;
  complexd df, dg;
};

/// Fundamental solutions of the inner system at inner time s.  Both are
/// incoming-pure as u = eta0 s + y -> -infinity, where e_1 is the lower and
/// e_2 the upper adiabatic direction: solution 1 is the upper-level-incoming
/// one (asymptotically proportional to e_2), solution 2 the
/// lower-level-incoming one (asymptotically proportional to e_1), both with
/// incoming modulus exp(pi r / (8 eta0)).  index = 1 or 2.
BasisValue inner_basis(const LZParameters& p, int index, double s);

/// General solution C1 * basis1 + C2 * basis2 sampled on s_grid.
struct InnerSolution {
  std::vector<double> s;
  std::vector<complexd> f, g;
};
InnerSolution inner_solution(const LZParameters& p, complexd C1, complexd C2,
                             const std::vector<double>& s_grid);

/// Inverts [basis1(s) basis2(s)] C = (f, g) for the coefficients; the
/// representation is then exact for all s.
std::pair<complexd, complexd> match_at(const LZParameters& p, double s,
                                       complexd f, complexd g);

/// Coefficient fields y -> (C1, C2) matching an incoming Hagedorn envelope
/// phi_j(A0, B0, hbar=1, a=0, eta=0, y) carried on the given level with
/// action phase S0 (entering as exp(i S0 / delta^2)).
///
/// For an incoming lower-level (B) state the coefficients are closed-form:
/// C1 = 0 and
///   C2(y) = -delta^{-1/2} phi_j(A0, B0 - i r A0 / eta0, 1, 0, 0, y)
///           * exp(-pi r / (8 eta0))
///           * exp(i r (y^2 - 2 y) / (2 eta0))
///           * exp(i S0 / delta^2
///                 + i (r / (4 eta0)) (1 + 3 log(2 eta0) + log r
///                                     - 4 log delta)).
///
/// For an incoming upper-level (A) state the coefficients are obtained from
/// the lower-level ones through the symmetry of the inner system under
/// component swap combined with complex conjugation (v -> sigma_2 conj(v),
/// which maps lower-incoming solutions of the conjugated data onto
/// upper-incoming ones), followed by a basis resolution with match_at.
struct MatchingCoefficients {
  std::function<complexd(double y)> C1, C2;
};
MatchingCoefficients matching_coefficients(Level incoming, int j, complexd A0,
                                           complexd B0, const LZParameters& p,
                                           double S0 = 0.0);

/// Closed-form outgoing data of the transition for a lower-level (B)
/// incoming state of unit amplitude: the outgoing state is
///   amplitude_A * psi^{A+} + amplitude_B * psi^{B+}
/// with
///   amplitude_A = -exp(-pi r / (2 eta0)),
///   amplitude_B = exp(-pi r / (4 eta0)) sqrt(pi r / eta0)
///                 * e^{i phase} / Gamma(1 + i r/(2 eta0)),
/// and phase = pi/4 + S0_A / delta^2
///             + (r/(2 eta0)) (1 + 3 log(2 eta0) + log r - 4 log delta).
/// The populations |amplitude|^2 sum to 1 exactly
/// (|Gamma(1+iy)|^2 = pi y / sinh(pi y)).
struct TransitionResult {
  complexd amplitude_A;
  complexd amplitude_B;
  double phase;
  double population_A;  ///< exp(-pi r / eta0)
  double population_B;  ///< 1 - population_A
};
TransitionResult transition_matrix(const LZParameters& p, double S0_A = 0.0);

}  // namespace lztube::landauzener
