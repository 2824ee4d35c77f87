// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT
//
// Special functions for the parabolic-cylinder connection problem: the
// complex gamma function (Lanczos), its exact-at-poles reciprocal, and the
// Weber parabolic cylinder function D_nu(z) for complex order and argument.
// D_nu is evaluated by the Maclaurin/Kummer representation for small |z|
// (summed in double-double arithmetic because the two confluent series
// cancel to ~|e^{z^2/4}| near the anti-Stokes rays) and by the standard
// compound asymptotic expansion, with recessive + dominant branch past the
// Stokes lines arg z = +/- pi/2, for large |z|.

#pragma once

#include <complex>

namespace lztube::special {

using complexd = std::complex<double>;

/// Gamma(z) on the complex plane (Lanczos g=7, n=9 plus reflection);
/// relative accuracy ~1e-12 for |Im z| <= 10.  Returns inf at the poles.
complexd gamma_complex(complexd z);

/// 1/Gamma(z), entire; returns exactly 0 at z = 0, -1, -2, ...
complexd recip_gamma(complexd z);

/// log Gamma(z) with the standard principal branch (continuous on the cut
/// plane C minus (-inf, 0]); Re z > 0 required here.
complexd log_gamma(complexd z);

/// |Gamma(1 + i y)|^2 = pi y / sinh(pi y), exact limit 1 at y = 0.
double abs_gamma_one_plus_iy_sq(double y);

/// Weber parabolic cylinder function D_nu(z), solution of
///   w'' + (nu + 1/2 - z^2/4) w = 0
/// with D_nu(z) ~ z^nu e^{-z^2/4} as z -> +inf.  Series for small |z|,
/// compound asymptotics beyond; z_max guards the asymptotic regime actually
/// validated (throws SeriesDivergence for |z| > z_max).
///
/// Accuracy domain: full relative precision on and near the diagonal rays
/// arg z = +/-pi/4, +/-3pi/4 (where z^2 is imaginary, the operating regime
/// of the inner transition problem) at any |z|, and everywhere for
/// |z| <~ 4.  Near the real axis with 4 < |z| < 6 and non-integer nu the
/// recessive solution loses accuracy to ~1e-6 relative: the double-precision
/// gamma prefactors are amplified by the e^{|z|^2/2} cancellation of the two
/// Kummer series (the series themselves are summed in double-double and do
/// not contribute).  The asymptotic branch takes over at |z| >= 6 near the
/// axes and |z| >= 8 elsewhere.
complexd pcf_d(complexd nu, complexd z, double z_max = 50.0);

/// d/dz D_nu(z) = nu D_{nu-1}(z) - (z/2) D_nu(z).
complexd pcf_d_dz(complexd nu, complexd z, double z_max = 50.0);

}  // namespace lztube::special
