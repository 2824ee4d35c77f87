// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT

#include "lztube/special.hpp"

#include <cmath>
#include <limits>

#include "lztube/errors.hpp"

namespace lztube::special {

namespace {

// ---------------------------------------------------------------------------
// Double-double arithmetic (Dekker/Knuth error-free transforms).  Only the
// handful of operations the cylinder-function series needs.
// ---------------------------------------------------------------------------

struct DD {
  double h = 0, l = 0;
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

inline DD quick_two_sum(double a, double b) {  // requires |a| >= |b|
  const double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline DD dd_add(DD a, DD b) {
  DD s = two_sum(a.h, b.h);
  const DD t = two_sum(a.l, b.l);
  s.l += t.h;
  DD r = quick_two_sum(s.h, s.l);
  r.l += t.l;
  return quick_two_sum(r.h, r.l);
}

inline DD dd_mul(DD a, DD b) {
  DD p = two_prod(a.h, b.h);
  p.l += a.h * b.l + a.l * b.h;
  return quick_two_sum(p.h, p.l);
}

inline DD dd_neg(DD a) { return {-a.h, -a.l}; }

inline DD dd_half(DD a) { return {0.5 * a.h, 0.5 * a.l}; }

inline DD dd_div_d(DD a, double b) {
  const double q1 = a.h / b;
  const DD p = two_prod(q1, b);
  const double q2 = ((a.h - p.h) - p.l + a.l) / b;
  return quick_two_sum(q1, q2);
}

inline DD dd_from(double x) { return {x, 0.0}; }

struct CDD {
  DD re, im;
};

inline CDD cdd_from(complexd z) { return {dd_from(z.real()), dd_from(z.imag())}; }

inline CDD cdd_add(CDD a, CDD b) { return {dd_add(a.re, b.re), dd_add(a.im, b.im)}; }

inline CDD cdd_mul(CDD a, CDD b) {
  return {dd_add(dd_mul(a.re, b.re), dd_neg(dd_mul(a.im, b.im))),
          dd_add(dd_mul(a.re, b.im), dd_mul(a.im, b.re))};
}

inline CDD cdd_div_d(CDD a, double b) { return {dd_div_d(a.re, b), dd_div_d(a.im, b)}; }

inline complexd cdd_round(CDD a) { return {a.re.h + a.re.l, a.im.h + a.im.l}; }

inline double cdd_abs(CDD a) { return std::hypot(a.re.h, a.im.h); }

// ---------------------------------------------------------------------------
// Gamma
// ---------------------------------------------------------------------------

// Lanczos approximation, g = 7, 9 coefficients.
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

complexd gamma_positive_half(complexd z) {
  // Valid for Re(z) >= 0.5.
  complexd a = kLanczos[0];
  for (int k = 1; k < 9; ++k) a += kLanczos[k] / (z - 1.0 + static_cast<double>(k));
  const complexd t = z + 6.5;
  return std::sqrt(2 * M_PI) * std::pow(t, z - 0.5) * std::exp(-t) * a;
}

bool is_nonpositive_integer(complexd z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real());
}

}  // namespace

complexd gamma_complex(complexd z) {
  if (is_nonpositive_integer(z))
    return {std::numeric_limits<double>::infinity(), 0.0};
  if (z.real() >= 0.5) return gamma_positive_half(z);
  // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
  return M_PI / (std::sin(M_PI * z) * gamma_positive_half(1.0 - z));
}

complexd recip_gamma(complexd z) {
  if (is_nonpositive_integer(z)) return {0.0, 0.0};
  if (z.real() >= 0.5) return 1.0 / gamma_positive_half(z);
  return std::sin(M_PI * z) * gamma_positive_half(1.0 - z) / M_PI;
}

complexd log_gamma(complexd z) {
  if (!(z.real() > 0))
    throw InvalidParameters("log_gamma: Re z > 0 required");
  // Shift into the Stirling regime, then subtract the shifted factors; for
  // Re z > 0 every factor stays in the right half plane, so principal logs
  // compose without winding.
  complexd shift = 0.0;
  complexd w = z;
  while (w.real() < 16.0) {
    shift += std::log(w);
    w += 1.0;
  }
  // Stirling series with Bernoulli numbers B2..B14.
  static constexpr double kB[7] = {1.0 / 6,   -1.0 / 30,   1.0 / 42, -1.0 / 30,
                                   5.0 / 66,  -691.0 / 2730, 7.0 / 6};
  const complexd w2 = w * w;
  complexd series = 0.0;
  complexd wp = w;
  for (int j = 0; j < 7; ++j) {
    const double denom = (2.0 * j + 2) * (2.0 * j + 1);
    series += kB[j] / (denom * wp);
    wp *= w2;
  }
  const complexd lg =
      (w - 0.5) * std::log(w) - w + 0.5 * std::log(2 * M_PI) + series;
  return lg - shift;
}

double abs_gamma_one_plus_iy_sq(double y) {
  const double py = M_PI * y;
  if (std::abs(py) < 1e-4) {
    const double p2 = py * py;
    return 1.0 - p2 / 6.0 + 7.0 * p2 * p2 / 360.0;
  }
  return py / std::sinh(py);
}

// ---------------------------------------------------------------------------
// Parabolic cylinder D_nu
// ---------------------------------------------------------------------------

namespace {

/// Kummer series M(a, b, w) summed in double-double.  The terms grow to
/// ~e^{|w|} before decaying; double-double absorbs the cancellation down to
/// ~1e-32 * max-term.  The per-step factor must also be formed in
/// double-double: rounding (a + k) or (b + k)(k + 1) to double injects
/// ~1e-16 relative noise into terms of size e^{|w|}, which dominates the
/// result whenever a is not exactly representable.
complexd kummer_dd(CDD a, double b, CDD w) {
  CDD term = cdd_from(complexd(1.0, 0.0));
  CDD sum = term;
  for (int k = 0; k < 700; ++k) {
    // term *= (a + k) * w / ((b + k)(k + 1)); both divisors are exact
    // doubles (b is a half-integer), so divide by them separately.
    const double kd = static_cast<double>(k);
    const CDD a_plus_k{dd_add(a.re, dd_from(kd)), a.im};
    term = cdd_mul(term, a_plus_k);
    term = cdd_mul(term, w);
    term = cdd_div_d(term, b + kd);
    term = cdd_div_d(term, kd + 1.0);
    sum = cdd_add(sum, term);
    if (cdd_abs(term) < 1e-40 * std::max(1.0, cdd_abs(sum))) return cdd_round(sum);
  }
  throw SeriesDivergence("kummer_dd: series did not converge");
}

/// Poincare asymptotic sum S(c0) = sum_k t_k with
/// t_{k+1}/t_k = sign * (c0 + 2k)(c0 + 2k + 1) / (2 (k+1) z^2),
/// truncated at the smallest term.
complexd asymptotic_sum(complexd c0, complexd z, double sign) {
  const complexd z2 = z * z;
  complexd term = 1.0, sum = 1.0;
  double prev = 1.0;
  for (int k = 0; k < 60; ++k) {
    term *= sign * (c0 + 2.0 * k) * (c0 + 2.0 * k + 1.0) /
            (2.0 * (k + 1.0) * z2);
    const double mag = std::abs(term);
    if (mag >= prev) break;  // optimal truncation
    sum += term;
    prev = mag;
    if (mag < 1e-18) break;
  }
  return sum;
}

complexd pcf_d_series(complexd nu, complexd z) {
  // D_nu = 2^{nu/2} sqrt(pi) e^{-z^2/4} [ M(-nu/2, 1/2, z^2/2) / Gamma((1-nu)/2)
  //        - sqrt(2) z M((1-nu)/2, 3/2, z^2/2) / Gamma(-nu/2) ].
  //
  // The series arguments are assembled in double-double: w = z^2/2 from
  // error-free products, and the a-parameters from error-free sums (halving
  // is exact; 1 - nu is not).
  const CDD w{dd_half(dd_add(two_prod(z.real(), z.real()),
                             dd_neg(two_prod(z.imag(), z.imag())))),
              two_prod(z.real(), z.imag())};
  const CDD a1{dd_half(dd_from(-nu.real())), dd_half(dd_from(-nu.imag()))};
  const CDD a2{dd_half(two_sum(1.0, -nu.real())), a1.im};
  const complexd s1 = kummer_dd(a1, 0.5, w);
  const complexd s2 = kummer_dd(a2, 1.5, w);
  const complexd g1 = recip_gamma(0.5 * (1.0 - nu));
  const complexd g2 = recip_gamma(-0.5 * nu);
  const complexd pre =
      std::exp(0.5 * nu * std::log(complexd(2.0, 0.0))) * std::sqrt(M_PI) *
      std::exp(-0.25 * z * z);
  return pre * (s1 * g1 - std::sqrt(2.0) * z * s2 * g2);
}

complexd pcf_d_asymptotic(complexd nu, complexd z) {
  // Recessive branch e^{-z^2/4} z^nu S1; past the Stokes lines
  // |arg z| = pi/2 the dominant branch joins with coefficient
  // -sqrt(2 pi)/Gamma(-nu) e^{sign(arg z) i pi nu}.
  const complexd logz = std::log(z);
  const complexd s1 = asymptotic_sum(-nu, z, -1.0);
  complexd result = std::exp(-0.25 * z * z + nu * logz) * s1;
  const double argz = std::arg(z);
  if (std::abs(argz) >= M_PI / 2) {
    const complexd s2 = asymptotic_sum(nu + 1.0, z, +1.0);
    const double sgn = (argz >= 0) ? 1.0 : -1.0;
    const complexd phase = std::exp(sgn * complexd(0, M_PI) * nu);
    result -= std::sqrt(2 * M_PI) * recip_gamma(-nu) * phase *
              std::exp(0.25 * z * z - (nu + 1.0) * logz) * s2;
  }
  return result;
}

bool use_asymptotic(complexd z) {
  const double r = std::abs(z);
  if (r >= 8.0) return true;
  if (r < 6.0) return false;
  // Near the real axis the recessive direction loses series accuracy first;
  // switch earlier there (see header notes).
  const double a = std::abs(std::arg(z));
  return a <= M_PI / 8 || a >= 7 * M_PI / 8;
}

}  // namespace

complexd pcf_d(complexd nu, complexd z, double z_max) {
  if (std::abs(z) > z_max)
    throw SeriesDivergence("pcf_d: |z| beyond the validated range; raise z_max");
  if (use_asymptotic(z)) return pcf_d_asymptotic(nu, z);
  return pcf_d_series(nu, z);
}

complexd pcf_d_dz(complexd nu, complexd z, double z_max) {
  return nu * pcf_d(nu - 1.0, z, z_max) - 0.5 * z * pcf_d(nu, z, z_max);
}

}  // namespace lztube::special
