// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT

#include "lztube/landauzener.hpp"

#include <cmath>
#include <utility>

#include "lztube/errors.hpp"
#include "lztube/packets.hpp"
#include "lztube/special.hpp"

namespace lztube::landauzener {

namespace {

constexpr double kPi = 3.14159265358979323846;
const complexd kI(0.0, 1.0);

}  // namespace

void LZParameters::validate() const {
  if (!(r > 0.0) || !(eta0 > 0.0) || !(delta > 0.0))
    throw InvalidParameters("LZParameters: need r > 0, eta0 > 0, delta > 0 "
                            "(r=" + std::to_string(r) +
                            ", eta0=" + std::to_string(eta0) +
                            ", delta=" + std::to_string(delta) + ")");
}

double transition_probability(double r, double eta0) {
  if (!(r > 0.0) || !(eta0 > 0.0))
    throw InvalidParameters("transition_probability: need r > 0, eta0 > 0");
  return std::exp(-kPi * r / eta0);
}

BasisValue inner_basis(const LZParameters& p, int index, double s) {
  p.validate();
  const double c = p.c();
  const double sc = std::sqrt(c);
  const double u = p.eta0 * s + p.y;
  const complexd nu = p.nu();

  // Both branches evaluate on the diagonal rays arg w = +-pi/4, +-3pi/4
  // where the cylinder-function code is accurate at every radius; lift the
  // default trust-region cap accordingly.
  BasisValue out;
  if (index == 1) {
    const complexd w = complexd(-1.0, 1.0) * sc * u;
    const double zmax = std::max(50.0, std::abs(w) + 1.0);
    out.f = complexd(0.5, -0.5) * sc * special::pcf_d(nu - 1.0, w, zmax);
    out.g = special::pcf_d(nu, w, zmax);
    const complexd dfdu = kI * c * special::pcf_d_dz(nu - 1.0, w, zmax);
    const complexd dgdu =
        complexd(-1.0, 1.0) * sc * special::pcf_d_dz(nu, w, zmax);
    out.df = p.eta0 * dfdu;
    out.dg = p.eta0 * dgdu;
  } else if (index == 2) {
    const complexd w = complexd(-1.0, -1.0) * sc * u;
    const double zmax = std::max(50.0, std::abs(w) + 1.0);
    out.f = special::pcf_d(-nu, w, zmax);
    out.g = -complexd(0.5, 0.5) * sc * special::pcf_d(-nu - 1.0, w, zmax);
    const complexd dfdu =
        -complexd(1.0, 1.0) * sc * special::pcf_d_dz(-nu, w, zmax);
    const complexd dgdu = kI * c * special::pcf_d_dz(-nu - 1.0, w, zmax);
    out.df = p.eta0 * dfdu;
    out.dg = p.eta0 * dgdu;
  } else {
    throw InvalidParameters("inner_basis: index must be 1 or 2, got " +
                            std::to_string(index));
  }
  return out;
}

InnerSolution inner_solution(const LZParameters& p, complexd C1, complexd C2,
                             const std::vector<double>& s_grid) {
  InnerSolution sol;
  sol.s = s_grid;
  sol.f.reserve(s_grid.size());
  sol.g.reserve(s_grid.size());
  for (double s : s_grid) {
    const BasisValue b1 = inner_basis(p, 1, s);
    const BasisValue b2 = inner_basis(p, 2, s);
    sol.f.push_back(C1 * b1.f + C2 * b2.f);
    sol.g.push_back(C1 * b1.g + C2 * b2.g);
  }
  return sol;
}

std::pair<complexd, complexd> match_at(const LZParameters& p, double s,
                                       complexd f, complexd g) {
  const BasisValue b1 = inner_basis(p, 1, s);
  const BasisValue b2 = inner_basis(p, 2, s);
  const complexd det = b1.f * b2.g - b2.f * b1.g;
  if (!(std::abs(det) > 1e-250))
    throw SeriesDivergence(
        "match_at: fundamental system numerically degenerate at s=" +
        std::to_string(s));
  const complexd C1 = (f * b2.g - b2.f * g) / det;
  const complexd C2 = (b1.f * g - f * b1.g) / det;
  return {C1, C2};
}

MatchingCoefficients matching_coefficients(Level incoming, int j, complexd A0,
                                           complexd B0, const LZParameters& p,
                                           double S0) {
  p.validate();
  if (j < 0) throw InvalidParameters("matching_coefficients: need j >= 0");

  const double r = p.r;
  const double eta0 = p.eta0;
  const double delta = p.delta;

  if (incoming == Level::B) {
    packets::HagedornPacket env;
    env.j = j;
    env.A = A0;
    env.B = B0 - kI * r * A0 / eta0;  // Re(conj(A) B) is unchanged
    env.hbar = 1.0;
    env.a = 0.0;
    env.eta = 0.0;
    env.validate();

    const double amp = std::pow(delta, -0.5) * std::exp(-kPi * r / (8.0 * eta0));
    const double const_phase =
        S0 / (delta * delta) +
        (r / (4.0 * eta0)) * (1.0 + 3.0 * std::log(2.0 * eta0) + std::log(r) -
                              4.0 * std::log(delta));
    const complexd pref = -amp * std::exp(kI * const_phase);

    MatchingCoefficients mc;
    mc.C1 = [](double) { return complexd(0.0, 0.0); };
    mc.C2 = [env, pref, r, eta0](double y) {
      const complexd quad =
          std::exp(kI * r * (y * y - 2.0 * y) / (2.0 * eta0));
      return pref * quad * packets::hagedorn_point(env, y);
    };
    return mc;
  }

  if (incoming == Level::A) {
    // sigma_2 M(u) sigma_2 = -M(u), so v -> sigma_2 conj(v) maps solutions to
    // solutions and exchanges the incoming levels.  Applied to the
    // lower-level-incoming solution built from the conjugated packet data
    // (conj A0, conj B0, -S0) it yields the upper-level-incoming solution for
    // (A0, B0, S0) -- including the level-A sign of the envelope correction,
    // since conj(B0) - i r conj(A0)/eta0 conjugates back to B0 + i r A0/eta0.
    // Its coefficients follow by resolving the transformed solution at s = 0.
    const MatchingCoefficients mirror = matching_coefficients(
        Level::B, j, std::conj(A0), std::conj(B0), p, -S0);
    const LZParameters base = p;

    auto resolve = [base, mirror](double y) {
      LZParameters q = base;
      q.y = y;
      const BasisValue b2 = inner_basis(q, 2, 0.0);
      const complexd c2 = mirror.C2(y);
      const complexd w_f = -kI * std::conj(c2 * b2.g);
      const complexd w_g = kI * std::conj(c2 * b2.f);
      return match_at(q, 0.0, w_f, w_g);
    };

    MatchingCoefficients mc;
    mc.C1 = [resolve](double y) { return resolve(y).first; };
    mc.C2 = [resolve](double y) { return resolve(y).second; };
    return mc;
  }

  throw InvalidLevel("matching_coefficients: unknown incoming level tag");
}

TransitionResult transition_matrix(const LZParameters& p, double S0_A) {
  p.validate();
  const double r = p.r;
  const double eta0 = p.eta0;
  const double delta = p.delta;

  TransitionResult out;
  out.phase = kPi / 4.0 + S0_A / (delta * delta) +
              (r / (2.0 * eta0)) * (1.0 + 3.0 * std::log(2.0 * eta0) +
                                    std::log(r) - 4.0 * std::log(delta));
  out.amplitude_A = -std::exp(-kPi * r / (2.0 * eta0));
  out.amplitude_B = std::exp(-kPi * r / (4.0 * eta0)) *
                    std::sqrt(kPi * r / eta0) * std::exp(kI * out.phase) /
                    special::gamma_complex(1.0 + kI * r / (2.0 * eta0));
  out.population_A = std::exp(-kPi * r / eta0);
  out.population_B = 1.0 - out.population_A;
  return out;
}

}  // namespace lztube::landauzener
