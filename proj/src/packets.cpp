// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT

#include "lztube/packets.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lztube/errors.hpp"

namespace lztube::packets {

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform_spacing(const std::vector<double>& x, const char* who) {
  if (x.size() < 2)
    throw InvalidParameters(std::string(who) + ": need at least two grid points");
  const double dx = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  if (!(dx > 0))
    throw InvalidParameters(std::string(who) + ": grid not increasing");
  for (std::size_t m = 1; m < x.size(); ++m)
    if (std::abs(x[m] - x[m - 1] - dx) > 1e-9 * dx)
      throw InvalidParameters(std::string(who) + ": grid not uniform");
  return dx;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hagedorn packets
// ---------------------------------------------------------------------------

void HagedornPacket::validate() const {
  if (!(hbar > 0)) throw InvalidParameters("HagedornPacket: hbar <= 0");
  if (j < 0) throw InvalidParameters("HagedornPacket: j < 0");
  const double inv = (std::conj(A) * B).real();
  if (std::abs(inv - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "HagedornPacket: Re(conj(A) B) = " << inv << " != 1";
    throw InvalidParameters(msg.str());
  }
}

double HagedornPacket::position_uncertainty() const {
  return std::sqrt((j + 0.5) * hbar) * std::abs(A);
}

double HagedornPacket::momentum_uncertainty() const {
  return std::sqrt((j + 0.5) * hbar) * std::abs(B);
}

complexd continue_sqrt(complexd prev_sqrt, complexd new_A) {
  const complexd s = std::sqrt(new_A);
  if (prev_sqrt == complexd(0, 0)) return s;
  return (std::abs(s - prev_sqrt) <= std::abs(-s - prev_sqrt)) ? s : -s;
}

complexd hagedorn_point(const HagedornPacket& p, double x) {
  p.validate();
  const complexd sqrtA =
      (p.sqrtA == complexd(0, 0)) ? std::sqrt(p.A) : p.sqrtA;
  const double dxc = x - p.a;
  const complexd exponent =
      -0.5 * (p.B / p.A) * dxc * dxc / p.hbar +
      complexd(0, 1) * p.eta * dxc / p.hbar;
  const complexd phi0 =
      std::pow(kPi * p.hbar, -0.25) / sqrtA * std::exp(exponent);
  if (p.j == 0) return phi0;

  const double xi = dxc / std::sqrt(p.hbar);
  complexd Pm1(0, 0), P(1, 0);
  for (int m = 0; m < p.j; ++m) {
    const complexd Pp1 =
        (std::sqrt(2.0) / p.A * xi * P -
         std::conj(p.A) / p.A * std::sqrt(static_cast<double>(m)) * Pm1) /
        std::sqrt(static_cast<double>(m) + 1.0);
    Pm1 = P;
    P = Pp1;
  }
  return P * phi0;
}

std::vector<complexd> hagedorn_eval(const HagedornPacket& p,
                                    const std::vector<double>& x) {
  std::vector<complexd> out(x.size());
  for (std::size_t m = 0; m < x.size(); ++m) out[m] = hagedorn_point(p, x[m]);
  return out;
}

std::vector<double> packet_grid(const HagedornPacket& p, int min_points) {
  p.validate();
  const double sx = p.position_uncertainty();
  const double sp = p.momentum_uncertainty();
  const double half_width = 8.0 * sx;
  // Resolve oscillations up to |eta| + 8 momentum-uncertainties with at
  // least ~8 points per wavelength (Nyquist x4).
  const double k_max = std::abs(p.eta) + 8.0 * sp;
  const double dx_req = kPi * p.hbar / (4.0 * std::max(k_max, 1e-300));
  int n = min_points;
  if (dx_req > 0 && 2.0 * half_width / dx_req > n)
    n = static_cast<int>(std::ceil(2.0 * half_width / dx_req)) + 1;
  std::vector<double> x(n);
  for (int m = 0; m < n; ++m)
    x[m] = p.a - half_width +
           2.0 * half_width * static_cast<double>(m) / (n - 1);
  return x;
}

// ---------------------------------------------------------------------------
// Scaled Fourier transform
// ---------------------------------------------------------------------------

FourierResult scaled_fourier(const std::vector<double>& x,
                             const std::vector<complexd>& psi, double hbar) {
  if (x.size() != psi.size())
    throw InvalidParameters("scaled_fourier: grid/value size mismatch");
  if (!(hbar > 0)) throw InvalidParameters("scaled_fourier: hbar <= 0");
  const double dx = uniform_spacing(x, "scaled_fourier");
  const int n = static_cast<int>(x.size());

  std::vector<complexd> work(psi);
  fftw_plan plan = fftw_plan_dft_1d(
      n, reinterpret_cast<fftw_complex*>(work.data()),
      reinterpret_cast<fftw_complex*>(work.data()), FFTW_FORWARD,
      FFTW_ESTIMATE);
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  // k_j = 2 pi hbar j / (N dx) for j in [-N/2, N/2), sorted ascending;
  // amp_j = (2 pi hbar)^{-1/2} dx e^{-i k_j x_0 / hbar} FFT_j.
  const double dk = 2.0 * kPi * hbar / (n * dx);
  const double pref = dx / std::sqrt(2.0 * kPi * hbar);
  FourierResult out;
  out.k.resize(n);
  out.amp.resize(n);
  const int half = n / 2;
  for (int idx = 0; idx < n; ++idx) {
    const int j_signed = idx - half;              // ascending frequency
    const int j_dft = (j_signed + n) % n;         // DFT bin
    const double k = dk * j_signed;
    out.k[idx] = k;
    out.amp[idx] =
        pref * std::exp(complexd(0, -k * x.front() / hbar)) * work[j_dft];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cutoff
// ---------------------------------------------------------------------------

namespace {
double smooth_half(double s) {  // e^{-1/s} continued by 0
  return (s > 0) ? std::exp(-1.0 / s) : 0.0;
}
}  // namespace

double cutoff_profile(double u) {
  if (u <= 1.0) return 1.0;
  if (u >= 2.0) return 0.0;
  const double s = 2.0 - u;  // in (0, 1): rises 0 -> 1 as u drops 2 -> 1
  const double h1 = smooth_half(s), h2 = smooth_half(1.0 - s);
  return h1 / (h1 + h2);
}

double cutoff(double x, double center, double delta, double delta_prime) {
  if (!(delta > 0) || !(delta_prime > 0))
    throw InvalidParameters("cutoff: delta and delta_prime must be positive");
  const double radius = std::pow(delta, 1.0 - delta_prime);
  return cutoff_profile(std::abs(x - center) / radius);
}

// ---------------------------------------------------------------------------
// Transported adiabatic phase
// ---------------------------------------------------------------------------

double AdiabaticPhaseField::value(double omega, double t) const {
  if (omega_.size() < 2 || t_.size() < 2)
    throw InvalidParameters("AdiabaticPhaseField: empty field");
  if (omega < omega_.front() || omega > omega_.back() || t < t_.front() ||
      t > t_.back()) {
    std::ostringstream msg;
    msg << "AdiabaticPhaseField: (omega=" << omega << ", t=" << t
        << ") outside [" << omega_.front() << ", " << omega_.back() << "] x ["
        << t_.front() << ", " << t_.back() << "]";
    throw DomainExit(msg.str());
  }
  const auto cell = [](const std::vector<double>& g, double v) {
    const auto it = std::upper_bound(g.begin(), g.end(), v);
    const std::size_t k = static_cast<std::size_t>(it - g.begin());
    return std::min(std::max<std::size_t>(k, 1) - 1, g.size() - 2);
  };
  const std::size_t io = cell(omega_, omega), it = cell(t_, t);
  const double uo = (omega - omega_[io]) / (omega_[io + 1] - omega_[io]);
  const double ut = (t - t_[it]) / (t_[it + 1] - t_[it]);
  return (1 - ut) * ((1 - uo) * lambda_[it][io] + uo * lambda_[it][io + 1]) +
         ut * ((1 - uo) * lambda_[it + 1][io] + uo * lambda_[it + 1][io + 1]);
}

const std::vector<double>& AdiabaticPhaseField::omega_grid() const {
  return omega_;
}
const std::vector<double>& AdiabaticPhaseField::t_grid() const { return t_; }

AdiabaticPhaseField adiabatic_phase(
    const classical::Trajectory& traj,
    const std::function<complexd(double)>& connection, double t_from,
    double t_to, int n_t, const std::vector<double>& omega_grid) {
  if (!(t_from < t_to) || n_t < 2)
    throw InvalidParameters("adiabatic_phase: bad time grid");
  if (t_from > 0.0 || t_to < 0.0)
    throw InvalidParameters(
        "adiabatic_phase: the anchor t = 0 must lie inside [t_from, t_to]");
  if (omega_grid.size() < 2)
    throw InvalidParameters("adiabatic_phase: need at least two offsets");

  // kappa(x) from the anti-Hermitian connection i kappa(x).
  const auto kappa = [&connection](double x) {
    const complexd c = connection(x);
    if (std::abs(c.real()) > 1e-8) {
      std::ostringstream msg;
      msg << "adiabatic_phase: connection has real part " << c.real()
          << " at x=" << x << " (eigenvector field not normalized?)";
      throw NormalizationBug(msg.str());
    }
    return c.imag();
  };

  AdiabaticPhaseField field;
  field.omega_ = omega_grid;
  field.t_.resize(n_t);
  for (int k = 0; k < n_t; ++k)
    field.t_[k] = t_from + (t_to - t_from) * static_cast<double>(k) / (n_t - 1);
  // Make sure t = 0 is a grid point so lambda(., 0) = 0 holds exactly: shift
  // the nearest node onto 0.
  int k0 = 0;
  for (int k = 1; k < n_t; ++k)
    if (std::abs(field.t_[k]) < std::abs(field.t_[k0])) k0 = k;
  field.t_[k0] = 0.0;

  const std::size_t n_o = omega_grid.size();
  field.lambda_.assign(n_t, std::vector<double>(n_o, 0.0));

  // Integrand g(omega, t) = eta(t) kappa(omega + a(t)); accumulate with
  // composite Simpson over each grid interval (4 panels each), anchored at
  // the t = 0 node.
  const auto integrand = [&](double om, double t) {
    return traj.eta(t) * kappa(om + traj.a(t));
  };
  for (std::size_t io = 0; io < n_o; ++io) {
    const double om = omega_grid[io];
    // forward from the anchor
    for (int k = k0 + 1; k < n_t; ++k) {
      const double a = field.t_[k - 1], b = field.t_[k], h = (b - a) / 4.0;
      double s = integrand(om, a) + integrand(om, b);
      s += 4.0 * (integrand(om, a + h) + integrand(om, a + 3 * h));
      s += 2.0 * integrand(om, a + 2 * h);
      field.lambda_[k][io] = field.lambda_[k - 1][io] + s * h / 3.0;
    }
    // backward from the anchor
    for (int k = k0 - 1; k >= 0; --k) {
      const double a = field.t_[k], b = field.t_[k + 1], h = (b - a) / 4.0;
      double s = integrand(om, a) + integrand(om, b);
      s += 4.0 * (integrand(om, a + h) + integrand(om, a + 3 * h));
      s += 2.0 * integrand(om, a + 2 * h);
      field.lambda_[k][io] = field.lambda_[k + 1][io] - s * h / 3.0;
    }
  }
  return field;
}

// ---------------------------------------------------------------------------
// Assembled two-component states
// ---------------------------------------------------------------------------

double TwoComponentField::norm() const {
  if (x.size() < 2 || c1.size() != x.size() || c2.size() != x.size())
    throw InvalidParameters("TwoComponentField: inconsistent sizes");
  const double dx = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  double s = 0.0;
  for (std::size_t m = 0; m < x.size(); ++m)
    s += std::norm(c1[m]) + std::norm(c2[m]);
  return std::sqrt(s * dx);
}

TwoComponentField assemble_bo_state(
    const HagedornPacket& packet, double S, double delta, double delta_prime,
    const std::function<std::array<complexd, 2>(double)>& Phi,
    const std::function<double(double)>& lambda_phase,
    const std::vector<double>& x_grid) {
  packet.validate();
  if (!(delta > 0)) throw InvalidParameters("assemble_bo_state: delta <= 0");
  if (std::abs(packet.hbar - delta * delta) > 1e-12 * delta * delta)
    throw InvalidParameters(
        "assemble_bo_state: packet.hbar must equal delta^2");

  TwoComponentField out;
  out.x = x_grid;
  out.c1.resize(x_grid.size());
  out.c2.resize(x_grid.size());
  const complexd action = std::exp(complexd(0, S / (delta * delta)));
  for (std::size_t m = 0; m < x_grid.size(); ++m) {
    const double x = x_grid[m];
    const double F = cutoff(x, packet.a, delta, delta_prime);
    if (F == 0.0) {
      out.c1[m] = out.c2[m] = 0.0;
      continue;
    }
    const complexd w = F * hagedorn_point(packet, x) * action *
                       std::exp(complexd(0, lambda_phase(x)));
    const auto phi = Phi(x);
    out.c1[m] = w * phi[0];
    out.c2[m] = w * phi[1];
  }
  return out;
}

TwoComponentField assemble_inner_state(
    const std::function<complexd(double)>& f0,
    const std::function<complexd(double)>& g0, double a_mean, double eta_mean,
    double S_mean, double t, double delta, const RegimeExponents& exps,
    const std::vector<double>& x_grid) {
  if (!(delta > 0)) throw InvalidParameters("assemble_inner_state: delta <= 0");
  exps.validate();
  if (std::abs(t) > exps.inner_boundary(delta)) {
    std::ostringstream msg;
    msg << "assemble_inner_state: |t|=" << std::abs(t)
        << " beyond the inner boundary " << exps.inner_boundary(delta);
    throw RegimeViolation(msg.str());
  }

  TwoComponentField out;
  out.x = x_grid;
  out.c1.resize(x_grid.size());
  out.c2.resize(x_grid.size());
  const double dp = exps.delta_prime;
  for (std::size_t m = 0; m < x_grid.size(); ++m) {
    const double y = (x_grid[m] - a_mean) / delta;
    const double F = cutoff_profile(std::abs(y) * std::pow(delta, dp));
    if (F == 0.0) {
      out.c1[m] = out.c2[m] = 0.0;
      continue;
    }
    const complexd pref =
        F * std::exp(complexd(0, S_mean / (delta * delta) +
                                     eta_mean * y / delta));
    out.c1[m] = pref * f0(y);
    out.c2[m] = pref * g0(y);
  }
  return out;
}

}  // namespace lztube::packets
