// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT

#include "lztube/angular.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lztube/errors.hpp"
#include "lztube/numerics.hpp"

namespace lztube::angular {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

// ---------------------------------------------------------------------------
// Fiber spectrum
// ---------------------------------------------------------------------------

double eigenvalue(int n, double R, double B) {
  if (!(R > 0.0))
    throw std::invalid_argument("eigenvalue: R must be positive");
  const double q = n + 0.5 * B * R * R;
  return q * q / (2.0 * R * R);
}

double eigenvalue_dR(int n, double R, double B) {
  if (!(R > 0.0))
    throw std::invalid_argument("eigenvalue_dR: R must be positive");
  const double phi = 0.5 * B * R * R;
  return (phi * phi - static_cast<double>(n) * n) / (R * R * R);
}

CrossingPoint crossing(int n, int m, double B) {
  if (n == m || n + m >= 0 || !(B > 0.0))
    throw std::invalid_argument(
        "crossing: need n != m, n + m < 0 and B > 0 (got n=" +
        std::to_string(n) + ", m=" + std::to_string(m) + ")");
  CrossingPoint cp;
  cp.n = n;
  cp.m = m;
  cp.radius = std::sqrt(-static_cast<double>(n + m) / B);
  const double d = n - m;
  cp.energy = -B * d * d / (8.0 * (n + m));
  return cp;
}

// ---------------------------------------------------------------------------
// Angular perturbation
// ---------------------------------------------------------------------------

void AngularPerturbation::set_harmonic(int k, Coefficient c) {
  if (k <= 0)
    throw std::invalid_argument(
        "set_harmonic: k must be positive (c_{-k} is implied by conjugation "
        "and c_0 must vanish)");
  coeffs_[k] = std::move(c);
}

void AngularPerturbation::set_harmonic(int k, complexd constant) {
  set_harmonic(k, [constant](double) { return constant; });
}

AngularPerturbation AngularPerturbation::zero() { return {}; }

AngularPerturbation AngularPerturbation::sine(double w0) {
  AngularPerturbation W;
  W.set_harmonic(1, complexd(0.0, -0.5 * w0));
  return W;
}

AngularPerturbation AngularPerturbation::cosine(double w0) {
  AngularPerturbation W;
  W.set_harmonic(1, complexd(0.5 * w0, 0.0));
  return W;
}

complexd AngularPerturbation::coefficient(int k, double x) const {
  if (k == 0) return {0.0, 0.0};
  const auto it = coeffs_.find(std::abs(k));
  if (it == coeffs_.end()) return {0.0, 0.0};
  const complexd c = it->second(x);
  return k > 0 ? c : std::conj(c);
}

int AngularPerturbation::max_harmonic() const {
  return coeffs_.empty() ? 0 : coeffs_.rbegin()->first;
}

double AngularPerturbation::evaluate(double x, double theta) const {
  double w = 0.0;
  for (const auto& [k, c] : coeffs_)
    w += 2.0 * std::real(c(x) * std::exp(complexd(0.0, k * theta)));
  return w;
}

complexd w_matrix_element(const AngularPerturbation& W, int n, int m,
                          double x) {
  return W.coefficient(n - m, x);
}

// ---------------------------------------------------------------------------
// Two-level reduction
// ---------------------------------------------------------------------------

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

struct PairBlock {
  VectorXcd psi1, psi2;  // gauge included in psi2
  MatrixXcd H;
};

struct FitResult {
  double b1, b2, c2;
};

}  // namespace

struct ReducedTwoLevel::Impl {
  surface::SurfaceProfile profile;
  CrossingPoint pair;
  AngularPerturbation W;
  ReduceOptions opts;
  double delta_ref;
  double x_window;
  int mode_lo;
  int n_modes;
  int idx_n, idx_m;       // storage indices of the pair's reference modes
  complexd gauge{1.0, 0.0};  // constant phase applied to psi2
  double fit_b1 = 0.0, fit_b2 = 0.0, fit_c2 = 0.0, fit_rate = 0.0;

  Impl(surface::SurfaceProfile p, const CrossingPoint& cp,
       AngularPerturbation w, const ReduceOptions& o, double dref, double xw)
      : profile(std::move(p)),
        pair(cp),
        W(std::move(w)),
        opts(o),
        delta_ref(dref),
        x_window(xw) {
    const int lo_mode = std::min(cp.n, cp.m) - o.mode_window;
    const int hi_mode = std::max(cp.n, cp.m) + o.mode_window;
    mode_lo = lo_mode;
    n_modes = hi_mode - lo_mode + 1;
    idx_n = cp.n - lo_mode;
    idx_m = cp.m - lo_mode;
  }

  /// Full fiber matrix g(x, delta) = h(R) + V2 + delta W over the mode
  /// window.
  MatrixXcd window_matrix(double x, double delta) const {
    const double R = profile.radius(x, delta);
    const double B = profile.magnetic_field();
    const double v2 = surface::v2_scaled(profile, x, delta);
    MatrixXcd H = MatrixXcd::Zero(n_modes, n_modes);
    const int band = W.max_harmonic();
    for (int i = 0; i < n_modes; ++i) {
      const int ki = mode_lo + i;
      H(i, i) = eigenvalue(ki, R, B) + v2;
      for (int j = std::max(0, i - band); j < i; ++j) {
        const complexd w = delta * W.coefficient(ki - (mode_lo + j), x);
        H(i, j) = w;
        H(j, i) = std::conj(w);
      }
    }
    return H;
  }

  /// Diagonalizes the window matrix, identifies the two eigenvalues that
  /// continue the unperturbed crossing pair, and Gram-Schmidts the projected
  /// reference plane waves.  Throws IllConditionedCrossing when the pair
  /// group cannot be separated from the rest of the spectrum.
  PairBlock pair_block(double x, double delta) const {
    PairBlock out;
    out.H = window_matrix(x, delta);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(out.H);
    if (es.info() != Eigen::Success)
      throw IllConditionedCrossing("pair_block: eigensolver failed");

    const double R = profile.radius(x, delta);
    const double B = profile.magnetic_field();
    const double v2 = surface::v2_scaled(profile, x, delta);
    const double t1 = eigenvalue(pair.n, R, B) + v2;
    const double t2 = eigenvalue(pair.m, R, B) + v2;

    // Unperturbed isolation gap of the pair within the window.
    double iso = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_modes; ++i) {
      if (i == idx_n || i == idx_m) continue;
      const double lk = eigenvalue(mode_lo + i, R, B) + v2;
      iso = std::min(iso, std::min(std::abs(lk - t1), std::abs(lk - t2)));
    }

    std::vector<std::pair<double, int>> dist(n_modes);
    for (int i = 0; i < n_modes; ++i) {
      const double mu = es.eigenvalues()(i);
      dist[i] = {std::min(std::abs(mu - t1), std::abs(mu - t2)), i};
    }
    std::sort(dist.begin(), dist.end());
    if (!(dist[1].first <= iso / 3.0) || !(dist[2].first >= 2.0 * iso / 3.0))
      throw IllConditionedCrossing(
          "pair group not spectrally isolated at x=" + std::to_string(x) +
          ", delta=" + std::to_string(delta) + " (unperturbed gap " +
          std::to_string(iso) + ")");

    const VectorXcd va = es.eigenvectors().col(dist[0].second);
    const VectorXcd vb = es.eigenvectors().col(dist[1].second);

    // psi1, psi2 by Gram-Schmidt from P e_n, P e_m; the phases of va, vb
    // drop out of the projector, so the basis is deterministic.
    VectorXcd p1 = va * std::conj(va(idx_n)) + vb * std::conj(vb(idx_n));
    const double n1 = p1.norm();
    if (n1 < 0.5)
      throw IllConditionedCrossing(
          "projected reference mode nearly orthogonal to the pair subspace");
    out.psi1 = p1 / n1;
    VectorXcd p2 = va * std::conj(va(idx_m)) + vb * std::conj(vb(idx_m));
    p2 -= out.psi1 * out.psi1.dot(p2);
    const double n2 = p2.norm();
    if (n2 < 0.25)
      throw IllConditionedCrossing(
          "projected reference modes are nearly parallel");
    out.psi2 = (p2 / n2) * gauge;
    return out;
  }

  Entries block_entries(double x, double delta) const {
    const PairBlock pb = pair_block(x, delta);
    const complexd m11 = pb.psi1.dot(pb.H * pb.psi1);
    const complexd m22 = pb.psi2.dot(pb.H * pb.psi2);
    const complexd m12 = pb.psi1.dot(pb.H * pb.psi2);
    Entries e;
    e.beta = 0.5 * (m11.real() - m22.real());
    e.vbar = 0.5 * (m11.real() + m22.real());
    e.gamma = m12.real();
    e.sigma = m12.imag();
    return e;
  }

  /// Least-squares cubic fits of beta and gamma across |x| <= scale * delta;
  /// the cubic absorbs the O(x^2), O(x^3) geometry of the branches so that
  /// the slope and intercept estimates are biased only at O(window^4).
  FitResult fit_at_delta(double delta) const {
    const int n = opts.fit_points;
    const double L = opts.fit_window_scale * delta;
    Eigen::MatrixXd X(n, 4);
    Eigen::VectorXd yb(n), yg(n);
    for (int i = 0; i < n; ++i) {
      const double x = -L + 2.0 * L * i / (n - 1);
      const auto e = block_entries(x, delta);
      X(i, 0) = 1.0;
      X(i, 1) = x;
      X(i, 2) = x * x;
      X(i, 3) = x * x * x;
      yb(i) = e.beta;
      yg(i) = e.gamma;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    const Eigen::VectorXd cb = qr.solve(yb);
    const Eigen::VectorXd cg = qr.solve(yg);
    return {cb(1), cb(0) / delta, cg(0) / delta};
  }
};

ReducedTwoLevel::Entries ReducedTwoLevel::entries(double x,
                                                  double delta) const {
  if (!rescaled_) return impl_->block_entries(x, delta);
  const double d0 = delta / impl_->fit_c2;
  const double x0 = (x - impl_->fit_b2 * d0) / impl_->fit_b1;
  Entries e = impl_->block_entries(x0, d0);
  e.beta *= rate_;
  e.gamma *= rate_;
  e.sigma *= rate_;
  e.vbar *= rate_;
  return e;
}

double ReducedTwoLevel::potential(Level level, double x, double delta) const {
  const Entries e = entries(x, delta);
  const double s = std::sqrt(e.beta * e.beta + e.gamma * e.gamma +
                             e.sigma * e.sigma);
  return e.vbar + (level == Level::A ? s : -s);
}

void ReducedTwoLevel::basis(double x, double delta, std::vector<complexd>& psi1,
                            std::vector<complexd>& psi2) const {
  double x0 = x, d0 = delta;
  if (rescaled_) {
    d0 = delta / impl_->fit_c2;
    x0 = (x - impl_->fit_b2 * d0) / impl_->fit_b1;
  }
  const PairBlock pb = impl_->pair_block(x0, d0);
  psi1.assign(pb.psi1.data(), pb.psi1.data() + pb.psi1.size());
  psi2.assign(pb.psi2.data(), pb.psi2.data() + pb.psi2.size());
}

int ReducedTwoLevel::mode_count() const { return impl_->n_modes; }
int ReducedTwoLevel::mode_of(int storage_index) const {
  return impl_->mode_lo + storage_index;
}

double ReducedTwoLevel::b1() const { return b1_; }
double ReducedTwoLevel::b2() const { return b2_; }
double ReducedTwoLevel::c2() const { return c2_; }
double ReducedTwoLevel::rate() const { return rate_; }
bool ReducedTwoLevel::rescaled() const { return rescaled_; }

double ReducedTwoLevel::x_to_frame(double x_orig, double delta_orig) const {
  if (!rescaled_) return x_orig;
  return impl_->fit_b1 * x_orig + impl_->fit_b2 * delta_orig;
}

double ReducedTwoLevel::x_from_frame(double x_frame, double delta_orig) const {
  if (!rescaled_) return x_frame;
  return (x_frame - impl_->fit_b2 * delta_orig) / impl_->fit_b1;
}

double ReducedTwoLevel::delta_to_frame(double delta_orig) const {
  return rescaled_ ? impl_->fit_c2 * delta_orig : delta_orig;
}

double ReducedTwoLevel::time_to_frame(double t_orig) const {
  if (!rescaled_) return t_orig;
  const double k = impl_->fit_b1 * impl_->fit_b1 /
                   (impl_->fit_c2 * impl_->fit_c2);
  return k * t_orig;
}

double ReducedTwoLevel::time_from_frame(double t_frame) const {
  if (!rescaled_) return t_frame;
  const double k = impl_->fit_b1 * impl_->fit_b1 /
                   (impl_->fit_c2 * impl_->fit_c2);
  return t_frame / k;
}

const CrossingPoint& ReducedTwoLevel::pair() const { return impl_->pair; }
const surface::SurfaceProfile& ReducedTwoLevel::profile() const {
  return impl_->profile;
}
const AngularPerturbation& ReducedTwoLevel::perturbation() const {
  return impl_->W;
}
double ReducedTwoLevel::reference_delta() const { return impl_->delta_ref; }

ReducedTwoLevel reduce_two_level(const surface::SurfaceProfile& profile,
                                 const CrossingPoint& pair,
                                 const AngularPerturbation& W, double x_window,
                                 double delta, const ReduceOptions& opts) {
  if (!(x_window > 0.0) || !(delta > 0.0))
    throw std::invalid_argument(
        "reduce_two_level: x_window and delta must be positive");
  if (opts.fit_points < 8 || opts.mode_window < W.max_harmonic() + 2)
    throw std::invalid_argument(
        "reduce_two_level: need fit_points >= 8 and a mode window wider than "
        "the perturbation band");

  auto impl = std::make_shared<ReducedTwoLevel::Impl>(profile, pair, W, opts,
                                                      delta, x_window);

  // Verify spectral isolation of the pair across the working interval.
  const int scan = 25;
  for (int k = 0; k < scan; ++k) {
    const double x = -x_window + 2.0 * x_window * k / (scan - 1);
    (void)impl->pair_block(x, delta);
  }

  // Constant gauge: make the off-diagonal real and positive at the reference
  // point (x = 0, delta = delta_ref).
  {
    const PairBlock pb = impl->pair_block(0.0, delta);
    const complexd m12 = pb.psi1.dot(pb.H * pb.psi2);
    if (std::abs(m12) > 0.0) impl->gauge = std::conj(m12) / std::abs(m12);
  }

  FitResult fit = impl->fit_at_delta(delta);
  if (opts.refine_delta_fit) {
    const FitResult half = impl->fit_at_delta(0.5 * delta);
    fit.b1 = 2.0 * half.b1 - fit.b1;
    fit.b2 = 2.0 * half.b2 - fit.b2;
    fit.c2 = 2.0 * half.c2 - fit.c2;
  }
  if (!(std::abs(fit.b1) > 1e-12) || !(std::abs(fit.c2) > 1e-12))
    throw IllConditionedCrossing(
        "reduce_two_level: degenerate local fit (b1=" +
        std::to_string(fit.b1) + ", c2=" + std::to_string(fit.c2) +
        "); the crossing has no slope or the perturbation does not couple "
        "the pair");

  impl->fit_b1 = fit.b1;
  impl->fit_b2 = fit.b2;
  impl->fit_c2 = fit.c2;
  impl->fit_rate = std::pow(fit.c2, 4) / (fit.b1 * fit.b1);

  ReducedTwoLevel tl;
  tl.impl_ = impl;
  tl.rescaled_ = false;
  tl.b1_ = fit.b1;
  tl.b2_ = fit.b2;
  tl.c2_ = fit.c2;
  tl.rate_ = impl->fit_rate;
  return tl;
}

ReducedTwoLevel rescale_frame(const ReducedTwoLevel& two_level) {
  if (two_level.rescaled()) return two_level;
  ReducedTwoLevel tl = two_level;
  tl.rescaled_ = true;
  // In normal-form variables the local model reads beta = r x', gamma =
  // r delta'; the rate itself is frame-invariant.
  tl.b1_ = two_level.rate();
  tl.b2_ = 0.0;
  tl.c2_ = two_level.rate();
  tl.rate_ = two_level.rate();
  return tl;
}

// ---------------------------------------------------------------------------
// Adiabatic angles and eigenvectors
// ---------------------------------------------------------------------------

AdiabaticAngles angles_from_entries(double beta, double gamma, double sigma) {
  const double s =
      std::sqrt(beta * beta + gamma * gamma + sigma * sigma);
  if (s == 0.0)
    throw DegeneratePoint(
        "angles_from_entries: the block is exactly degenerate");
  AdiabaticAngles a;
  a.theta = std::acos(std::clamp(beta / s, -1.0, 1.0));
  a.phi = std::atan2(sigma, gamma);
  if (a.phi <= -kPi) a.phi = kPi;
  return a;
}

AdiabaticAngles adiabatic_angles(const ReducedTwoLevel& tl, double x,
                                 double delta) {
  const auto e = tl.entries(x, delta);
  return angles_from_entries(e.beta, e.gamma, e.sigma);
}

LevelVectors eigvecs_from_angles(const AdiabaticAngles& ang) {
  const double th = ang.theta;
  const double c = std::cos(0.5 * th);
  const double s = std::sin(0.5 * th);
  const complexd ep = std::exp(complexd(0.0, ang.phi));
  const complexd em = std::conj(ep);
  LevelVectors lv;
  if (th <= 0.5 * kPi) {
    lv.A = {complexd(c, 0.0), em * s};
    lv.B = {-ep * s, complexd(c, 0.0)};
  } else {
    lv.A = {ep * c, complexd(s, 0.0)};
    lv.B = {complexd(-s, 0.0), em * c};
  }
  return lv;
}

LevelVectors adiabatic_eigvecs(const ReducedTwoLevel& tl, double x,
                               double delta, int time_sign) {
  (void)time_sign;  // the branch is selected by theta alone; see header
  return eigvecs_from_angles(adiabatic_angles(tl, x, delta));
}

// ---------------------------------------------------------------------------
// Perturbation series
// ---------------------------------------------------------------------------

IsolatedSeries perturbation_series(const surface::SurfaceProfile& profile,
                                   const AngularPerturbation& W, int level,
                                   double x, int mode_cutoff) {
  if (mode_cutoff < 1)
    throw std::invalid_argument("perturbation_series: mode_cutoff >= 1");
  const double R = profile.radius(x, 0.0);
  const double B = profile.magnetic_field();
  IsolatedSeries ser;
  ser.mu0 = eigenvalue(level, R, B) + surface::v2_scaled(profile, x, 0.0);
  ser.mu1 = 0.0;  // <n|W|n> = c_0 = 0 for a mean-free perturbation
  ser.mu2 = 0.0;
  const double ln = eigenvalue(level, R, B);
  for (int k = level - mode_cutoff; k <= level + mode_cutoff; ++k) {
    if (k == level) continue;
    const complexd w = W.coefficient(k - level, x);
    if (w == complexd(0.0, 0.0)) continue;
    const double gap = eigenvalue(k, R, B) - ln;
    if (std::abs(gap) < 1e-10)
      throw DegeneratePoint(
          "perturbation_series: level " + std::to_string(level) +
          " is degenerate with " + std::to_string(k) + " at x=" +
          std::to_string(x));
    ser.mu2 -= std::norm(w) / gap;
  }
  return ser;
}

// ---------------------------------------------------------------------------
// Second-order expansion of the block and the modified potential
// ---------------------------------------------------------------------------

struct SecondOrderArrays::Impl {
  numerics::CubicSpline b0, b1, b2;
  numerics::CubicSpline g0, g1, g2;
  numerics::CubicSpline s0, s1, s2;
  numerics::CubicSpline v0, v1, v2;
  double xmin = 0.0, xmax = 0.0;

  void check(double x) const {
    if (x < xmin || x > xmax)
      throw DomainExit("SecondOrderArrays: x=" + std::to_string(x) +
                       " outside the tabulated interval [" +
                       std::to_string(xmin) + ", " + std::to_string(xmax) +
                       "]");
  }
};

double SecondOrderArrays::B3(double x, double delta) const {
  impl_->check(x);
  return impl_->b0.eval(x) + delta * impl_->b1.eval(x) +
         delta * delta * impl_->b2.eval(x);
}

double SecondOrderArrays::G3(double x, double delta) const {
  impl_->check(x);
  return impl_->g0.eval(x) + delta * impl_->g1.eval(x) +
         delta * delta * impl_->g2.eval(x);
}

double SecondOrderArrays::S3(double x, double delta) const {
  impl_->check(x);
  return impl_->s0.eval(x) + delta * impl_->s1.eval(x) +
         delta * delta * impl_->s2.eval(x);
}

double SecondOrderArrays::V3(double x, double delta) const {
  impl_->check(x);
  return impl_->v0.eval(x) + delta * impl_->v1.eval(x) +
         delta * delta * impl_->v2.eval(x);
}

double SecondOrderArrays::s(double x, double delta) const {
  const double b = B3(x, delta);
  const double g = G3(x, delta);
  const double sg = S3(x, delta);
  return std::sqrt(b * b + g * g + sg * sg);
}

double SecondOrderArrays::V3_slope(double x, double delta) const {
  impl_->check(x);
  return impl_->v0.eval_deriv(x) + delta * impl_->v1.eval_deriv(x) +
         delta * delta * impl_->v2.eval_deriv(x);
}

double SecondOrderArrays::x_min() const { return impl_->xmin; }
double SecondOrderArrays::x_max() const { return impl_->xmax; }

SecondOrderArrays expand_two_level(const ReducedTwoLevel& tl,
                                   const std::vector<double>& x_grid,
                                   double fd_step) {
  if (x_grid.size() < 4)
    throw std::invalid_argument("expand_two_level: need at least 4 x nodes");
  if (!(fd_step > 0.0))
    throw std::invalid_argument("expand_two_level: fd_step must be positive");
  for (std::size_t i = 1; i < x_grid.size(); ++i)
    if (!(x_grid[i] > x_grid[i - 1]))
      throw std::invalid_argument(
          "expand_two_level: x_grid must be strictly increasing");

  const double h = fd_step;
  const std::size_t n = x_grid.size();
  std::vector<double> b0(n), b1(n), b2(n), g0(n), g1(n), g2(n), s0(n), s1(n),
      s2(n), v0(n), v1(n), v2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = x_grid[i];
    // At delta = 0 the coupling vanishes identically and the entries are the
    // exact branch data; the stencil supplies the delta-derivatives.
    const auto e0 = tl.entries(x, 0.0);
    const auto ep = tl.entries(x, h);
    const auto em = tl.entries(x, -h);
    b0[i] = e0.beta;
    g0[i] = e0.gamma;
    s0[i] = e0.sigma;
    v0[i] = e0.vbar;
    b1[i] = (ep.beta - em.beta) / (2.0 * h);
    g1[i] = (ep.gamma - em.gamma) / (2.0 * h);
    s1[i] = (ep.sigma - em.sigma) / (2.0 * h);
    v1[i] = (ep.vbar - em.vbar) / (2.0 * h);
    b2[i] = 0.5 * (ep.beta + em.beta - 2.0 * e0.beta) / (h * h);
    g2[i] = 0.5 * (ep.gamma + em.gamma - 2.0 * e0.gamma) / (h * h);
    s2[i] = 0.5 * (ep.sigma + em.sigma - 2.0 * e0.sigma) / (h * h);
    v2[i] = 0.5 * (ep.vbar + em.vbar - 2.0 * e0.vbar) / (h * h);
  }

  auto impl = std::make_shared<SecondOrderArrays::Impl>();
  impl->b0 = numerics::CubicSpline(x_grid, b0);
  impl->b1 = numerics::CubicSpline(x_grid, b1);
  impl->b2 = numerics::CubicSpline(x_grid, b2);
  impl->g0 = numerics::CubicSpline(x_grid, g0);
  impl->g1 = numerics::CubicSpline(x_grid, g1);
  impl->g2 = numerics::CubicSpline(x_grid, g2);
  impl->s0 = numerics::CubicSpline(x_grid, s0);
  impl->s1 = numerics::CubicSpline(x_grid, s1);
  impl->s2 = numerics::CubicSpline(x_grid, s2);
  impl->v0 = numerics::CubicSpline(x_grid, v0);
  impl->v1 = numerics::CubicSpline(x_grid, v1);
  impl->v2 = numerics::CubicSpline(x_grid, v2);
  impl->xmin = x_grid.front();
  impl->xmax = x_grid.back();

  SecondOrderArrays arr;
  arr.impl_ = impl;
  return arr;
}

double modified_potential(const SecondOrderArrays& series, Level level,
                          double x, double delta) {
  const double s = series.s(x, delta);
  return (level == Level::A ? s : -s) + series.V3(x, delta);
}

// ---------------------------------------------------------------------------
// Classical effective minimum
// ---------------------------------------------------------------------------

EffectiveMinimum classical_effective_minimum(double p_theta, double B) {
  if (!(B > 0.0))
    throw InvalidParameters("classical_effective_minimum: B must be positive");
  EffectiveMinimum em;
  em.radius = std::sqrt(2.0 * std::abs(p_theta) / B);
  em.value = p_theta > 0.0 ? p_theta * B : 0.0;
  return em;
}

}  // namespace lztube::angular
