// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT

#include "lztube/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lztube/errors.hpp"

namespace lztube::numerics {

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

double deriv1(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

double deriv2(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h) -
          f(x - 2 * h)) /
         (12 * h * h);
}

double deriv3(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 3 * h) / 8 - f(x - 2 * h) + 13 * f(x - h) / 8 -
          13 * f(x + h) / 8 + f(x + 2 * h) - f(x + 3 * h) / 8) /
         (h * h * h);
}

double deriv1_richardson(const std::function<double(double)>& f, double x,
                         double h0) {
  // Romberg table over the symmetric difference; stop when halving the step
  // no longer improves agreement between successive extrapolants.
  constexpr int kMaxLevels = 10;
  double table[kMaxLevels][kMaxLevels];
  double h = h0;
  table[0][0] = (f(x + h) - f(x - h)) / (2 * h);
  double best = table[0][0];
  double best_err = std::numeric_limits<double>::infinity();
  for (int i = 1; i < kMaxLevels; ++i) {
    h *= 0.5;
    table[i][0] = (f(x + h) - f(x - h)) / (2 * h);
    double pow4 = 1;
    for (int k = 1; k <= i; ++k) {
      pow4 *= 4;
      table[i][k] =
          table[i][k - 1] + (table[i][k - 1] - table[i - 1][k - 1]) / (pow4 - 1);
    }
    const double err = std::abs(table[i][i] - table[i - 1][i - 1]);
    if (err < best_err) {
      best_err = err;
      best = table[i][i];
    } else if (err > 4 * best_err) {
      break;  // roundoff has taken over
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// CubicSpline
// ---------------------------------------------------------------------------

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 3 || y_.size() != n)
    throw std::invalid_argument("CubicSpline: need >= 3 matching samples");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(x_[i] < x_[i + 1]))
      throw std::invalid_argument("CubicSpline: grid must be strictly increasing");

  // Solve the tridiagonal system for interior second derivatives (natural
  // conditions m_0 = m_{n-1} = 0) by the Thomas algorithm.
  m_.assign(n, 0.0);
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1];
    const double hr = x_[i + 1] - x_[i];
    diag[i] = 2 * (hl + hr);
    upper[i] = hr;
    rhs[i] = 6 * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
  }
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double hl = x_[i] - x_[i - 1];  // sub-diagonal entry of row i
    const double w = hl / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
    if (i == 1) break;
  }
}

std::size_t CubicSpline::interval(double x) const {
  // Rightmost knot <= x, clamped to a valid segment index.
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - x_.begin());
  if (i == 0) return 0;
  if (i >= x_.size()) return x_.size() - 2;
  return i - 1;
}

double CubicSpline::eval(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double u = x_[i + 1] - x, v = x - x_[i];
  // Outside the grid the cubic pieces would diverge; continue linearly with
  // the boundary slope instead (C^1 continuation).
  if (x < x_.front()) return y_.front() + eval_deriv(x_.front()) * (x - x_.front());
  if (x > x_.back()) return y_.back() + eval_deriv(x_.back()) * (x - x_.back());
  return (m_[i] * u * u * u + m_[i + 1] * v * v * v) / (6 * h) +
         (y_[i] / h - m_[i] * h / 6) * u + (y_[i + 1] / h - m_[i + 1] * h / 6) * v;
}

double CubicSpline::eval_deriv(double x) const {
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  double xc = std::clamp(x, x_.front(), x_.back());
  const double u = x_[i + 1] - xc, v = xc - x_[i];
  return (-m_[i] * u * u + m_[i + 1] * v * v) / (2 * h) +
         (y_[i + 1] - y_[i]) / h - (m_[i + 1] - m_[i]) * h / 6;
}

double CubicSpline::eval_deriv2(double x) const {
  if (x <= x_.front() || x >= x_.back()) return 0.0;  // natural + linear tails
  const std::size_t i = interval(x);
  const double h = x_[i + 1] - x_[i];
  const double u = x_[i + 1] - x, v = x - x_[i];
  return (m_[i] * u + m_[i + 1] * v) / h;
}

// ---------------------------------------------------------------------------
// circle_quadrature
// ---------------------------------------------------------------------------

complexd circle_quadrature(const std::function<complexd(double)>& f, int n) {
  if (n < 1) throw std::invalid_argument("circle_quadrature: n >= 1 required");
  const double w = 2.0 * M_PI / n;
  complexd acc = 0.0;
  for (int k = 0; k < n; ++k) acc += f(w * k);
  return acc * w;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)
// ---------------------------------------------------------------------------

namespace {

// Butcher tableau of the Dormand-Prince 5(4) pair.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// 5th-order weights equal the last A row (FSAL); these are the error weights
// b5 - b4.
constexpr double kE[7] = {71.0 / 57600,      0.0,         -71.0 / 16695,
                          71.0 / 1920,       -17253.0 / 339200,
                          22.0 / 525,        -1.0 / 40};

}  // namespace

void integrate_dopri5(
    const OdeRhs& f, double t0, std::vector<double> y0,
    const std::vector<double>& t_out,
    const std::function<void(double t, const std::vector<double>& y)>& sink,
    const OdeOptions& opts) {
  if (t_out.empty()) return;
  const double t_end = t_out.back();
  const double dir = (t_end >= t0) ? 1.0 : -1.0;
  for (std::size_t i = 0; i + 1 < t_out.size(); ++i)
    if (dir * (t_out[i + 1] - t_out[i]) < 0)
      throw std::invalid_argument("integrate_dopri5: t_out must be monotone");
  if (dir * (t_out.front() - t0) < 0)
    throw std::invalid_argument("integrate_dopri5: t_out must start at/after t0");

  const std::size_t n = y0.size();
  std::vector<double> y = std::move(y0), y_new(n), y_err(n), y_stage(n);
  std::array<std::vector<double>, 7> k;
  for (auto& ki : k) ki.assign(n, 0.0);

  double t = t0;
  f(t, y, k[0]);

  std::size_t out = 0;
  // Emit any outputs that coincide with t0.
  while (out < t_out.size() && t_out[out] == t0) sink(t_out[out++], y);

  double h = std::abs(opts.initial_step) * dir;
  if (h == 0.0) h = 1e-6 * dir;
  double err_prev = 1.0;
  std::size_t steps = 0;

  while (out < t_out.size()) {
    if (opts.max_step > 0 && std::abs(h) > opts.max_step) h = opts.max_step * dir;
    // Do not step past the next requested output time.
    const double t_next = t_out[out];
    bool hit_output = false;
    if (dir * (t + h - t_next) >= 0) {
      h = t_next - t;
      hit_output = true;
    }
    if (std::abs(h) < 1e-15 * std::max(1.0, std::abs(t))) {
      // Degenerate interval; emit directly.
      while (out < t_out.size() && t_out[out] == t_next) sink(t_out[out++], y);
      h = 1e-6 * dir;
      continue;
    }

    for (int s = 1; s < 7; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0;
        for (int j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
        y_stage[i] = y[i] + h * acc;
      }
      f(t + kC[s] * h, y_stage, k[s]);
    }
    // k[6] is f at the 5th-order solution (stage 7 == solution, FSAL).
    for (std::size_t i = 0; i < n; ++i) {
      y_new[i] = y_stage[i];  // stage 7 state
      double e = 0;
      for (int j = 0; j < 7; ++j) e += kE[j] * k[j][i];
      y_err[i] = h * e;
    }

    double err = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc =
          opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double r = y_err[i] / sc;
      err += r * r;
    }
    err = std::sqrt(err / n);

    if (err <= 1.0) {
      t = hit_output ? t_next : t + h;
      y.swap(y_new);
      k[0].swap(k[6]);  // FSAL
      if (hit_output) {
        while (out < t_out.size() && t_out[out] == t_next) sink(t_out[out++], y);
      }
      const double e = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e, -0.2) * std::pow(err_prev, 0.08);
      fac = std::clamp(fac, 0.2, 5.0);
      h *= fac;
      err_prev = e;
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }

    if (++steps > opts.max_steps)
      throw SolverBreakdown("integrate_dopri5: step limit exceeded");
  }
}

// ---------------------------------------------------------------------------
// BandedLU
// ---------------------------------------------------------------------------

BandedLU::BandedLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1) {
  if (n < 1 || kl < 0 || ku < 0)
    throw std::invalid_argument("BandedLU: invalid shape");
  ab_.assign(static_cast<std::size_t>(ld_) * n_, complexd(0, 0));
  piv_.assign(n_, 0);
}

// Storage: column j holds rows j-ku-kl .. j+kl at offsets 0 .. ld-1, i.e.
// entry (i, j) lives at ab_[j*ld + (kl + ku + i - j)].  The top kl rows are
// fill-in space used during factorization.

void BandedLU::set(int i, int j, complexd v) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_)
    throw std::invalid_argument("BandedLU::set outside band");
  ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)] = v;
}

complexd BandedLU::get(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_ + kl_)
    return complexd(0, 0);
  return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)];
}

void BandedLU::factorize() {
  const int width = kl_ + ku_;  // fill-in extends the upper band to width
  auto at = [&](int i, int j) -> complexd& {
    return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)];
  };
  for (int j = 0; j < n_; ++j) {
    const int km = std::min(kl_, n_ - 1 - j);
    // Partial pivot within the column.
    int p = 0;
    double amax = std::abs(at(j, j));
    for (int i = 1; i <= km; ++i) {
      const double a = std::abs(at(j + i, j));
      if (a > amax) {
        amax = a;
        p = i;
      }
    }
    piv_[j] = j + p;
    if (amax == 0.0) throw SolverBreakdown("BandedLU: singular pivot");
    if (p > 0) {
      const int cmax = std::min(n_ - 1, j + width);
      for (int c = j; c <= cmax; ++c) std::swap(at(j, c), at(j + p, c));
    }
    const complexd pivot = at(j, j);
    for (int i = 1; i <= km; ++i) at(j + i, j) /= pivot;
    const int cmax = std::min(n_ - 1, j + width);
    for (int c = j + 1; c <= cmax; ++c) {
      const complexd u = at(j, c);
      if (u == complexd(0, 0)) continue;
      for (int i = 1; i <= km; ++i) at(j + i, c) -= at(j + i, j) * u;
    }
  }
  factored_ = true;
}

void BandedLU::solve(std::vector<complexd>& b) const {
  if (!factored_) throw std::logic_error("BandedLU::solve before factorize");
  if (static_cast<int>(b.size()) != n_)
    throw std::invalid_argument("BandedLU::solve size mismatch");
  auto at = [&](int i, int j) -> const complexd& {
    return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)];
  };
  // Forward: apply pivots and L (unit lower, multipliers stored in band).
  for (int j = 0; j < n_; ++j) {
    if (piv_[j] != j) std::swap(b[j], b[piv_[j]]);
    const int km = std::min(kl_, n_ - 1 - j);
    const complexd bj = b[j];
    if (bj == complexd(0, 0)) continue;
    for (int i = 1; i <= km; ++i) b[j + i] -= at(j + i, j) * bj;
  }
  // Backward: U x = y with U banded of width kl + ku.
  const int width = kl_ + ku_;
  for (int j = n_ - 1; j >= 0; --j) {
    b[j] /= at(j, j);
    const complexd bj = b[j];
    if (bj == complexd(0, 0)) continue;
    const int imin = std::max(0, j - width);
    for (int i = imin; i < j; ++i) b[i] -= at(i, j) * bj;
  }
}

// ---------------------------------------------------------------------------
// hermitian_band_matvec
// ---------------------------------------------------------------------------

void hermitian_band_matvec(const std::vector<std::vector<complexd>>& lower_diags,
                           const std::vector<complexd>& x,
                           std::vector<complexd>& y) {
  const std::size_t n = x.size();
  y.assign(n, complexd(0, 0));
  if (lower_diags.empty() || lower_diags[0].size() != n)
    throw std::invalid_argument("hermitian_band_matvec: bad diagonals");
  for (std::size_t i = 0; i < n; ++i) y[i] = lower_diags[0][i] * x[i];
  for (std::size_t d = 1; d < lower_diags.size(); ++d) {
    const auto& diag = lower_diags[d];
    for (std::size_t i = 0; i + d < n; ++i) {
      const complexd a = diag[i];
      if (a == complexd(0, 0)) continue;
      y[i + d] += a * x[i];
      y[i] += std::conj(a) * x[i + d];
    }
  }
}

}  // namespace lztube::numerics
