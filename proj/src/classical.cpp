// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT

#include "lztube/classical.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "lztube/errors.hpp"

namespace lztube::classical {

namespace {

std::vector<double> uniform_times(double from, double to, int n_per_unit) {
  const int n = std::max(2, static_cast<int>(std::ceil(std::abs(to - from) *
                                                       n_per_unit)) +
                                1);
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k)
    t[k] = from + (to - from) * static_cast<double>(k) / (n - 1);
  t.back() = to;
  return t;
}

/// Slope estimates at the knots of (t_k, y_k) by local quadratic fit
/// (three-point one-sided at the ends).  Used for Hermite interpolation of
/// quantities whose exact derivative is not carried in the samples.
std::vector<double> fitted_slopes(const std::vector<double>& t,
                                  const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> d(n);
  if (n < 2) return d;
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (t[1] - t[0]);
    return d;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t m = (k == 0) ? 1 : (k == n - 1 ? n - 2 : k);
    const double h1 = t[m] - t[m - 1], h2 = t[m + 1] - t[m];
    const double s1 = (y[m] - y[m - 1]) / h1, s2 = (y[m + 1] - y[m]) / h2;
    // derivative of the parabola through the three points, at t[k]
    const double c = (s2 - s1) / (h1 + h2);  // half the second derivative
    d[k] = s1 + c * (h1 + 2.0 * (t[k] - t[m]));
  }
  return d;
}

double hermite(double t0, double t1, double y0, double y1, double d0,
               double d1, double t) {
  const double h = t1 - t0, u = (t - t0) / h;
  const double u2 = u * u, u3 = u2 * u;
  return y0 * (2 * u3 - 3 * u2 + 1) + y1 * (-2 * u3 + 3 * u2) +
         h * (d0 * (u3 - 2 * u2 + u) + d1 * (u3 - u2));
}

double hermite_deriv(double t0, double t1, double y0, double y1, double d0,
                     double d1, double t) {
  const double h = t1 - t0, u = (t - t0) / h;
  const double u2 = u * u;
  return (y0 * (6 * u2 - 6 * u) + y1 * (-6 * u2 + 6 * u)) / h +
         d0 * (3 * u2 - 4 * u + 1) + d1 * (3 * u2 - 2 * u);
}

}  // namespace

// ---------------------------------------------------------------------------
// RegimeExponents
// ---------------------------------------------------------------------------

void RegimeExponents::validate() const {
  std::ostringstream why;
  if (!(xi > 0.0 && xi < 1.0 / 3.0)) why << "xi=" << xi << " outside (0, 1/3); ";
  if (!(delta_prime > 0.0 && delta_prime < xi))
    why << "delta_prime=" << delta_prime << " outside (0, xi); ";
  if (!(kappa > 2.0 / 3.0 && kappa < 1.0))
    why << "kappa=" << kappa << " outside (2/3, 1); ";
  if (!(1.0 - delta_prime - kappa > 0.0))
    why << "1 - delta_prime - kappa = " << 1.0 - delta_prime - kappa
        << " not positive; ";
  if (!(horizon > 0.0)) why << "horizon=" << horizon << " not positive; ";
  if (const std::string s = why.str(); !s.empty())
    throw RegimeViolation("RegimeExponents: " + s);
}

double RegimeExponents::inner_boundary(double delta) const {
  return std::pow(delta, 1.0 - xi);
}

double RegimeExponents::cutoff_radius(double delta) const {
  return std::pow(delta, 1.0 - delta_prime);
}

double RegimeExponents::matching_time(double delta) const {
  return std::pow(delta, kappa);
}

// ---------------------------------------------------------------------------
// Potential1D
// ---------------------------------------------------------------------------

Potential1D::Potential1D(std::function<double(double)> v,
                         std::function<double(double)> dv, double x_min,
                         double x_max)
    : v_(std::move(v)), dv_(std::move(dv)), x_min_(x_min), x_max_(x_max) {
  if (!(x_min_ < x_max_))
    throw InvalidParameters("Potential1D: empty domain");
}

Potential1D Potential1D::from_samples(const std::vector<double>& x,
                                      const std::vector<double>& v) {
  auto spline = std::make_shared<numerics::CubicSpline>(x, v);
  auto val = [spline](double q) { return spline->eval(q); };
  auto der = [spline](double q) { return spline->eval_deriv(q); };
  return Potential1D(val, der, x.front(), x.back());
}

Potential1D Potential1D::from_function(const std::function<double(double)>& v,
                                       double x_min, double x_max,
                                       int n_samples) {
  if (n_samples < 4) throw InvalidParameters("Potential1D: n_samples < 4");
  std::vector<double> xs(n_samples), vs(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    xs[k] = x_min + (x_max - x_min) * static_cast<double>(k) / (n_samples - 1);
    vs[k] = v(xs[k]);
  }
  return from_samples(xs, vs);
}

double Potential1D::value(double x) const {
  if (empty()) throw InvalidParameters("Potential1D: empty");
  if (x < x_min_ || x > x_max_) {
    std::ostringstream msg;
    msg << "Potential1D: x=" << x << " outside [" << x_min_ << ", " << x_max_
        << "]";
    throw DomainExit(msg.str());
  }
  return v_(x);
}

double Potential1D::deriv(double x) const {
  if (empty()) throw InvalidParameters("Potential1D: empty");
  if (x < x_min_ || x > x_max_) {
    std::ostringstream msg;
    msg << "Potential1D: x=" << x << " outside [" << x_min_ << ", " << x_max_
        << "]";
    throw DomainExit(msg.str());
  }
  return dv_(x);
}

double Potential1D::second_deriv(double x, double h) const {
  if (!(h > 0)) throw InvalidParameters("Potential1D: second_deriv h <= 0");
  return (value(x + h) - 2.0 * value(x) + value(x - h)) / (h * h);
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

Trajectory::Trajectory(std::vector<TrajectoryPoint> pts) : pts_(std::move(pts)) {
  if (pts_.size() < 2)
    throw InvalidParameters("Trajectory: need at least two samples");
  for (std::size_t k = 1; k < pts_.size(); ++k)
    if (!(pts_[k].t > pts_[k - 1].t))
      throw InvalidParameters("Trajectory: time samples not increasing");
}

std::size_t Trajectory::segment(double t) const {
  if (t < pts_.front().t - 1e-12 || t > pts_.back().t + 1e-12) {
    std::ostringstream msg;
    msg << "Trajectory: t=" << t << " outside [" << pts_.front().t << ", "
        << pts_.back().t << "]";
    throw DomainExit(msg.str());
  }
  const auto it = std::upper_bound(
      pts_.begin(), pts_.end(), t,
      [](double v, const TrajectoryPoint& p) { return v < p.t; });
  const std::size_t k = static_cast<std::size_t>(it - pts_.begin());
  return std::min(std::max<std::size_t>(k, 1) - 1, pts_.size() - 2);
}

double Trajectory::a(double t) const {
  const std::size_t k = segment(t);
  const auto &p = pts_[k], &q = pts_[k + 1];
  return hermite(p.t, q.t, p.a, q.a, p.eta, q.eta, t);
}

double Trajectory::eta(double t) const {
  const std::size_t k = segment(t);
  const auto &p = pts_[k], &q = pts_[k + 1];
  return hermite_deriv(p.t, q.t, p.a, q.a, p.eta, q.eta, t);
}

double Trajectory::S(double t) const {
  // Hermite with fitted slopes; the samples are dense enough (hundreds per
  // unit time) that the O(h^3) slope error is far below integrator accuracy.
  const std::size_t k = segment(t);
  const std::size_t lo = (k == 0) ? 0 : k - 1;
  const std::size_t hi = std::min(pts_.size() - 1, k + 2);
  std::vector<double> ts, Ss;
  for (std::size_t j = lo; j <= hi; ++j) {
    ts.push_back(pts_[j].t);
    Ss.push_back(pts_[j].S);
  }
  const std::vector<double> slopes = fitted_slopes(ts, Ss);
  const std::size_t m = k - lo;
  return hermite(ts[m], ts[m + 1], Ss[m], Ss[m + 1], slopes[m], slopes[m + 1],
                 t);
}

double Trajectory::t_min() const { return pts_.front().t; }
double Trajectory::t_max() const { return pts_.back().t; }

// ---------------------------------------------------------------------------
// integrate_trajectory
// ---------------------------------------------------------------------------

namespace {

void run_leg(const Potential1D& V, double t_anchor,
             const std::vector<double>& y0, double t_end, int n_per_unit,
             bool allow_turning, const numerics::OdeOptions& opts,
             std::vector<TrajectoryPoint>& out) {
  if (t_end == t_anchor) return;
  const numerics::OdeRhs rhs = [&V](double, const std::vector<double>& y,
                                    std::vector<double>& dy) {
    dy[0] = y[1];
    dy[1] = -V.deriv(y[0]);
    dy[2] = 0.5 * y[1] * y[1] - V.value(y[0]);
  };
  const double eta_sign = (y0[1] > 0) ? 1.0 : -1.0;
  const auto t_out = uniform_times(t_anchor, t_end, n_per_unit);
  integrate_dopri5(
      rhs, t_anchor, y0, t_out,
      [&](double t, const std::vector<double>& y) {
        if (!allow_turning && y[1] * eta_sign <= 0.0) {
          std::ostringstream msg;
          msg << "integrate_trajectory: momentum changed sign at t=" << t
              << " (a=" << y[0] << ", eta=" << y[1] << ")";
          throw TurningPoint(msg.str());
        }
        if (t != t_anchor) out.push_back({t, y[0], y[1], y[2]});
      },
      opts);
}

}  // namespace

Trajectory integrate_trajectory(const Potential1D& V, double t_anchor,
                                double a0, double eta0, double S0,
                                double t_from, double t_to, int n_out_per_unit,
                                bool allow_turning,
                                const numerics::OdeOptions& opts) {
  if (!(t_from < t_to))
    throw InvalidParameters("integrate_trajectory: t_from >= t_to");
  if (t_anchor < t_from || t_anchor > t_to)
    throw InvalidParameters(
        "integrate_trajectory: anchor outside [t_from, t_to]");
  const std::vector<double> y0 = {a0, eta0, S0};

  std::vector<TrajectoryPoint> back, fwd;
  run_leg(V, t_anchor, y0, t_from, n_out_per_unit, allow_turning, opts, back);
  run_leg(V, t_anchor, y0, t_to, n_out_per_unit, allow_turning, opts, fwd);

  std::vector<TrajectoryPoint> pts;
  pts.reserve(back.size() + fwd.size() + 1);
  for (auto it = back.rbegin(); it != back.rend(); ++it) pts.push_back(*it);
  pts.push_back({t_anchor, a0, eta0, S0});
  for (const auto& p : fwd) pts.push_back(p);
  return Trajectory(std::move(pts));
}

Trajectory integrate_trajectory(const Potential1D& V, double eta0,
                                double t_from, double t_to,
                                int n_out_per_unit) {
  return integrate_trajectory(V, 0.0, 0.0, eta0, 0.0, t_from, t_to,
                              n_out_per_unit);
}

// ---------------------------------------------------------------------------
// LinearizedFlow
// ---------------------------------------------------------------------------

LinearizedFlow::LinearizedFlow(std::vector<LinearizedPoint> pts)
    : pts_(std::move(pts)) {
  if (pts_.size() < 2)
    throw InvalidParameters("LinearizedFlow: need at least two samples");
  for (std::size_t k = 1; k < pts_.size(); ++k)
    if (!(pts_[k].t > pts_[k - 1].t))
      throw InvalidParameters("LinearizedFlow: time samples not increasing");
}

std::size_t LinearizedFlow::segment(double t) const {
  if (t < pts_.front().t - 1e-12 || t > pts_.back().t + 1e-12) {
    std::ostringstream msg;
    msg << "LinearizedFlow: t=" << t << " outside [" << pts_.front().t << ", "
        << pts_.back().t << "]";
    throw DomainExit(msg.str());
  }
  const auto it = std::upper_bound(
      pts_.begin(), pts_.end(), t,
      [](double v, const LinearizedPoint& p) { return v < p.t; });
  const std::size_t k = static_cast<std::size_t>(it - pts_.begin());
  return std::min(std::max<std::size_t>(k, 1) - 1, pts_.size() - 2);
}

complexd LinearizedFlow::A(double t) const {
  // A' = iB exactly, so Hermite interpolation with the stored derivative.
  const std::size_t k = segment(t);
  const auto &p = pts_[k], &q = pts_[k + 1];
  const complexd i(0, 1);
  const complexd d0 = i * p.B, d1 = i * q.B;
  return complexd(hermite(p.t, q.t, p.A.real(), q.A.real(), d0.real(),
                          d1.real(), t),
                  hermite(p.t, q.t, p.A.imag(), q.A.imag(), d0.imag(),
                          d1.imag(), t));
}

complexd LinearizedFlow::B(double t) const {
  const std::size_t k = segment(t);
  const std::size_t lo = (k == 0) ? 0 : k - 1;
  const std::size_t hi = std::min(pts_.size() - 1, k + 2);
  std::vector<double> ts, re, im;
  for (std::size_t j = lo; j <= hi; ++j) {
    ts.push_back(pts_[j].t);
    re.push_back(pts_[j].B.real());
    im.push_back(pts_[j].B.imag());
  }
  const auto dre = fitted_slopes(ts, re), dim = fitted_slopes(ts, im);
  const std::size_t m = k - lo;
  return complexd(
      hermite(ts[m], ts[m + 1], re[m], re[m + 1], dre[m], dre[m + 1], t),
      hermite(ts[m], ts[m + 1], im[m], im[m + 1], dim[m], dim[m + 1], t));
}

LinearizedFlow integrate_linearized(const Trajectory& traj,
                                    const Potential1D& V, double t_anchor,
                                    complexd A0, complexd B0, double fd_step,
                                    int n_out_per_unit,
                                    const numerics::OdeOptions& opts) {
  if (t_anchor < traj.t_min() || t_anchor > traj.t_max())
    throw InvalidParameters("integrate_linearized: anchor outside trajectory");
  const numerics::OdeRhs rhs = [&](double t, const std::vector<double>& y,
                                   std::vector<double>& dy) {
    // y = (Re A, Im A, Re B, Im B); A' = iB, B' = i V''(a(t)) A.
    const double vpp = V.second_deriv(traj.a(t), fd_step);
    dy[0] = -y[3];
    dy[1] = y[2];
    dy[2] = -vpp * y[1];
    dy[3] = vpp * y[0];
  };
  const std::vector<double> y0 = {A0.real(), A0.imag(), B0.real(), B0.imag()};
  const double inv0 = (std::conj(A0) * B0).real();

  std::vector<LinearizedPoint> back, fwd;
  auto sink_into = [&](std::vector<LinearizedPoint>& out) {
    return [&out, t_anchor, inv0](double t, const std::vector<double>& y) {
      const complexd A(y[0], y[1]), B(y[2], y[3]);
      const double inv = (std::conj(A) * B).real();
      if (std::abs(inv - inv0) > 1e-8 * std::max(1.0, std::abs(inv0))) {
        std::ostringstream msg;
        msg << "integrate_linearized: Re(conj(A) B) drifted from " << inv0
            << " to " << inv << " at t=" << t;
        throw NormalizationBug(msg.str());
      }
      if (t != t_anchor) out.push_back({t, A, B});
    };
  };
  if (traj.t_min() < t_anchor)
    integrate_dopri5(rhs, t_anchor, y0,
                     uniform_times(t_anchor, traj.t_min(), n_out_per_unit),
                     sink_into(back), opts);
  if (traj.t_max() > t_anchor)
    integrate_dopri5(rhs, t_anchor, y0,
                     uniform_times(t_anchor, traj.t_max(), n_out_per_unit),
                     sink_into(fwd), opts);

  std::vector<LinearizedPoint> pts;
  pts.reserve(back.size() + fwd.size() + 1);
  for (auto it = back.rbegin(); it != back.rend(); ++it) pts.push_back(*it);
  pts.push_back({t_anchor, A0, B0});
  for (const auto& p : fwd) pts.push_back(p);
  return LinearizedFlow(std::move(pts));
}

// ---------------------------------------------------------------------------
// Matched asymptotics
// ---------------------------------------------------------------------------

double momentum_from_energy(double E, const Potential1D& V, double a,
                            double tol) {
  const double gap = E - V.value(a);
  if (gap < tol) {
    std::ostringstream msg;
    msg << "momentum_from_energy: E - V(a) = " << gap << " at a=" << a;
    throw TurningPoint(msg.str());
  }
  return std::sqrt(2.0 * gap);
}

AsymptoticPoint outer_asymptotics(Level level, double t, double delta,
                                  double eta0, double r, double v3_slope) {
  if (t == 0.0)
    throw InvalidParameters("outer_asymptotics: t = 0 is inside the inner zone");
  const double sg = (level == Level::A) ? 1.0 : -1.0;
  const double e2 = eta0 * eta0;
  const double lg = std::log(2.0 * eta0);
  const double d2 = delta * delta;
  const double bracket = 0.5 * t * t + d2 * std::log(std::abs(t)) / (2.0 * e2) +
                         d2 * (1.0 + 2.0 * lg) / (4.0 * e2) -
                         d2 * std::log(delta) / (2.0 * e2);
  const double a = -0.5 * v3_slope * t * t + eta0 * t +
                   sg * (r / eta0) * delta * t - sg * r * bracket;
  const double eta = -v3_slope * t + eta0 + sg * (r / eta0) * delta -
                     sg * r * (t + d2 / (2.0 * e2 * t));
  return {a, eta};
}

ClassicalState tilded_initial_data(Level level, int time_sign, double delta,
                                   const RegimeExponents& exps, double r,
                                   double eta0, double eta0_level,
                                   complexd A_at_0, complexd B_at_0,
                                   double v3_slope, const Potential1D& v_tilde,
                                   double S_at_t0) {
  if (time_sign != 1 && time_sign != -1)
    throw InvalidParameters("tilded_initial_data: time_sign must be +/-1");
  if (!(delta > 0)) throw InvalidParameters("tilded_initial_data: delta <= 0");
  exps.validate();

  const double t0 = time_sign * exps.matching_time(delta);
  const AsymptoticPoint ap =
      outer_asymptotics(level, t0, delta, eta0_level, r, v3_slope);

  // Momentum from energy conservation on the tilded potential (the outer
  // expansion's momentum is only asymptotic; the conserved energy pins it).
  const double energy = 0.5 * eta0_level * eta0_level + v_tilde.value(0.0);
  const double eta = momentum_from_energy(energy, v_tilde, ap.a);

  const double sg = (level == Level::A) ? 1.0 : -1.0;
  const complexd i(0, 1);
  const complexd B_tilde =
      B_at_0 - sg * static_cast<double>(time_sign) * i * r * A_at_0 / eta0;

  ClassicalState st;
  st.t = t0;
  st.a = ap.a;
  st.eta = eta;
  st.S = S_at_t0;
  st.A = A_at_0;
  st.B = B_tilde;
  st.level = level;
  return st;
}

}  // namespace lztube::classical
