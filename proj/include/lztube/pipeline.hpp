// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT
//
// End-to-end experiment driver: scenario configuration (JSON), calibration of
// the crossing model, assembly of the incoming semiclassical state, reference
// propagation, measurement, prediction comparison, convergence studies, and
// report emission.  This is the layer the CLI calls into.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lztube/angular.hpp"
#include "lztube/classical.hpp"
#include "lztube/exact.hpp"
#include "lztube/landauzener.hpp"
#include "lztube/packets.hpp"
#include "lztube/surface.hpp"

namespace lztube::pipeline {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------

/// Numerical resolution of the reference solver (per-delta overridable).
struct Resolution {
  int points_per_wavelength = 26;  ///< x-resolution vs de Broglie wavelength
  int steps_per_period = 44;       ///< dt resolution vs fastest phase period
  int n_modes = 14;                ///< angular modes kept
  int mode_min = -7;               ///< lowest angular mode kept
  double padding = 0.5;            ///< spatial padding beyond the swept range
  std::optional<double> horizon;   ///< per-delta override of the time horizon
};

/// Everything needed to reproduce a run.  Times and momenta are in the
/// rescaled (normal-form) frame; see README for the JSON schema.
struct Scenario {
  std::string name = "headline";

  // Geometry: profile preset, calibrated so the crossing sits at x = 0.
  std::string profile = "tanh_step";   // cylinder | gaussian_bump | tanh_step
  double profile_base = 1.0;
  double profile_amplitude = 0.25;
  double profile_width = 2.0;          // steepness (tanh) or width (gaussian)
  double magnetic_field = 1.0;
  int pair_n = 0;
  int pair_m = -1;

  // Symmetry-breaking perturbation delta * W.
  std::string perturbation = "sine";   // sine | cosine | none
  double w0 = 1.0;

  // Semiclassical data.
  std::vector<double> deltas{0.1, 0.05, 0.025};
  classical::RegimeExponents exponents{};  // xi, delta_prime, kappa, horizon
  int packet_index = 0;                    // Hagedorn excitation j
  double eta0 = 1.0;                       // incoming momentum at the crossing
  double phase_S0 = 0.0;                   // external action anchor (B branch)

  // Numerics.
  Resolution resolution{};
  std::vector<Resolution> per_delta_resolution{};  // parallel to deltas, optional

  // Output.
  std::string output_dir = "out";

  void validate() const;
  static Scenario from_json(const json& j);
  static Scenario from_file(const std::string& path);
  json to_json() const;

  Resolution resolution_for(std::size_t delta_index) const;
};

// ---------------------------------------------------------------------------
// Calibrated crossing model
// ---------------------------------------------------------------------------

/// All frame data derived from a scenario at one delta: the calibrated
/// profile, the two-level reduction in the original and rescaled frames, the
/// second-order expansion arrays, and the level potentials in the rescaled
/// frame (exact adiabatic, modified, and mean).
struct CrossingModel {
  surface::SurfaceProfile profile;   // calibrated: R(0,0) = pair.radius
  angular::CrossingPoint pair{};
  angular::AngularPerturbation W;
  angular::ReducedTwoLevel two_level;       // original frame
  angular::ReducedTwoLevel rescaled;        // normal-form frame
  angular::SecondOrderArrays arrays;        // rescaled frame

  double delta = 0;         // original-frame delta
  double delta_resc = 0;    // c2 * delta
  double rate = 0;          // r
  double eta0 = 0;          // rescaled incoming momentum at crossing
  double v3_slope = 0;      // x-slope of the trace part at the crossing

  classical::Potential1D vA, vB, vmean;          // exact adiabatic (rescaled)
  classical::Potential1D vA_tilde, vB_tilde;     // modified potentials

  /// Rescaled-frame x-window the potentials are tabulated on.
  double x_lo = 0, x_hi = 0;
};

CrossingModel build_model(const Scenario& s, double delta);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct PopulationSample {
  double t;              // rescaled time
  double A, B, other;
  double norm;
};

struct DeltaReport {
  double delta = 0;
  double delta_resc = 0;

  // calibration
  double b1 = 0, b2 = 0, c2 = 0, rate = 0, eta0 = 0;

  // prediction (closed form)
  double predicted_PA = 0, predicted_PB = 0;

  // measurement (reference solver)
  double measured_PA = 0, measured_PB = 0, measured_other = 0;
  double overlap_pre = 0;    // |<psi_exact, Psi_BO>| at the first checkpoint
  double overlap_min_pre = 0;// min over pre-crossing checkpoints
  double overlap_post = 0;   // |<psi_exact, Psi_predicted>| after the crossing
  double norm_drift = 0;
  double mode_edge_mass = 0;

  // residual diagnostics
  double residual_integral = 0;   // delta^{-2} int ||i d^2 dt Psi - H Psi|| dt
  double r_term_integral = 0;     // same for the metric-correction term alone

  double bo_error_pre = 0;   // ||psi_exact - Psi_BO|| at the last pre-crossing time

  std::vector<PopulationSample> populations;  // time series

  double wall_seconds = 0;   // informational; excluded from canonical output
};

struct RunReport {
  std::string kind;  // "crossing" | "converge"
  Scenario scenario;
  std::vector<DeltaReport> rows;

  // convergence-suite fits (log-log slopes vs delta)
  double bo_error_slope = 0;
  double r_term_slope = 0;
  double vtilde_slope = 0;

  json to_json(bool include_timings = false) const;
  std::string populations_csv() const;
  std::string summary_csv() const;
};

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

/// The full transition experiment: calibrate, build tilded classical data,
/// assemble the incoming lower-level state at t = -T, propagate with the
/// reference solver, measure populations and overlaps, compare with the
/// closed-form prediction.  Runs every delta in the scenario.
RunReport run_crossing_experiment(const Scenario& s);

/// Pre-crossing approximation quality across delta: ||psi_exact - Psi_BO||
/// at the inner boundary, residual integrals, the metric-correction residual
/// slope, and the modified-potential error slope.
RunReport run_convergence_suite(const Scenario& s);

/// Writes <name>_summary.csv, <name>_populations.csv, <name>_report.json
/// into dir (created if needed).
void emit_report(const RunReport& r, const std::string& dir);

/// Built-in, self-contained scenario presets: "headline" (the three-delta
/// tanh-step transition experiment with economical per-delta resolutions)
/// and "diabatic" (the same geometry with the perturbation switched off,
/// whose transition probability vanishes by mode conservation).  Throws
/// InvalidParameters for unknown names.
Scenario preset_scenario(const std::string& name);

}  // namespace lztube::pipeline
