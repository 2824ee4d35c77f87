// lztube -- quantum wave-packet transport on a magnetic tube
// SPDX-License-Identifier: MIT
//
// Exception hierarchy shared by all modules.  Every error carries a
// human-readable message with enough numeric context to reproduce the
// failure; catching lztube::Error catches everything thrown by the library.

#pragma once

#include <stdexcept>
#include <string>

namespace lztube {

/// Base class of all lztube exceptions.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- geometry / spectra ----------------------------------------------------

/// The local linear/quadratic fit of the two-level block is degenerate
/// (vanishing energy-gap slope or vanishing coupling slope at the crossing).
class IllConditionedCrossing : public Error {
 public:
  using Error::Error;
};

/// The adiabatic angles are undefined because the two-level block is exactly
/// degenerate (only possible at the crossing point itself at zero coupling).
class DegeneratePoint : public Error {
 public:
  using Error::Error;
};

// --- classical dynamics ----------------------------------------------------

/// A trajectory left the domain on which the potential is tabulated.
class DomainExit : public Error {
 public:
  using Error::Error;
};

/// Energy conservation would require an imaginary momentum (classically
/// forbidden region); the construction assumes transit without turning points.
class TurningPoint : public Error {
 public:
  using Error::Error;
};

// --- wave packets ------------------------------------------------------------

/// Packet parameters violate a structural requirement (e.g. Re(conj(A)B)=1).
class InvalidParameters : public Error {
 public:
  using Error::Error;
};

/// The evaluation grid does not contain the packet (significant tail mass
/// outside the grid, or aliasing detected in the scaled Fourier transform).
class GridTooSmall : public Error {
 public:
  using Error::Error;
};

/// An internally-real quantity (e.g. the adiabatic transport phase)
/// accumulated a non-negligible imaginary part: a bug, not a user error.
class NormalizationBug : public Error {
 public:
  using Error::Error;
};

/// An inner-regime construction was requested outside its time window.
class RegimeViolation : public Error {
 public:
  using Error::Error;
};

// --- special functions / transitions ----------------------------------------

/// A special-function series failed to converge, or the argument is outside
/// the configured trust region.
class SeriesDivergence : public Error {
 public:
  using Error::Error;
};

/// Unknown incoming-level tag in the matching step.
class InvalidLevel : public Error {
 public:
  using Error::Error;
};

// --- reference solver --------------------------------------------------------

/// The spatial grid does not resolve the fast phase oscillations.
class GridTooCoarse : public Error {
 public:
  using Error::Error;
};

/// The banded linear solve inside the propagator failed.
class SolverBreakdown : public Error {
 public:
  using Error::Error;
};

}  // namespace lztube
