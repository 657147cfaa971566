#pragma once

#include <stdexcept>
#include <string>

namespace ccs {

/// Violated precondition or invariant; the message names the offended constraint.
struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Demultiplexer: the nearest comb line is outside the DFB locking range.
struct NoLineInLockingRange : std::runtime_error {
  NoLineInLockingRange(double detuning_hz, double half_range_hz);
  double detuning_hz;
  double half_range_hz;
};

/// Frequency-offset estimator: no usable line in the 4th-power periodogram.
struct NoSpectralPeak : std::runtime_error {
  explicit NoSpectralPeak(double ratio_db);
  double peak_to_median_db;
};

/// Rotation resolver: top two candidate scores too close to call.
struct AmbiguousRotation : std::runtime_error {
  explicit AmbiguousRotation(double margin_db);
  double margin_db;
};

/// Configuration file problem; line is 1-based, 0 when not tied to a line.
struct ConfigError : std::runtime_error {
  ConfigError(int line, const std::string& message);
  int line;
};

}  // namespace ccs
